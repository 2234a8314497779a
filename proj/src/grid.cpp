#include "ksl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "ksl/kernels.hpp"

namespace ksl {

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= static_cast<std::size_t>(N);
    return s;
}

double GridSpec::cell() const { return std::pow(h(), n); }
double GridSpec::fcell() const { return std::pow(dxi(), n); }
double GridSpec::xi_max() const { return std::sqrt(static_cast<double>(n)) * nyquist(); }

void GridSpec::validate(std::size_t mem_cap) const {
    if (n != 3 && n != 5) throw std::invalid_argument("grid: dimension must be 3 or 5");
    if (N < 4 || N % 2 != 0) throw std::invalid_argument("grid: N must be even and >= 4");
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid: L must be positive");
    if (mem_cap > 0 && size() * sizeof(cplx) > mem_cap)
        throw std::invalid_argument("grid: N^n exceeds the memory cap");
}

Field::Field(const GridSpec& g, Rep r) : grid(g), rep(r), v(g.size(), cplx(0.0, 0.0)) {}

int signed_index(int idx, int N) { return idx < N / 2 ? idx : idx - N; }

void multi_index(const GridSpec& g, std::size_t lin, int* out) {
    for (int a = g.n - 1; a >= 0; --a) {
        out[a] = static_cast<int>(lin % g.N);
        lin /= g.N;
    }
}

std::size_t linear_index(const GridSpec& g, const int* idx) {
    std::size_t lin = 0;
    for (int a = 0; a < g.n; ++a) lin = lin * g.N + static_cast<std::size_t>(((idx[a] % g.N) + g.N) % g.N);
    return lin;
}

double coord(const GridSpec& g, int j) { return -g.L + j * g.h(); }

namespace {

using Key = std::tuple<int, int, double, int>;
std::mutex table_mutex;
std::map<Key, std::shared_ptr<std::vector<double>>> tables;

const std::vector<double>& table(const GridSpec& g, int kind) {
    std::lock_guard<std::mutex> lock(table_mutex);
    Key key{g.n, g.N, g.L, kind};
    auto it = tables.find(key);
    if (it != tables.end()) return *it->second;
    auto t = std::make_shared<std::vector<double>>(g.size());
    int idx[8];
    const double h = g.h(), dk = g.dxi();
    for (std::size_t i = 0; i < g.size(); ++i) {
        multi_index(g, i, idx);
        double s = 0.0;
        for (int a = 0; a < g.n; ++a) {
            double c = kind == 0 ? -g.L + idx[a] * h : dk * signed_index(idx[a], g.N);
            s += c * c;
        }
        (*t)[i] = kind == 0 ? std::sqrt(s) : s;
    }
    tables.emplace(key, t);
    return *t;
}

int parity(const GridSpec& g, std::size_t lin) {
    int s = 0;
    for (int a = 0; a < g.n; ++a) {
        s += static_cast<int>(lin % g.N);
        lin /= g.N;
    }
    return s & 1;
}

void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

const std::vector<double>& radius_table(const GridSpec& g) { return table(g, 0); }
const std::vector<double>& xi2_table(const GridSpec& g) { return table(g, 1); }

std::size_t origin_index(const GridSpec& g) {
    std::vector<int> idx(g.n, g.N / 2);
    return linear_index(g, idx.data());
}

double sphere_area(int n) { return 2.0 * std::pow(pi, n / 2.0) / std::tgamma(n / 2.0); }

double volume_ball_radius(int n) {
    double omega = std::pow(pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
    return std::pow(1.0 / omega, 1.0 / n);
}

Field forward_transform(const Field& f) {
    if (f.rep != Rep::physical) throw std::invalid_argument("forward_transform: field is not physical");
    Field out = f;
    out.rep = Rep::frequency;
    par::dft(out.v, f.grid.n, f.grid.N, -1);
    const double c = f.grid.cell() / std::pow(2.0 * pi, f.grid.n / 2.0);
    const std::ptrdiff_t sz = out.v.size();
#pragma omp parallel for schedule(static) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) out.v[i] *= parity(f.grid, i) ? -c : c;
    return out;
}

Field inverse_transform(const Field& f) {
    if (f.rep != Rep::frequency) throw std::invalid_argument("inverse_transform: field is not in frequency form");
    Field out = f;
    out.rep = Rep::physical;
    const double c = f.grid.fcell() / std::pow(2.0 * pi, f.grid.n / 2.0);
    const std::ptrdiff_t sz = out.v.size();
#pragma omp parallel for schedule(static) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) out.v[i] *= parity(f.grid, i) ? -c : c;
    par::dft(out.v, f.grid.n, f.grid.N, +1);
    return out;
}

Field apply_symbol(const Field& f, const std::vector<cplx>& symbol) {
    if (symbol.size() != f.size()) throw std::invalid_argument("apply_symbol: size mismatch");
    Field out = f;
    if (f.rep == Rep::frequency) {
        par::mul(out.v, symbol);
        return out;
    }
    // the lattice phases of the unitary transform cancel in a round trip
    par::dft(out.v, f.grid.n, f.grid.N, -1);
    par::mul(out.v, symbol);
    par::dft(out.v, f.grid.n, f.grid.N, +1);
    par::scale(out.v, 1.0 / static_cast<double>(f.size()));
    return out;
}

Field apply_symbol(const Field& f, const std::vector<double>& symbol) {
    if (symbol.size() != f.size()) throw std::invalid_argument("apply_symbol: size mismatch");
    Field out = f;
    if (f.rep == Rep::frequency) {
        par::mul(out.v, symbol);
        return out;
    }
    par::dft(out.v, f.grid.n, f.grid.N, -1);
    par::mul(out.v, symbol);
    par::dft(out.v, f.grid.n, f.grid.N, +1);
    par::scale(out.v, 1.0 / static_cast<double>(f.size()));
    return out;
}

std::vector<cplx> radial_symbol(const GridSpec& g, const std::function<cplx(double)>& sigma) {
    const auto& xi2 = xi2_table(g);
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        cplx val = sigma(std::sqrt(xi2[i]));
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
            if (xi2[i] == 0.0)
                val = 0.0;
            else
                throw std::domain_error("multiplier is not finite at a nonzero lattice point");
        }
        s[i] = val;
    }
    return s;
}

std::vector<double> radial_symbol_real(const GridSpec& g, const std::function<double(double)>& sigma) {
    const auto& xi2 = xi2_table(g);
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        double val = sigma(std::sqrt(xi2[i]));
        if (!std::isfinite(val)) {
            if (xi2[i] == 0.0)
                val = 0.0;
            else
                throw std::domain_error("multiplier is not finite at a nonzero lattice point");
        }
        s[i] = val;
    }
    return s;
}

Field apply_radial_multiplier(const Field& f, const std::function<cplx(double)>& sigma) {
    return apply_symbol(f, radial_symbol(f.grid, sigma));
}

Field apply_multiplier(const Field& f, const std::function<cplx(std::span<const double>)>& sigma) {
    const GridSpec& g = f.grid;
    std::vector<cplx> s(g.size());
    std::vector<int> idx(g.n);
    std::vector<double> xi(g.n);
    for (std::size_t i = 0; i < s.size(); ++i) {
        multi_index(g, i, idx.data());
        bool zero = true;
        for (int a = 0; a < g.n; ++a) {
            xi[a] = g.dxi() * signed_index(idx[a], g.N);
            zero = zero && xi[a] == 0.0;
        }
        cplx val = sigma(xi);
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
            if (!zero) throw std::domain_error("multiplier is not finite at a nonzero lattice point");
            val = 0.0;
        }
        s[i] = val;
    }
    return apply_symbol(f, s);
}

double norm_lp(const Field& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("norm_lp: p must be >= 1");
    if (f.rep != Rep::physical) throw std::invalid_argument("norm_lp: field must be physical");
    if (std::isinf(p)) return par::max_abs(f.v);
    return std::pow(par::sum_abs_pow(f.v, p) * f.grid.cell(), 1.0 / p);
}

double norm_l2(const Field& f) {
    double c = f.rep == Rep::physical ? f.grid.cell() : f.grid.fcell();
    return std::sqrt(par::sum_abs_pow(f.v, 2.0) * c);
}

double weighted_l2_norm(const Field& f, const std::vector<double>& weight) {
    if (weight.size() != f.size()) throw std::invalid_argument("weighted_l2_norm: size mismatch");
    if (f.rep != Rep::physical) throw std::invalid_argument("weighted_l2_norm: field must be physical");
    double s = 0.0;
    bool bad = false;
    const std::ptrdiff_t sz = f.v.size();
#pragma omp parallel for schedule(static) reduction(+ : s) reduction(|| : bad) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) {
        bad = bad || weight[i] < 0.0;
        s += weight[i] * weight[i] * std::norm(f.v[i]);
    }
    if (bad) throw std::invalid_argument("weighted_l2_norm: negative weight");
    return std::sqrt(s * f.grid.cell());
}

cplx inner(const Field& f, const Field& g) {
    require_same_grid(f, g);
    if (f.rep != g.rep) throw std::invalid_argument("inner: representation mismatch");
    double c = f.rep == Rep::physical ? f.grid.cell() : f.grid.fcell();
    return par::dot(f.v, g.v) * c;
}

std::vector<double> power_weight(const GridSpec& g, double a) {
    const auto& r = radius_table(g);
    const double rbar = g.h() * volume_ball_radius(g.n);
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(r[i] == 0.0 ? rbar : r[i], a);
    return w;
}

std::vector<double> bracket_weight(const GridSpec& g, double s) {
    const auto& r = radius_table(g);
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(1.0 + r[i] * r[i], 0.5 * s);
    return w;
}

std::vector<double> sample_weight(const GridSpec& g,
                                  const std::function<double(std::span<const double>)>& fn) {
    std::vector<double> w(g.size());
    std::vector<int> idx(g.n);
    std::vector<double> x(g.n);
    const std::size_t o = origin_index(g);
    const double rbar = g.h() * volume_ball_radius(g.n);
    for (std::size_t i = 0; i < w.size(); ++i) {
        multi_index(g, i, idx.data());
        for (int a = 0; a < g.n; ++a) x[a] = coord(g, idx[a]);
        if (i == o) {
            // evaluate at the cell-averaged radius along the first axis
            std::fill(x.begin(), x.end(), 0.0);
            x[0] = rbar;
        }
        w[i] = fn(x);
        if (w[i] < 0.0 || !std::isfinite(w[i])) throw std::invalid_argument("sample_weight: weight must be finite and >= 0");
    }
    return w;
}

Field sample(const GridSpec& g, const std::function<cplx(std::span<const double>)>& fn) {
    Field f(g);
    std::vector<int> idx(g.n);
    std::vector<double> x(g.n);
    for (std::size_t i = 0; i < f.size(); ++i) {
        multi_index(g, i, idx.data());
        for (int a = 0; a < g.n; ++a) x[a] = coord(g, idx[a]);
        f.v[i] = fn(x);
    }
    return f;
}

Field sample_radial(const GridSpec& g, const std::function<cplx(double)>& fn) {
    Field f(g);
    const auto& r = radius_table(g);
    for (std::size_t i = 0; i < f.size(); ++i) f.v[i] = fn(r[i]);
    return f;
}

Field plane_wave(const GridSpec& g, std::span<const int> k) {
    if (static_cast<int>(k.size()) != g.n) throw std::invalid_argument("plane_wave: wrong index length");
    return sample(g, [&](std::span<const double> x) {
        double ph = 0.0;
        for (int a = 0; a < g.n; ++a) ph += g.dxi() * k[a] * x[a];
        return std::polar(1.0, ph);
    });
}

Field shift_cells(const Field& f, int axis, int cells) {
    if (f.rep != Rep::physical) throw std::invalid_argument("shift_cells: field must be physical");
    Field out(f.grid);
    std::vector<int> idx(f.grid.n);
    for (std::size_t i = 0; i < f.size(); ++i) {
        multi_index(f.grid, i, idx.data());
        idx[axis] += cells;
        out.v[linear_index(f.grid, idx.data())] = f.v[i];
    }
    return out;
}

double boundary_ratio(const Field& f) {
    if (f.rep != Rep::physical) throw std::invalid_argument("boundary_ratio: field must be physical");
    double mx = par::max_abs(f.v), mb = 0.0;
    if (mx == 0.0) return 0.0;
    std::vector<int> idx(f.grid.n);
    for (std::size_t i = 0; i < f.size(); ++i) {
        multi_index(f.grid, i, idx.data());
        bool edge = false;
        for (int a = 0; a < f.grid.n; ++a) edge = edge || idx[a] == 0;
        if (edge) mb = std::max(mb, std::abs(f.v[i]));
    }
    return mb / mx;
}

void write_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    std::int32_t n = f.grid.n, N = f.grid.N, tag = static_cast<std::int32_t>(f.rep);
    double L = f.grid.L;
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&N), sizeof N);
    os.write(reinterpret_cast<const char*>(&L), sizeof L);
    os.write(reinterpret_cast<const char*>(&tag), sizeof tag);
    // std::complex<double> is laid out as interleaved (re, im)
    os.write(reinterpret_cast<const char*>(f.v.data()), f.v.size() * sizeof(cplx));
    if (!os) throw std::runtime_error("write failed: " + path);
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::int32_t n = 0, N = 0, tag = 0;
    double L = 0.0;
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&N), sizeof N);
    is.read(reinterpret_cast<char*>(&L), sizeof L);
    is.read(reinterpret_cast<char*>(&tag), sizeof tag);
    if (!is || (tag != 0 && tag != 1)) throw std::runtime_error("bad field header: " + path);
    GridSpec g{n, N, L};
    g.validate();
    Field f(g, static_cast<Rep>(tag));
    is.read(reinterpret_cast<char*>(f.v.data()), f.v.size() * sizeof(cplx));
    if (!is) throw std::runtime_error("truncated field payload: " + path);
    return f;
}

}  // namespace ksl
