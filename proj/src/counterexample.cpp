#include "ksl/counterexample.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "ksl/kernels.hpp"
#include "ksl/spectral.hpp"

namespace ksl {

namespace {

// truncated Taylor series in t about a point
constexpr int kJet = 9;
struct Jet {
    std::array<double, kJet> c{};
    int d = 0;
};

Jet constant(double a, int d) {
    Jet j;
    j.d = d;
    j.c[0] = a;
    return j;
}

Jet operator+(Jet a, const Jet& b) {
    for (int k = 0; k <= a.d; ++k) a.c[k] += b.c[k];
    return a;
}
Jet operator-(Jet a, const Jet& b) {
    for (int k = 0; k <= a.d; ++k) a.c[k] -= b.c[k];
    return a;
}
Jet operator*(double s, Jet a) {
    for (int k = 0; k <= a.d; ++k) a.c[k] *= s;
    return a;
}
Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.d = a.d;
    for (int k = 0; k <= a.d; ++k)
        for (int j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
    return r;
}
Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    q.d = a.d;
    for (int k = 0; k <= a.d; ++k) {
        double s = a.c[k];
        for (int j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
        q.c[k] = s / b.c[0];
    }
    return q;
}
Jet exp(const Jet& a) {
    Jet e;
    e.d = a.d;
    e.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= a.d; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a.c[j] * e.c[k - j];
        e.c[k] = s / k;
    }
    return e;
}
Jet sqrt(const Jet& a) {
    Jet s;
    s.d = a.d;
    s.c[0] = std::sqrt(a.c[0]);
    for (int k = 1; k <= a.d; ++k) {
        double acc = a.c[k];
        for (int j = 1; j < k; ++j) acc -= s.c[j] * s.c[k - j];
        s.c[k] = acc / (2.0 * s.c[0]);
    }
    return s;
}
Jet deriv(const Jet& a) {
    Jet r;
    r.d = a.d;
    for (int k = 0; k < a.d; ++k) r.c[k] = (k + 1) * a.c[k + 1];
    return r;
}

// G_n(s) = e^{-s} p(s) / (c_n s^{n-2}); p from G_{n+2} = -G_n' / (2 pi r)
struct BesselPoly {
    std::vector<double> p{1.0};
    double c = 4.0 * pi;
};

BesselPoly bessel_poly(int n) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("bessel_kernel: odd n >= 3 required");
    BesselPoly b;
    for (int k = 0; 2 * k + 3 < n; ++k) {
        // new p = (2k+1) p + r (p - p')
        std::vector<double> q(b.p.size() + 1, 0.0);
        for (std::size_t i = 0; i < b.p.size(); ++i) {
            q[i] += (2 * k + 1) * b.p[i];
            q[i + 1] += b.p[i];
            if (i > 0) q[i] -= i * b.p[i];
        }
        b.p = q;
        b.c *= 2.0 * pi;
    }
    return b;
}

Jet bessel_jet(const BesselPoly& b, int n, const Jet& s) {
    Jet p = constant(b.p.back(), s.d);
    for (int i = static_cast<int>(b.p.size()) - 2; i >= 0; --i) p = p * s + constant(b.p[i], s.d);
    Jet den = constant(b.c, s.d);
    for (int k = 0; k < n - 2; ++k) den = den * s;
    return exp(-1.0 * s) * p / den;
}

struct Cap {
    int n, m, K;
    double a, delta;
    BesselPoly bp;

    Jet phi(const Jet& x) const {
        Jet s2 = x * x;
        Jet u = constant(1.0, x.d) - (1.0 / (delta * delta)) * s2;
        Jet chi = constant(1.0, x.d);
        for (int k = 0; k < K; ++k) chi = chi * u;
        return bessel_jet(bp, n, sqrt(s2 + (a * a) * chi));
    }

    // phi_c, Delta phi_c and (-Delta)^m phi_c at radius r < delta
    std::array<double, 3> eval(double r) const {
        const int d = 2 * m;
        Jet x = constant(r, d);
        x.c[1] = 1.0;
        Jet f = phi(x);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        if (r == 0.0) {
            // even Taylor series: Delta r^{2j} = 2j (2j + n - 2) r^{2j-2}
            double lap = f.c[d];
            for (int j = 1; j <= m; ++j) lap *= 2.0 * j * (2.0 * j + n - 2.0);
            return {f.c[0], 2.0 * n * f.c[2], sign * lap};
        }
        Jet g = f;
        double lap1 = 0.0;
        for (int k = 0; k < m; ++k) {
            Jet g1 = deriv(g);
            g = deriv(g1) + (n - 1.0) * (g1 / x);
            if (k == 0) lap1 = g.c[0];
        }
        return {f.c[0], lap1, sign * g.c[0]};
    }
};

}  // namespace

namespace {
double bessel_eval(const BesselPoly& b, int n, double r) {
    double p = 0.0;
    for (int i = static_cast<int>(b.p.size()) - 1; i >= 0; --i) p = p * r + b.p[i];
    return std::exp(-r) * p / (b.c * std::pow(r, n - 2));
}
}  // namespace

double bessel_kernel(int n, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("bessel_kernel: r must be positive");
    return bessel_eval(bessel_poly(n), n, r);
}

EmbeddedPair build_embedded_pair(const GridSpec& g, int m, double delta, const EmbeddedOptions& opt) {
    g.validate();
    if (m <= 0 || m % 2 != 0) throw std::invalid_argument("build_embedded_pair: m must be even");
    if (g.n % 2 == 0) throw std::invalid_argument("build_embedded_pair: n must be odd");
    if (delta < 4.0 * g.h()) throw std::invalid_argument("build_embedded_pair: delta must be at least 4h");
    if (delta >= g.L) throw std::invalid_argument("build_embedded_pair: B(0, delta) must fit in the box");
    if (!(opt.cap > 0.0)) throw std::invalid_argument("build_embedded_pair: cap must be positive");
    const int K = opt.bump > 0 ? opt.bump : 2 * m + 4;
    if (2 * m >= kJet) throw std::invalid_argument("build_embedded_pair: m too large for the jet order");
    Cap cap{g.n, m, K, opt.cap, delta, bessel_poly(g.n)};

    // rho = (1 - Delta) phi_c is supported in B(0, delta); phi solves (1 - Delta) phi = rho
    // on the periodic grid, so outside the ball phi is the periodised kernel
    const auto& R = radius_table(g);
    const std::size_t size = g.size();
    Field rho(g);
    std::vector<double> num(size, 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(size); ++i) {
        if (R[i] >= delta) continue;
        auto [pc, lap, hp] = cap.eval(R[i]);
        rho.v[i] = pc - lap;
        num[i] = pc - hp;
    }
    Field phi = apply_symbol(rho, radial_symbol_real(g, [](double k) { return 1.0 / (1.0 + k * k); }));
    std::vector<double> V(size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
        phi.v[i] = phi.v[i].real();
        if (!(phi.v[i].real() > 0.0)) throw std::domain_error("build_embedded_pair: blend produced a nonpositive phi");
        if (R[i] < delta) V[i] = num[i] / phi.v[i].real();
    }

    EmbeddedPair pair;
    pair.V = Potential::from_values(g, std::move(V), 0.0, "embedded-counterexample");
    pair.phi = std::move(phi);
    pair.delta = delta;
    pair.m = m;
    pair.n = g.n;
    pair.opt = opt;
    pair.check = verify_embedded(pair);
    return pair;
}

EmbeddedResidual verify_embedded(const EmbeddedPair& pair) {
    EmbeddedResidual res;
    const Field& phi = pair.phi;
    const auto& V = pair.V.V;
    Field hp = apply_operator(phi, pair.m, V);
    par::axpy(-1.0, phi.v, hp.v);
    res.residual = norm_l2(hp) / norm_l2(phi);
    res.max_V = pair.V.max_abs();
    const auto& R = radius_table(phi.grid);
    const double cut = pair.delta + 2.0 * phi.grid.h();
    double outside = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < V.size(); ++i) {
        if (R[i] > cut) outside = std::max(outside, std::abs(V[i]));
        mn = std::min(mn, phi.v[i].real());
    }
    res.leak = res.max_V > 0.0 ? outside / res.max_V : 0.0;
    res.min_phi = mn;
    return res;
}

void save_embedded(const EmbeddedPair& pair, const std::string& dir) {
    std::filesystem::create_directories(dir);
    Field vf(pair.V.grid);
    for (std::size_t i = 0; i < vf.size(); ++i) vf.v[i] = pair.V.V[i];
    write_field(dir + "/V.bin", vf);
    write_field(dir + "/phi.bin", pair.phi);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["m"] = pair.m;
    j["n"] = pair.n;
    j["delta"] = pair.delta;
    j["grid"] = {{"n", pair.phi.grid.n}, {"N", pair.phi.grid.N}, {"L", pair.phi.grid.L}};
    j["cap"] = pair.opt.cap;
    j["bump"] = pair.opt.bump > 0 ? pair.opt.bump : 2 * pair.m + 4;
    j["residual"] = pair.check.residual;
    j["leak"] = pair.check.leak;
    j["min_phi"] = pair.check.min_phi;
    j["max_V"] = pair.check.max_V;
    std::ofstream(dir + "/manifest.json") << j.dump(2) << "\n";
}

}  // namespace ksl
