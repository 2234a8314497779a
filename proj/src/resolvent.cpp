#include "ksl/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ksl/kernels.hpp"

namespace ksl {

void ResolventQuery::validate() const {
    if (m < 1) throw std::invalid_argument("resolvent: m must be >= 1");
    if (n % 2 == 0) throw std::invalid_argument("resolvent: even dimensions are not supported");
    if (n != 3 && n != 5) throw std::invalid_argument("resolvent: only n = 3 and n = 5 are implemented");
    const bool on_axis = z.imag() == 0.0 && z.real() >= 0.0;
    if (side != Side::none) {
        if (z.imag() != 0.0 || z.real() < 0.0)
            throw std::invalid_argument("resolvent: boundary side needs real z >= 0");
    } else if (on_axis) {
        throw std::invalid_argument("resolvent: z on [0, inf) needs a boundary side");
    }
}

double ResolventQuery::arg() const {
    if (side == Side::plus) return 0.0;
    if (side == Side::minus) return 2.0 * pi;
    double a = std::arg(z);
    return a < 0.0 ? a + 2.0 * pi : a;
}

std::vector<cplx> resolvent_roots(const ResolventQuery& q) {
    const double a = q.arg(), rad = std::pow(std::abs(q.z), 1.0 / q.m);
    std::vector<cplx> out(q.m);
    for (int l = 0; l < q.m; ++l) out[l] = std::polar(rad, (a + 2.0 * pi * l) / q.m);
    return out;
}

std::vector<cplx> root_wavenumbers(const ResolventQuery& q) {
    // phases (a + 2 pi l)/m lie in [0, 2 pi], so halving them keeps Im s >= 0
    const double a = q.arg(), rad = std::pow(std::abs(q.z), 0.5 / q.m);
    std::vector<cplx> out(q.m);
    for (int l = 0; l < q.m; ++l) out[l] = std::polar(rad, (a + 2.0 * pi * l) / (2.0 * q.m));
    return out;
}

cplx laplace_kernel_k(int n, cplx s, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("laplace_kernel: r must be positive");
    if (n % 2 == 0) throw std::invalid_argument("laplace_kernel: even n");
    const cplx I(0.0, 1.0);
    const cplx e = std::exp(I * s * r);
    switch (n) {
        case 3:
            return e / (4.0 * pi * r);
        case 5:
            // G5 = -(2 pi r)^{-1} d/dr G3
            return e * (1.0 - I * s * r) / (8.0 * pi * pi * r * r * r);
        default:
            throw std::invalid_argument("laplace_kernel: only n = 3 and n = 5 are implemented");
    }
}

cplx laplace_kernel(int n, cplx zeta, double r) {
    cplx s = std::sqrt(zeta);
    if (s.imag() < 0.0) s = -s;
    return laplace_kernel_k(n, s, r);
}

cplx polyharm_kernel(const ResolventQuery& q, double r) {
    q.validate();
    if (q.z == cplx(0.0, 0.0)) throw std::invalid_argument("polyharm_kernel: z = 0, use riesz_kernel");
    auto zl = resolvent_roots(q);
    auto sl = root_wavenumbers(q);
    cplx acc = 0.0;
    for (int l = 0; l < q.m; ++l) acc += zl[l] * laplace_kernel_k(q.n, sl[l], r);
    return acc / (static_cast<double>(q.m) * q.z);
}

double riesz_constant(int m, int n) {
    if (n <= 2 * m) throw std::invalid_argument("riesz_kernel: needs n > 2m");
    return std::tgamma(n / 2.0 - m) / (std::pow(4.0, m) * std::pow(pi, n / 2.0) * std::tgamma(m));
}

double riesz_kernel(int m, int n, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("riesz_kernel: r must be positive");
    return riesz_constant(m, n) * std::pow(r, 2.0 * m - n);
}

cplx resolvent_symbol(double xi2, const ResolventQuery& q) {
    if (q.side != Side::none) throw std::invalid_argument("resolvent_symbol: boundary values have no pointwise symbol");
    return 1.0 / (std::pow(xi2, q.m) - q.z);
}

cplx partial_fraction_symbol(double xi2, const ResolventQuery& q) {
    if (q.z == cplx(0.0, 0.0)) throw std::invalid_argument("partial fractions need z != 0");
    cplx acc = 0.0;
    for (const auto& zl : resolvent_roots(q)) acc += zl / (xi2 - zl);
    return acc / (static_cast<double>(q.m) * q.z);
}

std::vector<cplx> resolvent_multiplier(const GridSpec& g, const ResolventQuery& q) {
    if (q.side != Side::none) throw std::invalid_argument("resolvent_multiplier: needs z off [0, inf)");
    const auto& xi2 = xi2_table(g);
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        cplx d = std::pow(xi2[i], q.m) - q.z;
        if (d == cplx(0.0, 0.0)) throw std::domain_error("resolvent_multiplier: z hits a lattice eigenvalue");
        s[i] = 1.0 / d;
    }
    return s;
}

Field apply_free_resolvent(const Field& f, const ResolventQuery& q) {
    return apply_symbol(f, resolvent_multiplier(f.grid, q));
}

cplx shell_integral(const GridSpec& g, const std::vector<cplx>& F, double rho) {
    const double dk = g.dxi();
    const double lo = std::max(0.0, rho - 0.5 * dk), hi = rho + 0.5 * dk;
    if (hi > g.nyquist()) throw std::domain_error("shell radius exceeds the lattice Nyquist radius");
    const auto& xi2 = xi2_table(g);
    cplx sum = 0.0;
    const double lo2 = lo * lo, hi2 = hi * hi;
    for (std::size_t i = 0; i < F.size(); ++i)
        if (xi2[i] >= lo2 && xi2[i] < hi2) sum += F[i];
    const double binvol = sphere_area(g.n) / g.n * (std::pow(hi, g.n) - std::pow(lo, g.n));
    const double area = sphere_area(g.n) * std::pow(rho, g.n - 1);
    return sum * g.fcell() * area / binvol;
}

namespace {

std::vector<cplx> cross_spectrum(const Field& f, const Field& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("pairing: grids differ");
    Field fh = f.rep == Rep::physical ? forward_transform(f) : f;
    Field gh = g.rep == Rep::physical ? forward_transform(g) : g;
    std::vector<cplx> F(fh.size());
    for (std::size_t i = 0; i < F.size(); ++i) F[i] = fh.v[i] * std::conj(gh.v[i]);
    return F;
}

}  // namespace

cplx boundary_value_pairing(const Field& f, const Field& g, double lambda, Side side, int m) {
    if (!(lambda > 0.0)) throw std::invalid_argument("boundary_value_pairing: lambda must be positive");
    if (side == Side::none) throw std::invalid_argument("boundary_value_pairing: side must be + or -");
    const GridSpec& G = f.grid;
    const double rho = std::pow(lambda, 0.5 / m);
    if (rho + 0.5 * G.dxi() > G.nyquist()) throw std::domain_error("shell radius exceeds the lattice Nyquist radius");
    auto F = cross_spectrum(f, g);
    const auto& xi2 = xi2_table(G);

    // principal value: symmetric exclusion window in u = |xi|^{2m} - lambda
    const double grad = 2.0 * m * std::pow(rho, 2.0 * m - 1.0);
    const double w = 3.0 * grad * G.dxi();
    if (w >= lambda) throw std::domain_error("boundary_value_pairing: lattice too coarse for the principal-value window");
    cplx pv = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        double u = std::pow(xi2[i], m) - lambda;
        if (std::abs(u) >= w) pv += F[i] / u;
    }
    pv *= G.fcell();

    // window: PV int_{-w}^{w} S(r(u)) r'(u) du / u ~ 2 (Gs(w/2) - Gs(-w/2))
    auto Gs = [&](double u) {
        double r = std::pow(lambda + u, 0.5 / m);
        return shell_integral(G, F, r) / (2.0 * m * std::pow(r, 2.0 * m - 1.0));
    };
    const cplx corr = 2.0 * (Gs(0.5 * w) - Gs(-0.5 * w));

    const cplx I(0.0, 1.0);
    const double sgn = side == Side::plus ? 1.0 : -1.0;
    cplx surface = sgn * I * pi / (2.0 * m) * std::pow(lambda, (1.0 - 2.0 * m) / (2.0 * m)) * shell_integral(G, F, rho);
    return pv + corr + surface;
}

double spectral_density(const Field& f, double lambda, int m) {
    if (!(lambda > 0.0)) throw std::invalid_argument("spectral_density: lambda must be positive");
    auto F = cross_spectrum(f, f);
    const double rho = std::pow(lambda, 0.5 / m);
    return std::pow(lambda, (1.0 - 2.0 * m) / (2.0 * m)) / (2.0 * m) * shell_integral(f.grid, F, rho).real();
}

std::vector<cplx> damped_curve(const std::vector<double>& lambdas, double eps, int m) {
    std::vector<cplx> z;
    for (double l : lambdas) z.emplace_back(l, eps * 2.0 * m * std::pow(l, (2.0 * m - 1.0) / (2.0 * m)));
    return z;
}

DecayProbeResult high_energy_decay_probe(const GridSpec& g, double s, int m, const std::vector<cplx>& zs,
                                         const PowerOptions& opt) {
    if (!(s > 0.5)) throw std::invalid_argument("high_energy_decay_probe: weight exponent must exceed 1/2");
    if (zs.size() < 2) throw std::invalid_argument("high_energy_decay_probe: need at least two z samples");
    double zmin = 1e300, zmax = 0.0;
    for (auto z : zs) {
        zmin = std::min(zmin, std::abs(z));
        zmax = std::max(zmax, std::abs(z));
    }
    DecayProbeResult res;
    res.decades = std::log10(zmax / zmin);
    if (res.decades < 1.5) throw std::invalid_argument("high_energy_decay_probe: |z| must span >= 1.5 decades");

    const auto W = bracket_weight(g, -s);
    std::vector<double> lx, ly;
    Field warm;
    for (auto z : zs) {
        ResolventQuery q{z, Side::none, m, g.n};
        q.validate();
        ResolventQuery qc{std::conj(z), Side::none, m, g.n};
        const auto sym = resolvent_multiplier(g, q);
        const auto symc = resolvent_multiplier(g, qc);
        FieldOp A = [&](const Field& x) { return pointwise(apply_symbol(pointwise(x, W), sym), W); };
        FieldOp As = [&](const Field& x) { return pointwise(apply_symbol(pointwise(x, W), symc), W); };
        // neighbouring z share most of the top singular vector
        auto pr = power_norm(g, A, As, opt, warm.size() ? &warm : nullptr);
        warm = pr.vector;
        res.z.push_back(z);
        res.norm.push_back(pr.norm);
        res.iterations.push_back(pr.iterations);
        res.residual.push_back(pr.residual);
        lx.push_back(std::log(std::abs(z)));
        ly.push_back(std::log(pr.norm));
    }
    res.fit = fit_line(lx, ly);
    return res;
}

}  // namespace ksl
