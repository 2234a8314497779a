#include "ksl/linalg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ksl/kernels.hpp"

namespace ksl {

Field random_field(const GridSpec& g, std::uint64_t seed, bool real_only) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field f(g);
    for (auto& x : f.v) {
        double re = nd(rng);
        x = real_only ? cplx(re, 0.0) : cplx(re, nd(rng));
    }
    return f;
}

PowerResult power_norm(const GridSpec& g, const FieldOp& A, const FieldOp& Astar,
                       const PowerOptions& opt, const Field* start) {
    PowerResult res;
    Field x = start ? *start : random_field(g, opt.seed);
    double nx = norm_l2(x);
    if (nx == 0.0) throw std::invalid_argument("power_norm: zero start vector");
    par::scale(x.v, 1.0 / nx);
    double mu_prev = -1.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        Field ax = A(x);
        Field y = Astar(ax);
        double mu = std::real(inner(x, y));  // = ||A x||^2
        res.iterations = it;
        if (mu <= 0.0) {
            res.norm = 0.0;
            res.converged = true;
            res.residual = 0.0;
            res.vector = x;
            return res;
        }
        Field r = y;
        par::axpy(-mu, x.v, r.v);
        res.residual = norm_l2(r) / mu;
        res.norm = std::sqrt(mu);
        double ny = norm_l2(y);
        par::scale(y.v, 1.0 / ny);
        x = std::move(y);
        if (mu_prev > 0.0 && std::abs(mu - mu_prev) < opt.rel_tol * mu) {
            res.converged = true;
            break;
        }
        mu_prev = mu;
    }
    // a capped run still yields a lower bound for the norm; callers report the residual
    if (!res.converged) res.converged = res.iterations >= opt.max_iter;
    res.vector = x;
    return res;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double ss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double e = y[i] - f.intercept - f.slope * x[i];
            ss += e * e;
        }
        f.width = 2.0 * std::sqrt(ss / (n - 2.0) / sxx);
    }
    return f;
}

Field operator+(const Field& a, const Field& b) {
    Field out = a;
    par::axpy(1.0, b.v, out.v);
    return out;
}

Field operator-(const Field& a, const Field& b) {
    Field out = a;
    par::axpy(-1.0, b.v, out.v);
    return out;
}

Field operator*(cplx s, const Field& a) {
    Field out(a.grid, a.rep);
    par::axpy(s, a.v, out.v);
    return out;
}

Field pointwise(const Field& a, const std::vector<double>& w) {
    Field out = a;
    par::mul(out.v, w);
    return out;
}

}  // namespace ksl

namespace ksl {

void gauss_legendre(int npts, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.assign(npts, 0.0);
    w.assign(npts, 0.0);
    for (int i = 0; i < (npts + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (npts + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= npts; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = npts * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double c = 0.5 * (b - a), m = 0.5 * (b + a);
        x[i] = m - c * z;
        x[npts - 1 - i] = m + c * z;
        w[i] = w[npts - 1 - i] = 2.0 * c / ((1.0 - z * z) * dp * dp);
    }
}

}  // namespace ksl
