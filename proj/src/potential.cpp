#include "ksl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksl {

Potential Potential::from_values(const GridSpec& g, std::vector<double> values, double decay_s, std::string family) {
    if (values.size() != g.size()) throw std::invalid_argument("potential: size mismatch");
    Potential p;
    p.grid = g;
    p.family = std::move(family);
    p.V = std::move(values);
    p.v.resize(p.V.size());
    p.w.resize(p.V.size());
    double mx = 0.0;
    for (std::size_t i = 0; i < p.V.size(); ++i) {
        if (!std::isfinite(p.V[i])) throw std::invalid_argument("potential: non-finite value");
        p.v[i] = std::sqrt(std::abs(p.V[i]));
        p.w[i] = p.V[i] < 0.0 ? -p.v[i] : p.v[i];
        mx = std::max(mx, std::abs(p.V[i]));
    }
    const double tau = 1e-12 * mx;
    if (mx > 0.0)
        for (std::size_t i = 0; i < p.V.size(); ++i)
            if (std::abs(p.V[i]) > tau) p.support.push_back(i);
    p.decay_s = decay_s;
    const auto& r = radius_table(g);
    for (std::size_t i = 0; i < p.V.size(); ++i)
        p.decay_C = std::max(p.decay_C, std::abs(p.V[i]) * std::pow(1.0 + r[i] * r[i], 0.5 * decay_s));
    return p;
}

double Potential::max_abs() const {
    double m = 0.0;
    for (double x : V) m = std::max(m, std::abs(x));
    return m;
}

double Potential::min() const { return V.empty() ? 0.0 : *std::min_element(V.begin(), V.end()); }
double Potential::max() const { return V.empty() ? 0.0 : *std::max_element(V.begin(), V.end()); }

Potential Potential::scaled(double g) const {
    std::vector<double> vals = V;
    for (auto& x : vals) x *= g;
    Potential p = from_values(grid, std::move(vals), decay_s, family);
    p.xgradV = xgradV;
    for (auto& x : p.xgradV) x *= g;
    return p;
}

Potential zero_potential(const GridSpec& g) {
    Potential p = Potential::from_values(g, std::vector<double>(g.size(), 0.0), 0.0, "zero");
    p.xgradV.assign(g.size(), 0.0);
    return p;
}

namespace {
// x . grad exp(-|x|^2 / w^2) = -2 |x|^2 / w^2 exp(-|x|^2 / w^2)
Potential gaussian(const GridSpec& g, double amplitude, double width, const char* family) {
    const auto& r = radius_table(g);
    std::vector<double> vals(g.size()), xg(g.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double q = r[i] * r[i] / (width * width);
        vals[i] = amplitude * std::exp(-q);
        xg[i] = -2.0 * q * vals[i];
    }
    // Gaussian decay beats every power; record a representative s
    Potential p = Potential::from_values(g, std::move(vals), 12.0, family);
    p.xgradV = std::move(xg);
    return p;
}
}  // namespace

Potential gaussian_well(const GridSpec& g, double depth, double width, double coupling) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_well: width must be positive");
    return gaussian(g, -coupling * depth, width, "gaussian-well");
}

Potential gaussian_bump(const GridSpec& g, double height, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be positive");
    return gaussian(g, height, width, "gaussian-bump");
}

Potential polynomial_decay(const GridSpec& g, double c, double s) {
    const auto& r = radius_table(g);
    std::vector<double> vals(g.size()), xg(g.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double r2 = r[i] * r[i];
        vals[i] = c * std::pow(1.0 + r2, -0.5 * s);
        xg[i] = -s * r2 / (1.0 + r2) * vals[i];
    }
    Potential p = Potential::from_values(g, std::move(vals), s, "polynomial-decay");
    p.xgradV = std::move(xg);
    return p;
}

Potential potential_from_field(const Field& f, double decay_s) {
    if (f.rep != Rep::physical) throw std::invalid_argument("potential file must hold a physical field");
    std::vector<double> vals(f.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (std::abs(f.v[i].imag()) > 1e-12 * (1.0 + std::abs(f.v[i].real())))
            throw std::invalid_argument("potential file holds a complex field");
        vals[i] = f.v[i].real();
    }
    return Potential::from_values(f.grid, std::move(vals), decay_s, "file");
}

double clr_integral(const Potential& p, int m) {
    const double e = static_cast<double>(p.grid.n) / (2.0 * m);
    double s = 0.0;
    for (double x : p.V) s += std::pow(std::abs(x), e);
    return s * p.grid.cell();
}

}  // namespace ksl
