#include "ksl/radial.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ksl/grid.hpp"
#include "ksl/linalg.hpp"

namespace ksl {

double reduced_sph_bessel(int n, double x) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("reduced_sph_bessel: odd n >= 3 required");
    const int l = (n - 3) / 2;
    x = std::abs(x);
    if (x < 1e-2) {
        // x^{-l} j_l(x) = sum_k (-x^2/2)^k / (k! (2l+2k+1)!!)
        double dfact = 1.0;
        for (int j = 1; j <= 2 * l + 1; j += 2) dfact *= j;
        double term = 1.0 / dfact, sum = term;
        for (int k = 1; k < 6; ++k) {
            term *= -0.5 * x * x / (k * (2.0 * l + 2.0 * k + 1.0));
            sum += term;
        }
        return sum;
    }
    return std::sph_bessel(l, x) / std::pow(x, l);
}

RadialGrid::RadialGrid(int n, double R, int Nr, double K, int Nk) : n_(n) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("RadialGrid: odd n >= 3 required");
    if (!(R > 0.0) || !(K > 0.0) || Nr < 8 || Nk < 8) throw std::invalid_argument("RadialGrid: bad extents");
    const double dr = R / (Nr - 1), dk = K / (Nk - 1);
    r_.resize(Nr);
    k_.resize(Nk);
    wr_.resize(Nr);
    wk_.resize(Nk);
    for (int i = 0; i < Nr; ++i) {
        r_[i] = i * dr;
        wr_[i] = (i == 0 || i == Nr - 1 ? 0.5 : 1.0) * dr * std::pow(r_[i], n - 1);
    }
    for (int i = 0; i < Nk; ++i) {
        k_[i] = i * dk;
        wk_[i] = (i == 0 || i == Nk - 1 ? 0.5 : 1.0) * dk * std::pow(k_[i], n - 1);
    }
    T_.resize(Nk, Nr);
    const double c = std::sqrt(2.0 / pi);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < Nk; ++i)
        for (int j = 0; j < Nr; ++j) T_(i, j) = c * reduced_sph_bessel(n, k_[i] * r_[j]);
}

Eigen::VectorXcd RadialGrid::forward(const Eigen::VectorXcd& f) const {
    if (f.size() != static_cast<Eigen::Index>(r_.size())) throw std::invalid_argument("RadialGrid: size mismatch");
    Eigen::VectorXcd out(T_.rows());
    out.real() = T_ * wr_.cwiseProduct(f.real());
    out.imag() = T_ * wr_.cwiseProduct(f.imag());
    return out;
}

Eigen::VectorXcd RadialGrid::inverse(const Eigen::VectorXcd& F) const {
    if (F.size() != static_cast<Eigen::Index>(k_.size())) throw std::invalid_argument("RadialGrid: size mismatch");
    Eigen::VectorXd re = T_.transpose() * wk_.cwiseProduct(F.real());
    Eigen::VectorXd im = T_.transpose() * wk_.cwiseProduct(F.imag());
    Eigen::VectorXcd out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

namespace {
double lp(const Eigen::VectorXcd& u, const Eigen::VectorXd& w, int n, double p) {
    if (std::isinf(p)) return u.cwiseAbs().maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), p);
    return std::pow(sphere_area(n) * s, 1.0 / p);
}
}  // namespace

double RadialGrid::lp_norm_r(const Eigen::VectorXcd& u, double p) const { return lp(u, wr_, n_, p); }
double RadialGrid::lp_norm_k(const Eigen::VectorXcd& U, double p) const { return lp(U, wk_, n_, p); }

cplx wynn_epsilon(const std::vector<cplx>& s) {
    if (s.empty()) throw std::invalid_argument("wynn_epsilon: empty sequence");
    const std::size_t n = s.size();
    std::vector<cplx> prev(n, 0.0), cur = s;
    cplx best = s.back();
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<cplx> next(n - k);
        bool ok = true;
        for (std::size_t i = 0; i + k < n; ++i) {
            cplx d = cur[i + 1] - cur[i];
            if (std::abs(d) < 1e-300) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / d;
        }
        if (!ok) break;
        prev = std::move(cur);
        cur = std::move(next);
        // even columns hold the extrapolants
        if (k % 2 == 0) best = cur.back();
    }
    return best;
}

cplx radial_kernel_quadrature(int n, double r, const std::function<cplx(double)>& sigma, double k_scale) {
    if (!(r > 0.0)) throw std::invalid_argument("radial_kernel_quadrature: r must be positive");
    std::vector<double> x, w;
    gauss_legendre(32, 0.0, 1.0, x, w);
    const double P = pi / r;
    // panels below a few k_scale are subdivided so nearby poles of sigma are resolved
    const int fine = std::max(1, static_cast<int>(std::ceil(8.0 * P / k_scale)));
    auto panel = [&](int i) {
        const int sub = P * i < 4.0 * k_scale ? fine : 1;
        const double dk = P / sub;
        cplx acc = 0.0;
        for (int s = 0; s < sub; ++s)
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double k = P * i + dk * (s + x[j]);
                acc += w[j] * sigma(k) * reduced_sph_bessel(n, k * r) * std::pow(k, n - 1);
            }
        return acc * dk;
    };
    const int direct = std::max(40, static_cast<int>(std::ceil(8.0 * k_scale / P)));
    cplx sum = 0.0;
    for (int i = 0; i < direct; ++i) sum += panel(i);
    std::vector<cplx> partial;
    for (int i = direct; i < direct + 40; ++i) {
        sum += panel(i);
        partial.push_back(sum);
    }
    const double c = std::pow(2.0 * pi, -0.5 * n) * std::sqrt(2.0 / pi);
    return c * wynn_epsilon(partial);
}

}  // namespace ksl
