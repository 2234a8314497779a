// Radial functions on R^n via a discretised Hankel transform. Used where a
// periodic box cannot reach the required frequency range, e.g. resolvent
// scaling laws over several decades of |z|.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace ksl {

// x^{-l} j_l(x), l = (n - 3) / 2; even and regular at 0
double reduced_sph_bessel(int n, double x);

class RadialGrid {
public:
    // trapezoid nodes r in [0, R], k in [0, K]
    RadialGrid(int n, double R, int Nr, double K, int Nk);

    int n() const { return n_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& k() const { return k_; }

    // f^(k) = sqrt(2/pi) int f(r) (kr)^{-l} j_l(kr) r^{n-1} dr; the same map inverts
    Eigen::VectorXcd forward(const Eigen::VectorXcd& f) const;
    Eigen::VectorXcd inverse(const Eigen::VectorXcd& F) const;

    // (|S^{n-1}| int |u|^p r^{n-1} dr)^{1/p}, sup norm for p = inf
    double lp_norm_r(const Eigen::VectorXcd& u, double p) const;
    double lp_norm_k(const Eigen::VectorXcd& U, double p) const;

private:
    int n_;
    std::vector<double> r_, k_;
    Eigen::VectorXd wr_, wk_;  // trapezoid weight times radius^{n-1}
    Eigen::MatrixXd T_;        // sqrt(2/pi) (k r)^{-l} j_l(k r), rows k
};

// kernel of the radial multiplier sigma at radius r:
// (2 pi)^{-n/2} sqrt(2/pi) int_0^inf sigma(k) (kr)^{-l} j_l(kr) k^{n-1} dk,
// by Gauss-Legendre panels between zeros and Wynn's epsilon on the panel sums
std::complex<double> radial_kernel_quadrature(int n, double r, const std::function<std::complex<double>(double)>& sigma,
                                              double k_scale = 1.0);

// Wynn epsilon extrapolation of a sequence of partial sums
std::complex<double> wynn_epsilon(const std::vector<std::complex<double>>& s);

}  // namespace ksl
