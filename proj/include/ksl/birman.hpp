// Birman-Schwinger operator M(z) = I + w R0(z) v on the support of V.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ksl/potential.hpp"
#include "ksl/resolvent.hpp"
#include "ksl/spectral.hpp"

namespace ksl {

// lattice: periodic grid resolvent (agrees with the discrete H exactly)
// kernel:  closed-form R^n kernel sampled on the support, self cell integrated
enum class Assembly { lattice, kernel };

struct BSMatrix {
    ResolventQuery q;
    Assembly mode = Assembly::lattice;
    std::vector<std::size_t> support;
    Eigen::MatrixXcd M;
};

BSMatrix assemble_M(const Potential& p, const ResolventQuery& q, Assembly mode = Assembly::lattice,
                    std::size_t cap = 4000);

Eigen::VectorXd singular_values(const BSMatrix& M);
double sigma_min(const BSMatrix& M);
// ||M^{-1}|| = 1 / sigma_min
double inverse_norm(const BSMatrix& M);

struct NeumannResult {
    double r = 0.0;
    bool found = false;
    double resolved = 0.0;  // largest radius the grid resolves; larger ones are not sampled
    std::vector<double> radii;
    std::vector<double> max_norm;  // largest ||w R0 v|| on each circle
};

NeumannResult neumann_threshold(const Potential& p, int m, double r_lo, double r_hi, int n_radii = 24,
                                int n_angles = 16, std::size_t cap = 4000);

struct SweepRow {
    double lambda = 0.0;
    double theta = 0.0;
    int side = 1;
    double norm = 0.0;
    double sigma_min = 0.0;
    int iterations = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<double> thetas;
    std::vector<double> sup_by_theta;
    double sup = 0.0;
    double plateau = 0.0;  // |sup(theta_min) - sup(theta_next)| / sup(theta_next)
    std::vector<double> excluded;
    double nu = 0.0;
};

// lambda points within nu of an entry of `eigen` are dropped
SweepResult inv_norm_sweep(const Potential& p, int m, const std::vector<double>& lambdas,
                           const std::vector<double>& thetas, double nu, const std::vector<double>& eigen,
                           std::size_t cap = 4000);

struct ZeroResonance {
    std::vector<double> sigma_min;  // one entry per ladder grid
    bool suspect = false;
};

double zero_sigma_min(const Potential& p, int m, std::size_t cap = 4000);
ZeroResonance detect_zero_resonance(const std::function<Potential(const GridSpec&)>& build,
                                    const std::vector<GridSpec>& ladder, int m, double tau_res = 1e-2,
                                    std::size_t cap = 4000);

struct PointEigen {
    double E = 0.0;
    double sigma_min = 0.0;
    int multiplicity = 1;
};

struct PointSpectrumOptions {
    int scan = 200;
    double tol = 1e-6;
    double accept = 1e-3;  // sigma_min at a located root
    std::size_t cap = 4000;
};

std::vector<PointEigen> detect_point_spectrum(const Potential& p, int m, double e_lo, double e_hi,
                                              const PointSpectrumOptions& opt = {});

// R(z) = R0 - R0 w M^{-1} v R0 with a dense LU of M on the support
class PerturbedResolvent {
public:
    PerturbedResolvent(const Potential& p, const ResolventQuery& q, std::size_t cap = 4000);
    Field apply(const Field& f) const;
    double sigma_min() const { return smin_; }

private:
    const Potential* pot_;
    ResolventQuery q_;
    std::vector<cplx> sym_;
    std::vector<std::size_t> support_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    double smin_ = 1.0;
};

Field perturbed_resolvent_apply(const Potential& p, const ResolventQuery& q, const Field& f);

struct SupersmoothOptions {
    PowerOptions power;
    std::size_t cap = 4000;
};

struct SupersmoothResult {
    std::vector<SweepRow> rows;
    std::vector<double> thetas;
    std::vector<double> sup_by_theta;
    double sup = 0.0;
    double plateau = 0.0;
    bool projected = false;
    std::string weight;
};

// sup of ||W |D|^gamma [P] R(z) [P] |D|^gamma W|| over lambda +- i theta;
// gamma = m - 1/2 selects <x>^{-1/2-eps}, otherwise |x|^{-m+gamma}
SupersmoothResult supersmooth_sweep(const Hamiltonian& h, double gamma, double eps, const std::vector<double>& lambdas,
                                    const std::vector<double>& thetas, bool projected,
                                    const SupersmoothOptions& opt = {});

}  // namespace ksl
