// Measurement suites for the smoothing, Strichartz, uniform Sobolev and
// Stein-Weiss estimates. Every probe returns a ProbeReport.
#pragma once

#include <cstdint>
#include <vector>

#include "ksl/linalg.hpp"
#include "ksl/report.hpp"
#include "ksl/spectral.hpp"

namespace ksl {

struct AdmissiblePair {
    double p = 2.0, q = 2.0, alpha = 1.0;
};

// 1/p = alpha (1/2 - 1/q), 2 <= p, q <= inf, (p, q, alpha) != (2, inf, 1);
// checked in exact rational arithmetic when the inputs are short fractions
bool validate_admissible(double p, double q, double alpha);

struct ProbeOptions {
    std::vector<double> Ts{5.0, 10.0, 20.0};  // truncation ladder, ascending
    double dt = 0.5;                          // time quadrature step
    int samples = 6;
    std::uint64_t seed = 1;
    double plateau_tol = 0.15;                // relative increment on the last doubling of T
    double boundary_tol = 1e-10;              // |psi0| at the box edge over max |psi0|
    bool project = true;                      // apply P_ac before propagating
    bool free_baseline = true;                // repeat with V = 0 when V != 0
    int refine_iters = 0;                     // power steps on the quadratic form
    std::size_t refine_mem = std::size_t(512) << 20;
    PropagateOptions prop;
};

// normalised Gaussian packets with seeded widths and momenta, all decaying
// below boundary_tol at the box edge; sample 0 is the widest real packet
std::vector<Field> packet_samples(const GridSpec& g, int count, std::uint64_t seed, double boundary_tol = 1e-10);

// weight for the smoothing functionals: <x>^{-1/2-eps} at gamma = m - 1/2, else |x|^{-m+gamma}
std::vector<double> smoothing_weight(const GridSpec& g, int m, double gamma, double eps);

ProbeReport kato_smoothing_probe(const Hamiltonian& h, double gamma, double eps, const ProbeOptions& opt = {},
                                 const std::vector<Field>* samples = nullptr);

// F(t, x) = chi(t) g(x) with chi a smooth bump on [0, T_F]
struct InhomOptions {
    ProbeOptions base;
    double t_force = 2.0;
    int substeps = 2;
};

ProbeReport inhomogeneous_smoothing_probe(const Hamiltonian& h, double gamma, double eps,
                                          const InhomOptions& opt = {}, const std::vector<Field>* samples = nullptr);

enum class StrichartzMode { standard, gain };

ProbeReport strichartz_probe(const Hamiltonian& h, const AdmissiblePair& pair, StrichartzMode mode,
                             const ProbeOptions& opt = {}, const std::vector<Field>* samples = nullptr);

struct SobolevOptions {
    double arg = 0.5 * 3.141592653589793;  // ray arg z
    std::vector<double> moduli;             // |z| samples, >= 1.5 decades
    int samples = 8;
    std::uint64_t seed = 3;
    double R = 60.0;                        // radial extent
    double dk = 0.01;
    double tol = 0.05;
};

// radial Hankel engine; the sample family is dilation covariant in k_z = |z|^{1/(2m)}
ProbeReport sobolev_scaling_probe(int m, int n, double alpha, double p, double q, const SobolevOptions& opt);
bool sobolev_window(int m, int n, double alpha, double p, double q, std::string* why = nullptr);

struct SteinWeissOptions {
    std::vector<GridSpec> grids;  // refinement ladder (three grids)
    PowerOptions power{200, 1e-8, 5};
    double stable_tol = 0.05;
};

ProbeReport stein_weiss_probe(double lambda, double alpha, double beta, int n, const SteinWeissOptions& opt);

}  // namespace ksl
