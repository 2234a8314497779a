// Free resolvent R0(z) = ((-Delta)^m - z)^{-1}: closed-form kernels, lattice
// multipliers, boundary values on [0, inf) and the high-energy decay probe.
#pragma once

#include <vector>

#include "ksl/grid.hpp"
#include "ksl/linalg.hpp"

namespace ksl {

enum class Side : int { none = 0, plus = 1, minus = -1 };

struct ResolventQuery {
    cplx z = {-1.0, 0.0};
    Side side = Side::none;
    int m = 1;
    int n = 3;
    void validate() const;
    // argument of z in (0, 2pi); 0 or 2pi on the upper or lower boundary side
    double arg() const;
};

// z_l = z^{1/m} e^{2 pi i l / m}
std::vector<cplx> resolvent_roots(const ResolventQuery& q);
// s_l with s_l^2 = z_l and Im s_l >= 0
std::vector<cplx> root_wavenumbers(const ResolventQuery& q);

cplx laplace_kernel(int n, cplx zeta, double r);
// same kernel parameterised by its wavenumber s (Im s >= 0)
cplx laplace_kernel_k(int n, cplx s, double r);
cplx polyharm_kernel(const ResolventQuery& q, double r);
double riesz_constant(int m, int n);
double riesz_kernel(int m, int n, double r);

cplx resolvent_symbol(double xi2, const ResolventQuery& q);
cplx partial_fraction_symbol(double xi2, const ResolventQuery& q);

std::vector<cplx> resolvent_multiplier(const GridSpec& g, const ResolventQuery& q);
Field apply_free_resolvent(const Field& f, const ResolventQuery& q);

// shell integral of F over |xi| = rho from the binned lattice values
cplx shell_integral(const GridSpec& g, const std::vector<cplx>& F, double rho);

cplx boundary_value_pairing(const Field& f, const Field& g, double lambda, Side side, int m);
double spectral_density(const Field& f, double lambda, int m);

// z = lambda + i eps 2m lambda^{(2m-1)/(2m)}: keeps the damping length of the
// oscillating root fixed at 1/eps while |z| grows
std::vector<cplx> damped_curve(const std::vector<double>& lambdas, double eps, int m);

struct DecayProbeResult {
    std::vector<cplx> z;
    std::vector<double> norm;
    std::vector<int> iterations;
    std::vector<double> residual;
    LineFit fit;
    double decades = 0.0;
};

DecayProbeResult high_energy_decay_probe(const GridSpec& g, double s, int m, const std::vector<cplx>& zs,
                                         const PowerOptions& opt);

}  // namespace ksl
