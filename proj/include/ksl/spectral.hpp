// Matrix-free H = (-Delta)^m + V on a periodic grid: eigensolvers, spectral
// checks, the absolutely continuous projector and time propagation.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ksl/grid.hpp"
#include "ksl/potential.hpp"

namespace ksl {

struct EigenSet {
    std::vector<double> values;
    std::vector<Field> vectors;
    std::vector<double> residuals;
    int N0 = 0;
    bool converged = true;
    std::uint64_t fingerprint = 0;
};

class Hamiltonian {
public:
    Hamiltonian(Potential pot, int m);

    const GridSpec& grid() const { return pot_.grid; }
    int m() const { return m_; }
    const Potential& potential() const { return pot_; }
    const std::vector<double>& symbol() const { return sym_; }
    double e_min() const { return emin_; }
    double e_max() const { return emax_; }
    std::uint64_t fingerprint() const { return fp_; }

    Field apply(const Field& f) const;

    // write-once eigenset cache
    const EigenSet* eigenset() const { return eig_.get(); }
    void cache_eigenset(EigenSet e) const;

private:
    Potential pot_;
    int m_;
    std::vector<double> sym_;
    double emin_ = 0.0, emax_ = 0.0;
    std::uint64_t fp_ = 0;
    mutable std::shared_ptr<const EigenSet> eig_;
};

// (-Delta)^m f + V f without the n > 2m restriction of Hamiltonian
Field apply_operator(const Field& f, int m, const std::vector<double>& V);

enum class Which { low, high };

struct LanczosOptions {
    int block = 4;
    int max_dim = 600;
    double tol = 1e-9;
    std::uint64_t seed = 11;
    std::size_t mem_budget = std::size_t(1) << 30;
};

EigenSet lanczos_extreme(const Hamiltonian& h, int k, Which which, const LanczosOptions& opt = {});

double default_tau_neg(const Hamiltonian& h);
// eigenpairs below -tau_neg; caches the result on h
const EigenSet& negative_spectrum(const Hamiltonian& h, int k_cap = 50, const LanczosOptions& opt = {},
                                  double tau_neg = -1.0);

struct ClrResult {
    int N0 = 0;
    double integral = 0.0;
    double bound = 0.0;
    bool pass = false;
};
ClrResult clr_check(const Hamiltonian& h, double C);

struct RepulsiveResult {
    bool repulsive = false;
    bool nonneg = false;
    double max_xgradV = 0.0;
    double min_V = 0.0;
};
RepulsiveResult repulsive_check(const Potential& p, double tau_grad = -1.0);

Field projector_ac(const Hamiltonian& h, const Field& f);

double energy(const Hamiltonian& h, const Field& f);

struct PropagateOptions {
    double tol = 1e-10;
    double max_phase = 400.0;  // cap on a * |dt| per Chebyshev step
};

using TrajectoryFn = std::function<void(std::size_t, double, const Field&)>;

// e^{itH} psi0 at each time; times sorted by |t| with a common sign, start at 0
void propagate_each(const Hamiltonian& h, const Field& psi0, const std::vector<double>& times,
                    const TrajectoryFn& cb, const PropagateOptions& opt = {});
std::vector<Field> propagate(const Hamiltonian& h, const Field& psi0, const std::vector<double>& times,
                             const PropagateOptions& opt = {});
// one step e^{i dt H} f
Field chebyshev_step(const Hamiltonian& h, const Field& f, double dt, const PropagateOptions& opt = {});

// i int_0^t e^{i(t-s)H} F(s) ds, composite trapezoid with `substeps` panels per interval
void duhamel_each(const Hamiltonian& h, const std::function<Field(double)>& F, const std::vector<double>& times,
                  int substeps, const TrajectoryFn& cb, const PropagateOptions& opt = {});
std::vector<Field> duhamel(const Hamiltonian& h, const std::function<Field(double)>& F,
                           const std::vector<double>& times, int substeps, const PropagateOptions& opt = {});

}  // namespace ksl
