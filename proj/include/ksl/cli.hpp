// Subcommand orchestration: each runner turns a config section into probe
// reports; run() writes CSV + JSON and maps the outcome to an exit status.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ksl/config.hpp"
#include "ksl/report.hpp"

namespace ksl::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;      // a pass flag is false or a probe threw
inline constexpr int kExitInvalid = 2;   // config / validation error

using Runner = std::function<std::vector<ProbeReport>(const RunConfig&, const std::string& out)>;

// runner for one subcommand (not "all"); throws ConfigError for an unknown name
Runner runner(const std::string& subcommand);

std::vector<ProbeReport> run_kernels(const RunConfig& c, const std::string& out);
std::vector<ProbeReport> run_bs_sweep(const RunConfig& c, const std::string& out);
std::vector<ProbeReport> run_spectrum(const RunConfig& c, const std::string& out);
std::vector<ProbeReport> run_counterexample(const RunConfig& c, const std::string& out);
std::vector<ProbeReport> run_smoothing(const RunConfig& c, const std::string& out);
std::vector<ProbeReport> run_strichartz(const RunConfig& c, const std::string& out);
std::vector<ProbeReport> run_sobolev(const RunConfig& c, const std::string& out);
std::vector<ProbeReport> run_stein_weiss(const RunConfig& c, const std::string& out);

// single reports used by the acceptance checks
ProbeReport partial_fraction_check(const RunConfig& c);
ProbeReport kernel_consistency(const RunConfig& c);
ProbeReport high_energy_decay(const RunConfig& c, int m);  // m = 1 or 2
ProbeReport negative_spectrum_report(const RunConfig& c);
ProbeReport bs_lanczos_agreement(const RunConfig& c);
ProbeReport clr_suite(const RunConfig& c);
// unitarity, energy and free-multiplier check on the finest smoothing grid
ProbeReport propagator_integrity(const RunConfig& c);

struct RunRequest {
    std::string subcommand;
    std::string config_path;
    std::string out;   // empty = config output
    int threads = -1;  // < 0 = config value
    bool quiet = false;
};

int run(const RunRequest& req);
// same, with an already parsed config
int run(const std::string& subcommand, RunConfig cfg, const std::string& out, bool quiet = false);

// machine-readable schema of every subcommand and its parameters
nlohmann::json list_probes();

}  // namespace ksl::cli
