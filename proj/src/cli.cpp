#include "ksl/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "ksl/birman.hpp"
#include "ksl/counterexample.hpp"
#include "ksl/kernels.hpp"
#include "ksl/probes.hpp"
#include "ksl/radial.hpp"
#include "ksl/resolvent.hpp"
#include "ksl/spectral.hpp"

namespace fs = std::filesystem;

namespace ksl::cli {

namespace {

std::vector<double> logspace(double a, double b, int k) {
    std::vector<double> v;
    for (int i = 0; i < k; ++i) v.push_back(a * std::pow(b / a, k == 1 ? 0.0 : double(i) / (k - 1)));
    return v;
}

nlohmann::json grid_json(const GridSpec& g) { return {{"n", g.n}, {"N", g.N}, {"L", g.L}}; }

nlohmann::json potential_json(const PotentialSpec& p) {
    return {{"family", p.family}, {"depth", p.depth}, {"width", p.width}, {"s", p.s},
            {"coupling", p.coupling}, {"delta", p.delta}, {"path", p.path}};
}

double rel_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---------------------------------------------------------------- kernels

ProbeReport partial_fraction_report(const Section& s, std::uint64_t seed) {
    ProbeReport rep;
    rep.probe = "partial_fraction";
    rep.columns = {"m", "xi2", "re_z", "im_z", "residual"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logu(-2.0, 2.0), ang(0.05, 2.0 * pi - 0.05);
    const int count = s.integer("pf_samples");
    double worst = 0.0;
    for (int m : s.ints("pf_m")) {
        for (int i = 0; i < count; ++i) {
            const double xi2 = std::pow(10.0, logu(rng));
            const cplx z = std::polar(std::pow(10.0, logu(rng)), ang(rng));
            ResolventQuery q{z, Side::none, m, 3};
            const cplx a = resolvent_symbol(xi2, q), b = partial_fraction_symbol(xi2, q);
            const double r = std::abs(a - b) / std::max(1.0, std::abs(a));
            worst = std::max(worst, r);
            rep.add_row({double(m), xi2, z.real(), z.imag(), r});
        }
    }
    rep.summary["max_residual"] = worst;
    rep.pass["residual"] = worst < s.num("pf_tol");
    rep.provenance = {{"seed", seed}, {"tol", s.num("pf_tol")}};
    return rep;
}

ProbeReport kernel_report(const Section& s) {
    ProbeReport rep;
    rep.probe = "kernel_consistency";
    rep.columns = {"r", "kernel", "quadrature", "rel_error"};
    const int m = s.integer("kernel_m"), n = s.integer("kernel_n");
    const double zr = s.num("kernel_z");
    ResolventQuery q{cplx(zr, 0.0), Side::none, m, n};
    q.validate();
    const double kz = std::pow(std::abs(zr), 1.0 / (2.0 * m));
    double worst = 0.0;
    for (double r : s.nums("kernel_radii")) {
        const cplx a = polyharm_kernel(q, r);
        const cplx b = radial_kernel_quadrature(n, r, [&](double k) { return 1.0 / (std::pow(k * k, m) - q.z); }, kz);
        const double e = std::abs(a - b) / std::abs(a);
        worst = std::max(worst, e);
        rep.add_row({r, a.real(), b.real(), e});
    }
    rep.summary["max_rel_error"] = worst;
    rep.pass["kernel"] = worst < s.num("kernel_tol");
    rep.provenance = {{"m", m}, {"n", n}, {"z", zr}, {"tol", s.num("kernel_tol")}};
    return rep;
}

ProbeReport decay_report(const Section& s, int m) {
    const std::string b = "decay.m" + std::to_string(m) + ".";
    GridSpec g{m == 1 ? 3 : 5, s.integer(b + "N"), s.num(b + "L")};
    g.validate();
    const auto zs = damped_curve(logspace(s.num(b + "lambda_lo"), s.num(b + "lambda_hi"), s.integer("decay.points")),
                                 s.num(b + "eps"), m);
    PowerOptions po;
    po.max_iter = s.integer("decay.power_iter");
    const double weight_s = s.num(b + "s");
    auto res = high_energy_decay_probe(g, weight_s, m, zs, po);
    ProbeReport rep;
    rep.probe = "high_energy_decay_m" + std::to_string(m);
    rep.columns = {"m", "n", "s", "re_z", "im_z", "abs_z", "norm", "iterations", "residual"};
    for (std::size_t i = 0; i < res.z.size(); ++i)
        rep.add_row({double(m), double(g.n), weight_s, res.z[i].real(), res.z[i].imag(), std::abs(res.z[i]), res.norm[i], double(res.iterations[i]),
                     res.residual[i]});
    const double pred = -(2.0 * m - 1.0) / (2.0 * m);
    rep.summary["predicted_slope"] = pred;
    rep.summary["fitted_slope"] = res.fit.slope;
    rep.summary["fit_width"] = res.fit.width;
    rep.summary["decades"] = res.decades;
    rep.pass["slope"] = std::abs(res.fit.slope - pred) <= s.num("decay.tol");
    rep.pass["decades"] = res.decades >= 1.5;
    rep.provenance = {{"grid", grid_json(g)}, {"s", weight_s}, {"eps", s.num(b + "eps")}, {"tol", s.num("decay.tol")}};
    return rep;
}

// ---------------------------------------------------------------- spectrum

// every Lanczos eigenvalue must have a Birman-Schwinger root within rel_tol
// and the two counts (with multiplicity) must agree
ProbeReport agreement_report(const std::string& name, const GridSpec& g, int m, const std::vector<double>& depths,
                             const std::function<Potential(double)>& make, double rel_tol, int scan, int k_cap,
                             const LanczosOptions& lo) {
    ProbeReport rep;
    rep.probe = name;
    rep.columns = {"depth", "index", "lanczos", "birman_schwinger", "rel_error", "sigma_min"};
    bool ok = true;
    nlohmann::json counts = nlohmann::json::array();
    for (double d : depths) {
        Potential p = make(d);
        Hamiltonian hd(p, m);
        const EigenSet& es = negative_spectrum(hd, k_cap, lo);
        PointSpectrumOptions po;
        po.scan = scan;
        const double tau = default_tau_neg(hd);
        std::vector<PointEigen> bs;
        if (p.min() < -tau) bs = detect_point_spectrum(p, m, 1.001 * p.min(), -tau, po);
        std::vector<double> roots;
        for (const auto& e : bs)
            for (int k = 0; k < e.multiplicity; ++k) roots.push_back(e.E);
        for (std::size_t i = 0; i < es.values.size(); ++i) {
            const double E = es.values[i];
            double err = std::numeric_limits<double>::infinity(), match = NAN, sm = 0.0;
            for (const auto& e : bs)
                if (std::abs(e.E - E) / std::abs(E) < err) {
                    err = std::abs(e.E - E) / std::abs(E);
                    match = e.E;
                    sm = e.sigma_min;
                }
            ok = ok && err < rel_tol;
            rep.add_row({d, double(i), E, match, err, sm});
        }
        ok = ok && roots.size() == es.values.size();
        counts.push_back({{"depth", d}, {"lanczos", es.values.size()}, {"birman_schwinger", roots.size()}});
    }
    rep.summary["counts"] = counts;
    rep.pass["agreement"] = ok;
    rep.provenance = {{"rel_tol", rel_tol}, {"scan", scan}, {"grid", grid_json(g)}};
    return rep;
}

// ---------------------------------------------------------------- smoothing / strichartz

struct GridLadder {
    std::vector<GridSpec> grids;
};

ProbeOptions probe_options(const Section& s, std::uint64_t seed) {
    ProbeOptions o;
    o.Ts = s.nums("Ts");
    o.dt = s.num("dt");
    o.samples = s.integer("samples");
    o.seed = seed;
    o.plateau_tol = s.num("plateau_tol");
    o.boundary_tol = s.num("boundary_tol");
    o.project = s.flag("project");
    o.prop.tol = s.num("prop_tol");
    return o;
}

// repulsive check and P_ac note shared by the time-domain probes
ProbeReport potential_report(const std::string& probe, const Hamiltonian& h, const PotentialSpec& spec) {
    ProbeReport rep;
    rep.probe = probe;
    rep.columns = {"N", "max_xgradV", "min_V", "repulsive", "nonneg"};
    const auto rc = repulsive_check(h.potential());
    rep.add_row({double(h.grid().N), rc.max_xgradV, rc.min_V, double(rc.repulsive), double(rc.nonneg)});
    rep.summary["repulsive"] = rc.repulsive;
    rep.summary["nonneg"] = rc.nonneg;
    rep.summary["potential"] = potential_json(spec);
    // repulsive and decaying implies nonnegative
    rep.pass["repulsive_implies_nonneg"] = !rc.repulsive || rc.nonneg;
    return rep;
}

ProbeReport propagator_report(const Hamiltonian& h, std::uint64_t seed, double boundary_tol, double prop_tol) {
    ProbeReport rep;
    rep.probe = "propagator_integrity";
    rep.columns = {"t", "norm_drift", "energy_drift", "free_error"};
    const auto psi = packet_samples(h.grid(), 1, seed, boundary_tol).front();
    std::vector<double> times;
    for (int i = 0; i <= 10; ++i) times.push_back(double(i));
    PropagateOptions po;
    po.tol = prop_tol;
    const double n0 = norm_l2(psi), e0 = energy(h, psi);
    Hamiltonian free(zero_potential(h.grid()), h.m());
    const auto traj = propagate(h, psi, times, po);
    const auto ftraj = propagate(free, psi, times, po);
    double un = 0.0, en = 0.0, fe = 0.0;
    const auto& sym = free.symbol();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double dn = std::abs(norm_l2(traj[i]) - n0) / n0;
        const double de = std::abs(energy(h, traj[i]) - e0) / std::max(std::abs(e0), 1e-300);
        std::vector<cplx> mult(sym.size());
        for (std::size_t k = 0; k < sym.size(); ++k) mult[k] = std::polar(1.0, times[i] * sym[k]);
        const Field exact = apply_symbol(psi, mult);
        const double df = norm_l2(ftraj[i] - exact) / n0;
        un = std::max(un, dn);
        en = std::max(en, de);
        fe = std::max(fe, df);
        rep.add_row({times[i], dn, de, df});
    }
    rep.summary["max_norm_drift"] = un;
    rep.summary["max_energy_drift"] = en;
    rep.summary["max_free_error"] = fe;
    rep.pass["unitarity"] = un < 1e-10;
    rep.pass["energy"] = en < 1e-8;
    rep.pass["free_exact"] = fe < 1e-8;
    rep.provenance = {{"grid", grid_json(h.grid())}, {"m", h.m()}, {"seed", seed}, {"prop_tol", prop_tol}};
    return rep;
}

// ratio of the largest-T sup between the two finest grids
ProbeReport drift_report(const std::string& probe, const std::vector<GridSpec>& grids,
                         const std::vector<ProbeReport>& reps, double tol) {
    ProbeReport rep;
    rep.probe = probe;
    rep.columns = {"N", "L", "sup_at_T_max"};
    std::vector<double> v;
    for (std::size_t i = 0; i < grids.size(); ++i) {
        v.push_back(reps[i].summary["sup_by_T"].back().get<double>());
        rep.add_row({double(grids[i].N), grids[i].L, v.back()});
    }
    const double drift = v.size() > 1 ? rel_change(v[v.size() - 2], v.back()) : 0.0;
    rep.summary["drift"] = drift;
    rep.pass["grid_stable"] = drift < tol;
    rep.provenance = {{"drift_tol", tol}};
    return rep;
}

std::vector<GridSpec> drift_grids(const RunConfig& c, const std::string& sec) {
    std::vector<GridSpec> out;
    const GridSpec base = c.grid_for(sec);
    for (int N : c.section(sec).ints("drift_Ns")) {
        GridSpec g = base;
        g.N = N;
        g.validate(c.mem_cap);
        out.push_back(g);
    }
    if (out.empty()) out.push_back(base);
    return out;
}

void tag(ProbeReport& r, const std::string& suffix) { r.probe += suffix; }

}  // namespace

// ---------------------------------------------------------------- runners

ProbeReport propagator_integrity(const RunConfig& c) {
    const Section s = c.section("smoothing");
    const int m = c.m_for("smoothing");
    const GridSpec g = drift_grids(c, "smoothing").back();
    Hamiltonian h(build_potential(c.potential_for("smoothing"), g, m), m);
    return propagator_report(h, c.seed, s.num("boundary_tol"), s.num("prop_tol"));
}

ProbeReport partial_fraction_check(const RunConfig& c) { return partial_fraction_report(c.section("kernels"), c.seed); }
ProbeReport kernel_consistency(const RunConfig& c) { return kernel_report(c.section("kernels")); }
ProbeReport high_energy_decay(const RunConfig& c, int m) { return decay_report(c.section("kernels"), m); }

std::vector<ProbeReport> run_kernels(const RunConfig& c, const std::string&) {
    std::vector<ProbeReport> out;
    out.push_back(partial_fraction_check(c));
    out.push_back(kernel_consistency(c));
    if (c.section("kernels").flag("decay.enabled")) {
        out.push_back(high_energy_decay(c, 1));
        out.push_back(high_energy_decay(c, 2));
    }
    return out;
}

std::vector<ProbeReport> run_bs_sweep(const RunConfig& c, const std::string&) {
    const Section s = c.section("bs-sweep");
    const GridSpec g = c.grid_for("bs-sweep");
    const int m = c.m_for("bs-sweep");
    const PotentialSpec ps = c.potential_for("bs-sweep");
    Hamiltonian h(build_potential(ps, g, m), m);
    const std::size_t cap = static_cast<std::size_t>(s.integer("cap"));
    const auto& es = negative_spectrum(h);
    const auto lambdas = s.nums("lambdas"), thetas = s.nums("thetas");
    const double nu = s.num("nu"), ptol = s.num("plateau_tol");
    std::vector<ProbeReport> out;

    {
        auto sw = inv_norm_sweep(h.potential(), m, lambdas, thetas, nu, es.values, cap);
        ProbeReport rep;
        rep.probe = "inv_norm_sweep";
        rep.columns = {"lambda", "theta", "side", "inv_norm", "sigma_min"};
        for (const auto& r : sw.rows) rep.add_row({r.lambda, r.theta, double(r.side), r.norm, r.sigma_min});
        rep.summary["eigenvalues"] = es.values;
        rep.summary["excluded"] = sw.excluded;
        rep.summary["sup_by_theta"] = sw.sup_by_theta;
        rep.summary["plateau"] = sw.plateau;
        rep.pass["finite"] = std::isfinite(sw.sup);
        rep.pass["plateau"] = std::isfinite(sw.sup) && sw.plateau < ptol;
        // M is singular at each located eigenvalue
        double worst = 0.0;
        for (double E : es.values) worst = std::max(worst, sigma_min(assemble_M(h.potential(), {cplx(E, 0.0), Side::none, m, g.n}, Assembly::lattice, cap)));
        rep.summary["max_sigma_min_at_eigenvalues"] = worst;
        rep.pass["singular_at_eigenvalues"] = worst < 1e-3;
        rep.provenance = {{"grid", grid_json(g)}, {"m", m}, {"potential", potential_json(ps)}, {"nu", nu}};
        out.push_back(std::move(rep));
    }

    if (s.flag("neumann")) {
        auto nt = neumann_threshold(h.potential(), m, 1e-2, 1e4, 24, 16, cap);
        ProbeReport rep;
        rep.probe = "neumann_threshold";
        rep.columns = {"radius", "max_norm"};
        for (std::size_t i = 0; i < nt.radii.size(); ++i) rep.add_row({nt.radii[i], nt.max_norm[i]});
        // an empty search is reported, not a failure
        rep.summary["found"] = nt.found;
        rep.summary["radius"] = nt.found ? nt.r : -1.0;
        rep.summary["resolved_radius"] = nt.resolved;
        if (nt.found) {
            const double inv = inverse_norm(assemble_M(h.potential(), {cplx(0.0, nt.r), Side::none, m, g.n}, Assembly::kernel, cap));
            rep.summary["inverse_norm_at_radius"] = inv;
            rep.pass["inverse_bound"] = inv <= 2.0 + 1e-6;
        }
        rep.provenance = {{"grid", grid_json(g)}, {"m", m}, {"range", {1e-2, 1e4}}};
        out.push_back(std::move(rep));
    }

    SupersmoothOptions so;
    so.power.max_iter = s.integer("power_iter");
    so.power.rel_tol = s.num("power_tol");
    so.power.seed = c.seed;
    so.cap = cap;
    const double gamma = s.num("gamma"), eps = s.num("eps");
    auto sweep_report = [&](const SupersmoothResult& r, const std::string& name) {
        ProbeReport rep;
        rep.probe = name;
        rep.columns = {"lambda", "theta", "side", "norm", "iterations"};
        for (const auto& row : r.rows) rep.add_row({row.lambda, row.theta, double(row.side), row.norm, double(row.iterations)});
        rep.summary["sup_by_theta"] = r.sup_by_theta;
        rep.summary["plateau"] = r.plateau;
        rep.summary["weight"] = r.weight;
        rep.summary["gamma"] = gamma;
        rep.provenance = {{"grid", grid_json(g)}, {"m", m}, {"power", so.power.max_iter}};
        return rep;
    };
    // projected sweep over the whole grid, eigenvalue neighbourhoods included
    std::vector<double> lam = lambdas;
    for (double E : es.values) lam.push_back(E);
    std::sort(lam.begin(), lam.end());
    auto proj = supersmooth_sweep(h, gamma, eps, lam, thetas, true, so);
    auto rp = sweep_report(proj, "supersmooth_projected");
    rp.pass["finite"] = std::isfinite(proj.sup);
    rp.pass["plateau"] = std::isfinite(proj.sup) && proj.plateau < ptol;
    out.push_back(std::move(rp));
    if (!es.values.empty()) {
        const double growth = s.num("growth_factor");
        auto un = supersmooth_sweep(h, gamma, eps, es.values, thetas, false, so);
        auto ru = sweep_report(un, "supersmooth_unprojected");
        const double ratio = un.sup_by_theta.back() / un.sup_by_theta.front();
        ru.summary["growth"] = ratio;
        ru.pass["diverges"] = ratio >= growth;
        out.push_back(std::move(ru));
    }
    return out;
}

namespace {

LanczosOptions spectrum_lanczos(const RunConfig& c) {
    LanczosOptions lo;
    lo.tol = c.section("spectrum").num("lanczos_tol");
    lo.seed = c.seed;
    return lo;
}

}  // namespace

ProbeReport negative_spectrum_report(const RunConfig& c) {
    const Section s = c.section("spectrum");
    const GridSpec g = c.grid_for("spectrum");
    const int m = c.m_for("spectrum");
    const PotentialSpec ps = c.potential_for("spectrum");
    Hamiltonian h(build_potential(ps, g, m), m);
    const auto& es = negative_spectrum(h, s.integer("k_cap"), spectrum_lanczos(c));
    ProbeReport rep;
    rep.probe = "negative_spectrum";
    rep.columns = {"index", "eigenvalue", "residual"};
    for (std::size_t i = 0; i < es.values.size(); ++i) rep.add_row({double(i), es.values[i], es.residuals[i]});
    double worst = 0.0;
    for (double r : es.residuals) worst = std::max(worst, r);
    const auto rc = repulsive_check(h.potential());
    rep.summary["N0"] = es.N0;
    rep.summary["tau_neg"] = default_tau_neg(h);
    rep.summary["repulsive"] = rc.repulsive;
    rep.summary["nonneg"] = rc.nonneg;
    rep.summary["zero_sigma_min"] = h.potential().zero() ? 1.0 : zero_sigma_min(h.potential(), m);
    rep.pass["residuals"] = worst < 1e-8;
    rep.pass["converged"] = es.converged;
    rep.pass["nonneg_has_no_bound_states"] = !rc.nonneg || es.N0 == 0;
    rep.provenance = {{"grid", grid_json(g)}, {"m", m}, {"potential", potential_json(ps)}, {"seed", c.seed}};
    return rep;
}

ProbeReport bs_lanczos_agreement(const RunConfig& c) {
    const Section s = c.section("spectrum");
    const GridSpec g = c.grid_for("spectrum");
    const int m = c.m_for("spectrum");
    const double width = c.potential_for("spectrum").width;
    return agreement_report("bs_lanczos_agreement", g, m, s.nums("family_depths"),
                            [&](double d) { return gaussian_well(g, d, width); }, s.num("rel_tol"),
                            s.integer("scan"), s.integer("k_cap"), spectrum_lanczos(c));
}

ProbeReport clr_suite(const RunConfig& c) {
    // calibrate C once on the deepest member, then require the bound on all
    const Section s = c.section("spectrum");
    const GridSpec g = c.grid_for("spectrum");
    const int m = c.m_for("spectrum");
    const double width = c.potential_for("spectrum").width;
    const auto couplings = s.nums("clr_couplings");
    const double depth = s.num("clr_depth");
    const int k_cap = s.integer("k_cap");
    const LanczosOptions lo = spectrum_lanczos(c);
    ProbeReport rep;
    rep.probe = "clr";
    rep.columns = {"coupling", "N0", "integral", "bound", "ratio", "pass"};
    std::vector<int> N0;
    std::vector<double> I, minV;
    std::size_t ref = 0;
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        Hamiltonian hc(gaussian_well(g, depth, width, couplings[i]), m);
        N0.push_back(negative_spectrum(hc, k_cap, lo).N0);
        I.push_back(clr_integral(hc.potential(), m));
        minV.push_back(hc.potential().min());
        if (minV[i] < minV[ref]) ref = i;
    }
    const double C = I[ref] > 0.0 ? N0[ref] / I[ref] : 0.0;
    bool all = true, mono = true;
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        const bool ok = N0[i] <= C * I[i] * (1.0 + 1e-12);
        all = all && ok;
        if (i > 0 && couplings[i] >= couplings[i - 1]) mono = mono && N0[i] >= N0[i - 1];
        rep.add_row({couplings[i], double(N0[i]), I[i], C * I[i], I[i] > 0.0 ? N0[i] / I[i] : 0.0, double(ok)});
    }
    rep.summary["C"] = C;
    rep.summary["reference_coupling"] = couplings[ref];
    rep.pass["bound"] = all;
    rep.pass["monotone"] = mono;
    rep.provenance = {{"grid", grid_json(g)}, {"m", m}, {"depth", depth}, {"width", width}};
    return rep;
}

std::vector<ProbeReport> run_spectrum(const RunConfig& c, const std::string&) {
    return {negative_spectrum_report(c), bs_lanczos_agreement(c), clr_suite(c)};
}

std::vector<ProbeReport> run_counterexample(const RunConfig& c, const std::string& out_dir) {
    const Section s = c.section("counterexample");
    const int m = s.integer("m"), n = s.integer("n");
    const double delta = s.num("delta"), L = s.num("L");
    EmbeddedOptions eo;
    eo.cap = s.num("cap");
    eo.bump = s.integer("bump");
    const int check_N = s.integer("check_N");
    ProbeReport rep;
    rep.probe = "embedded_pair";
    rep.columns = {"N", "residual", "leak", "min_phi", "max_V"};
    std::vector<double> res;
    double check = NAN, leak = 0.0;
    for (int N : s.ints("Ns")) {
        GridSpec g{n, N, L};
        g.validate(c.mem_cap);
        auto pair = build_embedded_pair(g, m, delta, eo);
        res.push_back(pair.check.residual);
        leak = std::max(leak, pair.check.leak);
        if (N == check_N) {
            check = pair.check.residual;
            if (s.flag("save")) save_embedded(pair, out_dir + "/embedded_N" + std::to_string(N));
        }
        rep.add_row({double(N), pair.check.residual, pair.check.leak, pair.check.min_phi, pair.check.max_V});
    }
    bool dec = true;
    for (std::size_t i = 1; i < res.size(); ++i) dec = dec && res[i] < res[i - 1];
    rep.summary["residual_at_check_N"] = check;
    rep.summary["max_leak"] = leak;
    rep.pass["residual"] = std::isfinite(check) && check < s.num("residual_tol");
    rep.pass["decreasing"] = dec;
    rep.pass["leak"] = leak < s.num("leak_tol");
    rep.provenance = {{"m", m}, {"n", n}, {"delta", delta}, {"L", L}, {"cap", eo.cap}, {"bump", eo.bump > 0 ? eo.bump : 2 * m + 4}};
    return {rep};
}

std::vector<ProbeReport> run_smoothing(const RunConfig& c, const std::string&) {
    const Section s = c.section("smoothing");
    const int m = c.m_for("smoothing");
    const PotentialSpec ps = c.potential_for("smoothing");
    const auto grids = drift_grids(c, "smoothing");
    const double gamma = s.num("gamma"), eps = s.num("eps");
    ProbeOptions po = probe_options(s, c.seed);
    po.free_baseline = s.flag("free_baseline");
    po.refine_iters = s.integer("refine_iters");
    std::vector<ProbeReport> out, ladder;
    for (const auto& g : grids) {
        Hamiltonian h(build_potential(ps, g, m), m);
        if (&g == &grids.back()) out.push_back(potential_report("potential", h, ps));
        auto r = kato_smoothing_probe(h, gamma, eps, po);
        tag(r, "_N" + std::to_string(g.N));
        ladder.push_back(r);
        out.push_back(std::move(r));
    }
    out.push_back(drift_report("kato_smoothing_drift", grids, ladder, s.num("drift_tol")));
    out.push_back(propagator_integrity(c));
    if (s.flag("inhomogeneous")) {
        Hamiltonian h(build_potential(ps, grids.back(), m), m);
        InhomOptions io;
        io.base = po;
        io.base.free_baseline = false;
        io.t_force = s.num("t_force");
        io.substeps = s.integer("substeps");
        auto r = inhomogeneous_smoothing_probe(h, gamma, eps, io);
        tag(r, "_N" + std::to_string(grids.back().N));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ProbeReport> run_strichartz(const RunConfig& c, const std::string&) {
    const Section s = c.section("strichartz");
    const int m = c.m_for("strichartz");
    const PotentialSpec ps = c.potential_for("strichartz");
    const auto grids = drift_grids(c, "strichartz");
    ProbeOptions po = probe_options(s, c.seed);
    const int n = grids.front().n;
    const AdmissiblePair std_pair{s.num("p"), s.num("q"), n / (2.0 * m)};
    const AdmissiblePair gain_pair{s.num("gain_p"), s.num("gain_q"), n / 2.0};
    if (!validate_admissible(std_pair.p, std_pair.q, std_pair.alpha))
        throw ConfigError("config: strichartz (p, q) is not n/(2m)-admissible");
    if (s.flag("gain") && !validate_admissible(gain_pair.p, gain_pair.q, gain_pair.alpha))
        throw ConfigError("config: strichartz (gain_p, gain_q) is not n/2-admissible");
    std::vector<ProbeReport> out, ladder, gain_ladder;
    for (const auto& g : grids) {
        Hamiltonian h(build_potential(ps, g, m), m);
        if (&g == &grids.back()) out.push_back(potential_report("potential", h, ps));
        auto r = strichartz_probe(h, std_pair, StrichartzMode::standard, po);
        tag(r, "_standard_N" + std::to_string(g.N));
        ladder.push_back(r);
        out.push_back(std::move(r));
        if (s.flag("gain")) {
            auto q = strichartz_probe(h, gain_pair, StrichartzMode::gain, po);
            tag(q, "_gain_N" + std::to_string(g.N));
            gain_ladder.push_back(q);
            out.push_back(std::move(q));
        }
    }
    out.push_back(drift_report("strichartz_standard_drift", grids, ladder, s.num("drift_tol")));
    if (s.flag("gain")) out.push_back(drift_report("strichartz_gain_drift", grids, gain_ladder, s.num("drift_tol")));
    return out;
}

std::vector<ProbeReport> run_sobolev(const RunConfig& c, const std::string&) {
    const Section s = c.section("sobolev");
    const auto ms = s.ints("m"), ns = s.ints("n");
    const auto as = s.nums("alpha"), ps = s.nums("p"), qs = s.nums("q");
    if (ns.size() != ms.size() || as.size() != ms.size() || ps.size() != ms.size() || qs.size() != ms.size())
        throw ConfigError("config: sobolev case lists must have equal length");
    SobolevOptions so;
    so.arg = s.num("arg");
    so.moduli = logspace(1.0, std::pow(10.0, s.num("decades")), s.integer("points"));
    so.samples = s.integer("samples");
    so.seed = c.seed;
    so.R = s.num("R");
    so.dk = s.num("dk");
    so.tol = s.num("tol");
    std::vector<ProbeReport> out;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        std::string why;
        if (!sobolev_window(ms[i], ns[i], as[i], ps[i], qs[i], &why))
            throw ConfigError("config: sobolev case " + std::to_string(i) + " is outside the window: " + why);
        auto r = sobolev_scaling_probe(ms[i], ns[i], as[i], ps[i], qs[i], so);
        tag(r, "_case" + std::to_string(i));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ProbeReport> run_stein_weiss(const RunConfig& c, const std::string&) {
    const Section s = c.section("stein-weiss");
    const int n = s.integer("n");
    const auto ls = s.nums("lambda"), as = s.nums("alpha"), bs = s.nums("beta");
    if (as.size() != ls.size() || bs.size() != ls.size())
        throw ConfigError("config: stein-weiss case lists must have equal length");
    SteinWeissOptions so;
    for (int N : s.ints("Ns")) {
        GridSpec g{n, N, s.num("L")};
        g.validate(c.mem_cap);
        so.grids.push_back(g);
    }
    so.power = PowerOptions{s.integer("power_iter"), s.num("power_tol"), c.seed};
    so.stable_tol = s.num("stable_tol");
    std::vector<ProbeReport> out;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto r = stein_weiss_probe(ls[i], as[i], bs[i], n, so);
        tag(r, "_case" + std::to_string(i));
        out.push_back(std::move(r));
    }
    return out;
}

Runner runner(const std::string& sub) {
    if (sub == "kernels") return run_kernels;
    if (sub == "bs-sweep") return run_bs_sweep;
    if (sub == "spectrum") return run_spectrum;
    if (sub == "counterexample") return run_counterexample;
    if (sub == "smoothing") return run_smoothing;
    if (sub == "strichartz") return run_strichartz;
    if (sub == "sobolev") return run_sobolev;
    if (sub == "stein-weiss") return run_stein_weiss;
    throw ConfigError("unknown subcommand '" + sub + "'");
}

nlohmann::json list_probes() { return schema_json(); }

int run(const std::string& sub, RunConfig cfg, const std::string& out_root, bool quiet) {
    std::vector<std::string> subs;
    if (sub == "all") {
        subs.assign(subcommands().begin(), subcommands().end() - 1);
    } else {
        runner(sub);
        subs.push_back(sub);
    }
    if (cfg.threads > 0) set_threads(cfg.threads);
    const std::string root = out_root.empty() ? cfg.output : out_root;
    fs::create_directories(root);

    std::vector<ProbeReport> all;
    nlohmann::json status = nlohmann::json::object();
    bool numerical_failure = false;
    for (const auto& name : subs) {
        const std::string dir = root + "/" + name;
        fs::create_directories(dir);
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<ProbeReport> reps;
        std::string error;
        try {
            reps = runner(name)(cfg, dir);
        } catch (const ConfigError&) {
            throw;  // validation errors cancel the whole run
        } catch (const std::exception& e) {
            // numerical failure: keep going so the other reports survive
            error = e.what();
            numerical_failure = true;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = error.empty();
        for (auto& r : reps) {
            r.provenance["subcommand"] = name;
            write_csv(r, dir + "/" + r.probe + ".csv");
            ok = ok && r.all_pass();
        }
        nlohmann::json extra = {{"subcommand", name}, {"seconds", secs}, {"seed", cfg.seed}};
        if (!error.empty()) extra["error"] = error;
        write_json(reps, dir + "/summary.json", extra);
        status[name] = {{"pass", ok}, {"seconds", secs}};
        if (!error.empty()) status[name]["error"] = error;
        if (!quiet) {
            std::cerr << (ok ? "PASS " : "FAIL ") << name << " (" << secs << " s)";
            if (!error.empty()) std::cerr << ": " << error;
            std::cerr << "\n";
            for (const auto& r : reps)
                for (const auto& [k, v] : r.pass)
                    if (!v) std::cerr << "  false: " << r.probe << "." << k << "\n";
        }
        for (auto& r : reps) all.push_back(std::move(r));
    }
    if (sub == "all") write_json(all, root + "/summary.json", {{"subcommand", "all"}, {"status", status}, {"seed", cfg.seed}});
    bool pass = !numerical_failure;
    for (const auto& r : all) pass = pass && r.all_pass();
    return pass ? kExitPass : kExitFail;
}

int run(const RunRequest& req) {
    try {
        RunConfig cfg = load_config(req.config_path);
        if (req.threads >= 0) cfg.threads = req.threads;
        return run(req.subcommand, std::move(cfg), req.out, req.quiet);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace ksl::cli
