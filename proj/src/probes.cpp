#include "ksl/probes.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

#include "ksl/kernels.hpp"
#include "ksl/linalg.hpp"
#include "ksl/radial.hpp"

namespace ksl {

namespace {

struct Frac {
    __int128 num = 0, den = 1;
};

// short fraction within 1e-12, inf as 0 after inversion is handled by callers
std::optional<Frac> to_frac(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    for (long long d = 1; d <= 10000; ++d) {
        double nd = std::round(x * d);
        if (std::abs(nd / d - x) < 1e-12 * std::max(1.0, std::abs(x))) return Frac{static_cast<__int128>(nd), d};
    }
    return std::nullopt;
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

std::optional<Frac> inv_frac(double p) {
    if (std::isinf(p)) return Frac{0, 1};
    auto f = to_frac(p);
    if (!f || f->num == 0) return std::nullopt;
    Frac r{f->den, f->num};
    if (r.den < 0) {
        r.den = -r.den;
        r.num = -r.num;
    }
    return r;
}

}  // namespace

bool validate_admissible(double p, double q, double alpha) {
    if (std::isnan(p) || std::isnan(q) || std::isnan(alpha)) return false;
    if (p < 2.0 || q < 2.0) return false;
    if (p == 2.0 && std::isinf(q) && alpha == 1.0) return false;
    auto ip = inv_frac(p), iq = inv_frac(q);
    auto a = to_frac(alpha);
    if (ip && iq && a) {
        // 1/p = a (1/2 - 1/q)  <=>  ip.num * 2 a.den iq.den = a.num (iq.den - 2 iq.num) ip.den
        __int128 lhs = ip->num * 2 * a->den * iq->den;
        __int128 rhs = a->num * (iq->den - 2 * iq->num) * ip->den;
        return lhs == rhs;
    }
    return std::abs(inv(p) - alpha * (0.5 - inv(q))) < 1e-12;
}

std::vector<Field> packet_samples(const GridSpec& g, int count, std::uint64_t seed, double boundary_tol) {
    if (count < 0) throw std::invalid_argument("packet_samples: negative count");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> nd;
    // slightly inside the limit so the widest packet clears the check after rounding
    const double smax = (1.0 - 1e-6) * g.L / std::sqrt(2.0 * std::log(1.0 / boundary_tol));
    std::vector<Field> out;
    for (int s = 0; s < count; ++s) {
        const double sigma = s == 0 ? smax : smax * (0.6 + 0.4 * u(rng));
        std::vector<double> k(g.n, 0.0);
        if (s > 0)
            for (auto& x : k) x = std::clamp(nd(rng) / sigma, -0.25 * g.nyquist(), 0.25 * g.nyquist());
        Field f = sample(g, [&](std::span<const double> x) {
            double r2 = 0.0, ph = 0.0;
            for (int a = 0; a < g.n; ++a) {
                r2 += x[a] * x[a];
                ph += k[a] * x[a];
            }
            return std::exp(-r2 / (2.0 * sigma * sigma)) * std::polar(1.0, ph);
        });
        par::scale(f.v, 1.0 / norm_l2(f));
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<double> smoothing_weight(const GridSpec& g, int m, double gamma, double eps) {
    if (gamma == m - 0.5) return bracket_weight(g, -0.5 - eps);
    return power_weight(g, -m + gamma);
}

namespace {

void check_gamma(const Hamiltonian& h, double gamma, double eps) {
    const int m = h.m(), n = h.grid().n;
    if (!(gamma > m - n / 2.0) || gamma > m - 0.5)
        throw std::invalid_argument("smoothing probe: gamma must satisfy m - n/2 < gamma <= m - 1/2");
    if (gamma == m - 0.5 && !(eps > 0.0)) throw std::invalid_argument("smoothing probe: eps must be positive");
}

std::vector<double> time_grid(double T, double dt) {
    const long steps = std::lround(T / dt);
    if (steps < 1 || std::abs(steps * dt - T) > 1e-9 * T)
        throw std::invalid_argument("probe: every T must be a positive multiple of dt");
    std::vector<double> t(steps + 1);
    for (long i = 0; i <= steps; ++i) t[i] = i * dt;
    return t;
}

void check_ladder(const ProbeOptions& opt) {
    if (opt.Ts.empty() || !std::is_sorted(opt.Ts.begin(), opt.Ts.end()))
        throw std::invalid_argument("probe: T ladder must be nonempty and ascending");
    if (!(opt.dt > 0.0) || !(opt.plateau_tol > 0.0)) throw std::invalid_argument("probe: tolerances must be positive");
    for (double T : opt.Ts) time_grid(T, opt.dt);
}

void check_boundary(const std::vector<Field>& samples, double tol) {
    for (const auto& s : samples)
        if (boundary_ratio(s) > tol)
            throw std::invalid_argument("probe: initial state does not decay at the box edge (boundary-decay precondition)");
}

// integral over [-T, T] of a functional of e^{itH} psi for every T in the ladder
std::vector<double> time_integrals(const Hamiltonian& h, const Field& psi, const ProbeOptions& opt,
                                   const std::function<double(const Field&)>& integrand) {
    const double Tmax = opt.Ts.back();
    std::vector<double> fwd = time_grid(Tmax, opt.dt), bwd = fwd;
    for (auto& t : bwd) t = -t;
    std::vector<double> vp(fwd.size()), vm(fwd.size());
    propagate_each(h, psi, fwd, [&](std::size_t i, double, const Field& u) { vp[i] = integrand(u); }, opt.prop);
    // real data and real V: e^{-itH} psi = conj(e^{itH} psi), and the functionals ignore conjugation
    const bool real = std::all_of(psi.v.begin(), psi.v.end(), [](cplx c) { return c.imag() == 0.0; });
    if (real)
        vm = vp;
    else
        propagate_each(h, psi, bwd, [&](std::size_t i, double, const Field& u) { vm[i] = integrand(u); }, opt.prop);
    std::vector<double> cum(fwd.size(), 0.0);
    for (std::size_t i = 1; i < fwd.size(); ++i) cum[i] = cum[i - 1] + 0.5 * opt.dt * (vp[i - 1] + vp[i] + vm[i - 1] + vm[i]);
    std::vector<double> out;
    for (double T : opt.Ts) out.push_back(cum[std::lround(T / opt.dt)]);
    return out;
}

double rel_increment(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double a = v[v.size() - 2], b = v.back();
    return a > 0.0 ? (b - a) / a : (b > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

nlohmann::json grid_json(const GridSpec& g) { return {{"n", g.n}, {"N", g.N}, {"L", g.L}}; }

nlohmann::json options_json(const ProbeOptions& opt) {
    return {{"Ts", opt.Ts},           {"dt", opt.dt},
            {"samples", opt.samples}, {"seed", opt.seed},
            {"plateau_tol", opt.plateau_tol}, {"boundary_tol", opt.boundary_tol},
            {"project", opt.project}, {"prop_tol", opt.prop.tol}};
}

std::vector<Field> prepare(const Hamiltonian& h, const ProbeOptions& opt, const std::vector<Field>* samples) {
    check_ladder(opt);
    std::vector<Field> s = samples ? *samples : packet_samples(h.grid(), opt.samples, opt.seed, opt.boundary_tol);
    for (const auto& f : s)
        if (!(f.grid == h.grid())) throw std::invalid_argument("probe: sample grid differs from the operator grid");
    check_boundary(s, opt.boundary_tol);
    if (opt.project && !h.potential().zero()) negative_spectrum(h);
    return s;
}

Field project(const Hamiltonian& h, const Field& f, bool on) {
    if (!on || h.potential().zero()) return f;
    return projector_ac(h, f);
}

// sup over samples of the weighted L2 time integral divided by ||psi0||^2
std::vector<double> smoothing_sup(const Hamiltonian& h, const std::vector<Field>& samples, const ProbeOptions& opt,
                                  const std::vector<double>& W, const std::vector<double>& Dg, ProbeReport* rep,
                                  double tag) {
    std::vector<double> sup(opt.Ts.size(), 0.0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const double n0 = norm_l2(samples[s]);
        if (n0 == 0.0) {
            for (std::size_t k = 0; k < opt.Ts.size(); ++k)
                if (rep) rep->add_row({double(s), opt.Ts[k], 0.0, tag});
            continue;
        }
        Field psi = project(h, samples[s], opt.project);
        auto I = time_integrals(h, psi, opt, [&](const Field& u) {
            double w = weighted_l2_norm(apply_symbol(u, Dg), W);
            return w * w;
        });
        for (std::size_t k = 0; k < I.size(); ++k) {
            double r = I[k] / (n0 * n0);
            sup[k] = std::max(sup[k], r);
            if (rep) rep->add_row({double(s), opt.Ts[k], r, tag});
        }
    }
    return sup;
}

// power refinement of the quadratic form psi -> int_{-T}^{T} ||W D psi(t)||^2 dt at T = Tmax
double refine_quadratic(const Hamiltonian& h, const Field& start, const ProbeOptions& opt,
                        const std::vector<double>& W, const std::vector<double>& Dg, int* done) {
    const auto times = time_grid(opt.Ts.back(), opt.dt);
    const std::size_t bytes = 2 * times.size() * start.size() * sizeof(cplx);
    *done = 0;
    if (opt.refine_iters <= 0 || bytes > opt.refine_mem) return 0.0;
    std::vector<double> W2(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) W2[i] = W[i] * W[i];
    auto wq = [&](const Field& u) { return apply_symbol(pointwise(apply_symbol(u, Dg), W2), Dg); };
    const std::size_t nt = times.size();
    auto AstarA = [&](const Field& x0) {
        Field x = project(h, x0, opt.project);
        Field total(x.grid);
        for (double sgn : {1.0, -1.0}) {
            std::vector<Field> y(nt);
            std::vector<double> t = times;
            for (auto& v : t) v *= sgn;
            propagate_each(h, x, t, [&](std::size_t i, double, const Field& u) { y[i] = wq(u); }, opt.prop);
            // sum_j w_j U(-t_j) y_j by nesting from the far end
            Field acc = y[nt - 1];
            par::scale(acc.v, 0.5 * opt.dt);
            for (std::size_t j = nt - 1; j-- > 0;) {
                acc = chebyshev_step(h, acc, -sgn * opt.dt, opt.prop);
                par::axpy((j == 0 ? 0.5 : 1.0) * opt.dt, y[j].v, acc.v);
            }
            par::axpy(1.0, acc.v, total.v);
        }
        return project(h, total, opt.project);
    };
    Field x = start;
    par::scale(x.v, 1.0 / norm_l2(x));
    double mu = 0.0;
    for (int it = 0; it < opt.refine_iters; ++it) {
        Field y = AstarA(x);
        mu = std::real(inner(x, y));
        double ny = norm_l2(y);
        if (ny == 0.0) break;
        par::scale(y.v, 1.0 / ny);
        x = std::move(y);
        *done = it + 1;
    }
    return mu;
}

}  // namespace

ProbeReport kato_smoothing_probe(const Hamiltonian& h, double gamma, double eps, const ProbeOptions& opt,
                                 const std::vector<Field>* samples_in) {
    check_gamma(h, gamma, eps);
    auto samples = prepare(h, opt, samples_in);
    const GridSpec& g = h.grid();
    const auto W = smoothing_weight(g, h.m(), gamma, eps);
    const auto Dg = radial_symbol_real(g, [gamma](double k) { return std::pow(k, gamma); });

    ProbeReport rep;
    rep.probe = "kato_smoothing";
    rep.columns = {"sample", "T", "ratio", "free"};
    auto sup = smoothing_sup(h, samples, opt, W, Dg, &rep, 0.0);
    rep.summary["gamma"] = gamma;
    rep.summary["eps"] = eps;
    rep.summary["weight"] = gamma == h.m() - 0.5 ? "<x>^{-1/2-eps}" : "|x|^{-m+gamma}";
    rep.summary["sup_by_T"] = sup;
    rep.summary["plateau_increment"] = rel_increment(sup);
    if (!h.potential().zero() && opt.free_baseline) {
        Hamiltonian h0(zero_potential(g), h.m());
        ProbeOptions o0 = opt;
        o0.project = false;
        auto sup0 = smoothing_sup(h0, samples, o0, W, Dg, &rep, 1.0);
        rep.summary["free_sup_by_T"] = sup0;
        rep.summary["free_plateau_increment"] = rel_increment(sup0);
    }
    if (opt.refine_iters > 0) {
        int done = 0;
        double mu = refine_quadratic(h, samples.front(), opt, W, Dg, &done);
        rep.summary["refined_iterations"] = done;
        if (done > 0) {
            rep.summary["refined_sup"] = mu;
            sup.back() = std::max(sup.back(), mu);
            rep.summary["sup_by_T"] = sup;
        }
    }
    bool finite = std::all_of(sup.begin(), sup.end(), [](double x) { return std::isfinite(x); });
    rep.pass["finite"] = finite;
    rep.pass["plateau"] = finite && rel_increment(sup) < opt.plateau_tol;
    rep.provenance["grid"] = grid_json(g);
    rep.provenance["m"] = h.m();
    rep.provenance["options"] = options_json(opt);
    rep.provenance["potential"] = h.potential().family;
    return rep;
}

ProbeReport inhomogeneous_smoothing_probe(const Hamiltonian& h, double gamma, double eps, const InhomOptions& opt,
                                          const std::vector<Field>* samples_in) {
    check_gamma(h, gamma, eps);
    const ProbeOptions& base = opt.base;
    if (!(opt.t_force > 0.0) || opt.substeps < 1) throw std::invalid_argument("inhomogeneous probe: bad forcing window");
    auto samples = prepare(h, base, samples_in);
    const GridSpec& g = h.grid();
    const int m = h.m();
    const auto W = smoothing_weight(g, m, gamma, eps);
    const auto Dg = radial_symbol_real(g, [gamma](double k) { return std::pow(k, gamma); });
    // dual side |x|^{m-gamma} |D|^{-gamma}, or <x>^{1/2+eps} |D|^{-m+1/2}
    std::vector<double> Wd(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) Wd[i] = 1.0 / W[i];
    const auto Dd = radial_symbol_real(g, [gamma](double k) { return std::pow(k, -gamma); });

    const double TF = opt.t_force;
    auto chi = [TF](double t) {
        double s = 2.0 * t / TF - 1.0;
        return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    };
    // int chi^2 dt by fine trapezoid
    double chi2 = 0.0;
    {
        const int M = 4000;
        for (int i = 1; i < M; ++i) chi2 += std::pow(chi(TF * i / M), 2);
        chi2 *= TF / M;
    }

    ProbeReport rep;
    rep.probe = "inhomogeneous_smoothing";
    rep.columns = {"sample", "T", "dt", "ratio"};
    auto run = [&](double dt) {
        ProbeOptions o = base;
        o.dt = dt;
        std::vector<double> sup(o.Ts.size(), 0.0);
        const auto times = time_grid(o.Ts.back(), dt);
        for (std::size_t s = 0; s < samples.size(); ++s) {
            Field gx = project(h, samples[s], o.project);
            double rhs = weighted_l2_norm(apply_symbol(gx, Dd), Wd);
            rhs = rhs * rhs * chi2;
            if (rhs == 0.0) {
                for (std::size_t k = 0; k < o.Ts.size(); ++k) rep.add_row({double(s), o.Ts[k], dt, 0.0});
                continue;
            }
            std::vector<double> vals(times.size());
            duhamel_each(
                h, [&](double t) { return chi(t) * gx; }, times, opt.substeps,
                [&](std::size_t i, double, const Field& u) {
                    double w = weighted_l2_norm(apply_symbol(project(h, u, o.project), Dg), W);
                    vals[i] = w * w;
                },
                o.prop);
            std::vector<double> cum(times.size(), 0.0);
            for (std::size_t i = 1; i < times.size(); ++i) cum[i] = cum[i - 1] + 0.5 * dt * (vals[i - 1] + vals[i]);
            for (std::size_t k = 0; k < o.Ts.size(); ++k) {
                double r = std::sqrt(cum[std::lround(o.Ts[k] / dt)] / rhs);
                sup[k] = std::max(sup[k], r);
                rep.add_row({double(s), o.Ts[k], dt, r});
            }
        }
        return sup;
    };
    auto sup = run(base.dt);
    auto sup_half = run(0.5 * base.dt);
    const double change = sup.back() > 0.0 ? std::abs(sup_half.back() - sup.back()) / sup.back() : 0.0;
    // squared ratios of the norms plateau like the homogeneous functional
    std::vector<double> sq(sup.size());
    for (std::size_t k = 0; k < sup.size(); ++k) sq[k] = sup[k] * sup[k];

    ProbeOptions hopt = base;
    hopt.free_baseline = false;
    auto hom = kato_smoothing_probe(h, gamma, eps, hopt, &samples);
    const double hom_const = hom.summary["sup_by_T"].back().get<double>();

    rep.summary["gamma"] = gamma;
    rep.summary["sup_by_T"] = sup;
    rep.summary["sup_by_T_half_dt"] = sup_half;
    rep.summary["dt_halving_change"] = change;
    rep.summary["plateau_increment"] = rel_increment(sq);
    rep.summary["homogeneous_constant_squared"] = hom_const;
    rep.summary["ratio_to_homogeneous"] = hom_const > 0.0 ? sup.back() / hom_const : 0.0;
    bool finite = std::all_of(sup.begin(), sup.end(), [](double x) { return std::isfinite(x); });
    rep.pass["finite"] = finite;
    rep.pass["dt_stable"] = finite && change < 0.05;
    rep.pass["plateau"] = finite && rel_increment(sq) < base.plateau_tol;
    rep.provenance["grid"] = grid_json(g);
    rep.provenance["m"] = m;
    rep.provenance["options"] = options_json(base);
    rep.provenance["t_force"] = TF;
    rep.provenance["substeps"] = opt.substeps;
    return rep;
}

ProbeReport strichartz_probe(const Hamiltonian& h, const AdmissiblePair& pair, StrichartzMode mode,
                             const ProbeOptions& opt, const std::vector<Field>* samples_in) {
    const GridSpec& g = h.grid();
    const int m = h.m(), n = g.n;
    const double want = mode == StrichartzMode::standard ? n / (2.0 * m) : n / 2.0;
    if (std::abs(pair.alpha - want) > 1e-12)
        throw std::invalid_argument("strichartz_probe: alpha must be n/(2m) (standard) or n/2 (gain)");
    if (!validate_admissible(pair.p, pair.q, pair.alpha)) throw std::invalid_argument("strichartz_probe: pair is not admissible");
    const double p = pair.p, q = pair.q;
    const double s = mode == StrichartzMode::gain ? 2.0 * (m - 1) * inv(p) : 0.0;
    double q1 = q;
    if (mode == StrichartzMode::gain) {
        // 1/q - 1/q1 = 2(m-1)/(np), with (p, q1) admissible at n/(2m)
        const double iq1 = inv(q) - 2.0 * (m - 1) * inv(p) / n;
        if (!(iq1 > 0.0) || !validate_admissible(p, 1.0 / iq1, n / (2.0 * m)))
            throw std::invalid_argument("strichartz_probe: Sobolev relation has no admissible partner exponent");
        q1 = 1.0 / iq1;
    }
    auto samples = prepare(h, opt, samples_in);
    const auto Ds = radial_symbol_real(g, [s](double k) { return std::pow(k, s); });

    ProbeReport rep;
    rep.probe = "strichartz";
    rep.columns = {"sample", "T", "ratio", "free"};
    double sob = 0.0;
    auto run = [&](const Hamiltonian& H, bool proj, double tag) {
        std::vector<double> sup(opt.Ts.size(), 0.0), supp(opt.Ts.size(), 0.0);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double n0 = norm_l2(samples[k]);
            if (n0 == 0.0) {
                for (std::size_t j = 0; j < opt.Ts.size(); ++j) rep.add_row({double(k), opt.Ts[j], 0.0, tag});
                continue;
            }
            Field psi = project(H, samples[k], proj);
            std::vector<double> I;
            if (std::isinf(p)) {
                // sup over |t| <= T
                const auto fwd = time_grid(opt.Ts.back(), opt.dt);
                std::vector<double> best(fwd.size(), 0.0);
                for (double sg : {1.0, -1.0}) {
                    std::vector<double> t = fwd;
                    for (auto& v : t) v *= sg;
                    propagate_each(H, psi, t, [&](std::size_t i, double, const Field& u) {
                        best[i] = std::max(best[i], norm_lp(s == 0.0 ? u : apply_symbol(u, Ds), q));
                    }, opt.prop);
                }
                for (std::size_t i = 1; i < best.size(); ++i) best[i] = std::max(best[i], best[i - 1]);
                for (double T : opt.Ts) I.push_back(best[std::lround(T / opt.dt)]);
            } else {
                I = time_integrals(H, psi, opt, [&](const Field& u) {
                    Field d = s == 0.0 ? u : apply_symbol(u, Ds);
                    double v = norm_lp(d, q);
                    if (mode == StrichartzMode::gain && tag == 0.0 && v > 0.0) sob = std::max(sob, norm_lp(u, q1) / v);
                    return std::pow(v, p);
                });
            }
            for (std::size_t j = 0; j < I.size(); ++j) {
                double val = std::isinf(p) ? I[j] : std::pow(I[j], 1.0 / p);
                double r = val / n0;
                sup[j] = std::max(sup[j], r);
                supp[j] = std::max(supp[j], std::isinf(p) ? r : std::pow(r, p));
                rep.add_row({double(k), opt.Ts[j], r, tag});
            }
        }
        return std::make_pair(sup, supp);
    };
    auto [sup, supp] = run(h, opt.project, 0.0);
    rep.summary["p"] = std::isinf(p) ? -1.0 : p;
    rep.summary["q"] = std::isinf(q) ? -1.0 : q;
    rep.summary["alpha"] = pair.alpha;
    rep.summary["mode"] = mode == StrichartzMode::gain ? "gain" : "standard";
    rep.summary["derivative_order"] = s;
    rep.summary["sup_by_T"] = sup;
    // increments of the time integral itself (ratio^p)
    rep.summary["plateau_increment"] = rel_increment(supp);
    if (mode == StrichartzMode::gain) {
        rep.summary["sobolev_q1"] = q1;
        rep.summary["sobolev_constant"] = sob;
    }
    if (!h.potential().zero() && opt.free_baseline) {
        Hamiltonian h0(zero_potential(g), m);
        auto [sup0, supp0] = run(h0, false, 1.0);
        rep.summary["free_sup_by_T"] = sup0;
        rep.summary["free_plateau_increment"] = rel_increment(supp0);
    }
    bool finite = std::all_of(sup.begin(), sup.end(), [](double x) { return std::isfinite(x); });
    rep.pass["finite"] = finite;
    rep.pass["plateau"] = finite && rel_increment(supp) < opt.plateau_tol;
    if (mode == StrichartzMode::gain) rep.pass["sobolev_finite"] = std::isfinite(sob);
    rep.provenance["grid"] = grid_json(g);
    rep.provenance["m"] = m;
    rep.provenance["options"] = options_json(opt);
    return rep;
}

bool sobolev_window(int m, int n, double alpha, double p, double q, std::string* why) {
    auto fail = [&](const char* w) {
        if (why) *why = w;
        return false;
    };
    const double ip = inv(p), iq = inv(q);
    if (!(alpha > 2.0 * m - n) || alpha > 2.0 * m - 2.0 * n / (n + 1.0)) return fail("alpha outside (2m - n, 2m - 2n/(n+1)]");
    if (!(std::min(ip - 0.5, 0.5 - iq) > 1.0 / (2.0 * n))) return fail("min(1/p - 1/2, 1/2 - 1/q) must exceed 1/(2n)");
    const double d = ip - iq;
    if (d < 2.0 / (n + 1.0) - 1e-14 || d > 1.0 + 1e-14) return fail("1/p - 1/q outside [2/(n+1), 1]");
    return true;
}

ProbeReport sobolev_scaling_probe(int m, int n, double alpha, double p, double q, const SobolevOptions& opt) {
    std::string why;
    if (!sobolev_window(m, n, alpha, p, q, &why)) throw std::invalid_argument("sobolev_scaling_probe: " + why);
    if (opt.moduli.size() < 3) throw std::invalid_argument("sobolev_scaling_probe: need at least three |z| samples");
    const auto [zlo, zhi] = std::minmax_element(opt.moduli.begin(), opt.moduli.end());
    if (!(*zlo > 0.0) || std::log10(*zhi / *zlo) < 1.5)
        throw std::invalid_argument("sobolev_scaling_probe: |z| must span at least 1.5 decades");
    if (!(opt.R > 0.0) || !(opt.dk > 0.0) || !(opt.tol > 0.0)) throw std::invalid_argument("sobolev_scaling_probe: bad options");
    const double predicted = n / (2.0 * m) * (inv(p) - inv(q)) - (2.0 * m - alpha) / (2.0 * m);

    // shells (centre, width) in units of k_z, then seeded random mixtures of them
    struct Shell {
        double c, w;
    };
    std::vector<Shell> shells;
    for (double c : {0.5, 0.8, 0.95, 1.0, 1.05, 1.2, 2.0})
        for (double w : {0.1, 0.25}) shells.push_back({c, w});
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uc(0.3, 2.0), uw(0.1, 0.4), ua(-1.0, 1.0);
    struct Mix {
        std::vector<Shell> s;
        std::vector<cplx> a;
    };
    std::vector<Mix> mixes;
    for (const auto& s : shells) mixes.push_back({{s}, {1.0}});
    for (int k = 0; k < opt.samples; ++k) {
        Mix mx;
        for (int j = 0; j < 3; ++j) {
            mx.s.push_back({uc(rng), uw(rng)});
            mx.a.push_back({ua(rng), ua(rng)});
        }
        mixes.push_back(mx);
    }

    const double kzmax = std::pow(*zhi, 1.0 / (2.0 * m));
    const double K = 3.0 * kzmax;
    const int Nk = static_cast<int>(std::ceil(K / opt.dk)) + 1;
    const double dr = pi / (4.0 * K);
    const int Nr = static_cast<int>(std::ceil(opt.R / dr)) + 1;
    RadialGrid rg(n, opt.R, Nr, K, Nk);
    const auto& kk = rg.k();

    ProbeReport rep;
    rep.probe = "sobolev_scaling";
    rep.columns = {"abs_z", "sample", "ratio"};
    std::vector<double> lx, ly;
    for (double az : opt.moduli) {
        const cplx z = std::polar(az, opt.arg);
        const double kz = std::pow(az, 1.0 / (2.0 * m));
        double sup = 0.0;
        for (std::size_t si = 0; si < mixes.size(); ++si) {
            Eigen::VectorXcd F(Nk), U(Nk);
            for (int i = 0; i < Nk; ++i) {
                cplx v = 0.0;
                for (std::size_t j = 0; j < mixes[si].s.size(); ++j) {
                    const double c = mixes[si].s[j].c * kz, w = mixes[si].s[j].w * kz;
                    v += mixes[si].a[j] * std::exp(-0.5 * std::pow((kk[i] - c) / w, 2));
                }
                F[i] = v;
                const double k = kk[i];
                U[i] = (k == 0.0 && alpha > 0.0 ? 0.0 : std::pow(k, alpha)) / (std::pow(k, 2.0 * m) - z) * v;
            }
            const double fp = rg.lp_norm_r(rg.inverse(F), p);
            const double uq = rg.lp_norm_r(rg.inverse(U), q);
            const double r = uq / fp;
            sup = std::max(sup, r);
            rep.add_row({az, double(si), r});
        }
        lx.push_back(std::log(az));
        ly.push_back(std::log(sup));
    }
    LineFit fit = fit_line(lx, ly);
    rep.summary["predicted_exponent"] = predicted;
    rep.summary["fitted_exponent"] = fit.slope;
    rep.summary["fit_width"] = fit.width;
    rep.summary["deviation"] = std::abs(fit.slope - predicted);
    rep.summary["m"] = m;
    rep.summary["n"] = n;
    rep.summary["alpha"] = alpha;
    rep.summary["p"] = p;
    rep.summary["q"] = std::isinf(q) ? -1.0 : q;
    rep.pass["exponent"] = std::abs(fit.slope - predicted) <= opt.tol;
    rep.provenance["radial"] = nlohmann::json{{"R", opt.R}, {"Nr", Nr}, {"K", K}, {"Nk", Nk}};
    rep.provenance["arg_z"] = opt.arg;
    rep.provenance["seed"] = opt.seed;
    rep.provenance["samples"] = mixes.size();
    rep.provenance["tol"] = opt.tol;
    return rep;
}

ProbeReport stein_weiss_probe(double lambda, double alpha, double beta, int n, const SteinWeissOptions& opt) {
    if (opt.grids.size() < 2) throw std::invalid_argument("stein_weiss_probe: need a refinement ladder");
    const bool satisfied = lambda > 0.0 && lambda < n && alpha < n / 2.0 && beta < n / 2.0 && alpha + beta >= 0.0 &&
                           std::abs(lambda + alpha + beta - n) < 1e-12;
    ProbeReport rep;
    rep.probe = "stein_weiss";
    rep.columns = {"N", "L", "norm", "iterations", "residual"};
    std::vector<double> norms;
    bool converged = true;
    for (const auto& g : opt.grids) {
        if (g.n != n) throw std::invalid_argument("stein_weiss_probe: grid dimension differs from n");
        const auto wa = power_weight(g, -alpha), wb = power_weight(g, -beta);
        const auto D = radial_symbol_real(g, [&](double k) { return std::pow(k, lambda - n); });
        FieldOp A = [&](const Field& f) { return pointwise(apply_symbol(pointwise(f, wa), D), wb); };
        FieldOp As = [&](const Field& f) { return pointwise(apply_symbol(pointwise(f, wb), D), wa); };
        auto pr = power_norm(g, A, As, opt.power);
        if (!std::isfinite(pr.norm)) throw std::runtime_error("stein_weiss_probe: power iteration failed");
        converged = converged && pr.converged;
        norms.push_back(pr.norm);
        rep.add_row({double(g.N), g.L, pr.norm, double(pr.iterations), pr.residual});
    }
    const double change = std::abs(norms.back() - norms[norms.size() - 2]) / norms[norms.size() - 2];
    rep.summary["lambda"] = lambda;
    rep.summary["alpha"] = alpha;
    rep.summary["beta"] = beta;
    rep.summary["n"] = n;
    rep.summary["norms"] = norms;
    rep.summary["last_change"] = change;
    rep.summary["conditions_satisfied"] = satisfied;
    rep.summary["stabilized"] = change < opt.stable_tol;
    const bool identity = lambda == n && alpha == 0.0 && beta == 0.0;
    bool growing = true;
    for (std::size_t i = 1; i < norms.size(); ++i) growing = growing && norms[i] > norms[i - 1];
    rep.summary["identity"] = identity;
    if (identity) {
        bool one = true;
        for (double v : norms) one = one && std::abs(v - 1.0) < 1e-8;
        rep.pass["ladder"] = one;
    } else if (satisfied) {
        rep.pass["ladder"] = change < opt.stable_tol;
    } else {
        // a violating triple must keep growing under refinement
        rep.pass["ladder"] = growing && change >= opt.stable_tol;
    }
    rep.provenance["power"] = {{"max_iter", opt.power.max_iter}, {"rel_tol", opt.power.rel_tol}, {"seed", opt.power.seed}};
    rep.provenance["stable_tol"] = opt.stable_tol;
    return rep;
}

}  // namespace ksl
