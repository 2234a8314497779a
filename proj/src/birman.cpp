#include "ksl/birman.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ksl/kernels.hpp"

namespace ksl {

namespace {

// integral of the radial kernel over the volume-equivalent ball of one cell
cplx self_cell(const ResolventQuery& q, double h) {
    const double rho = h * volume_ball_radius(q.n);
    if (q.z == cplx(0.0, 0.0) && q.side == Side::none)
        return riesz_constant(q.m, q.n) * sphere_area(q.n) * std::pow(rho, 2.0 * q.m) / (2.0 * q.m);
    std::vector<double> x, w;
    gauss_legendre(24, 0.0, rho, x, w);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * polyharm_kernel(q, x[i]) * std::pow(x[i], q.n - 1.0);
    return acc * sphere_area(q.n);
}

cplx kernel_value(const ResolventQuery& q, double r) {
    if (q.z == cplx(0.0, 0.0) && q.side == Side::none) return riesz_kernel(q.m, q.n, r);
    return polyharm_kernel(q, r);
}

std::vector<double> symmetric_eigs(const Eigen::MatrixXcd& M, bool& ok) {
    ok = false;
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if (M.imag().cwiseAbs().maxCoeff() > 1e-13 * scale) return {};
    Eigen::MatrixXd R = M.real();
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
    ok = true;
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

}  // namespace

BSMatrix assemble_M(const Potential& p, const ResolventQuery& q0, Assembly mode, std::size_t cap) {
    ResolventQuery q = q0;
    q.n = p.grid.n;
    const bool zero = q.z == cplx(0.0, 0.0) && q.side == Side::none;
    if (!zero) q.validate();
    if (p.support.size() > cap) throw std::invalid_argument("assemble_M: support set exceeds the dense cap");
    BSMatrix B;
    B.q = q;
    B.mode = mode;
    B.support = p.support;
    const Eigen::Index S = static_cast<Eigen::Index>(p.support.size());
    B.M = Eigen::MatrixXcd::Identity(S, S);
    if (S == 0) return B;
    const GridSpec& g = p.grid;
    std::vector<int> idx(static_cast<std::size_t>(S) * g.n);
    for (Eigen::Index i = 0; i < S; ++i) multi_index(g, p.support[i], &idx[i * g.n]);

    if (mode == Assembly::lattice) {
        if (zero || q.side != Side::none)
            throw std::invalid_argument("assemble_M: lattice assembly needs z off [0, inf)");
        Field delta(g);
        const std::size_t o = origin_index(g);
        delta.v[o] = 1.0;
        Field G = apply_symbol(delta, resolvent_multiplier(g, q));
        std::vector<int> d(g.n);
        for (Eigen::Index i = 0; i < S; ++i) {
            for (Eigen::Index j = 0; j < S; ++j) {
                for (int a = 0; a < g.n; ++a) d[a] = idx[i * g.n + a] - idx[j * g.n + a] + g.N / 2;
                cplx val = G.v[linear_index(g, d.data())];
                B.M(i, j) += p.w[p.support[i]] * val * p.v[p.support[j]];
            }
        }
    } else {
        const double h = g.h(), cell = g.cell();
        const cplx diag = self_cell(q, h);
        for (Eigen::Index i = 0; i < S; ++i) {
            for (Eigen::Index j = 0; j < S; ++j) {
                cplx k;
                if (i == j) {
                    k = diag;
                } else {
                    double r2 = 0.0;
                    for (int a = 0; a < g.n; ++a) {
                        double dx = (idx[i * g.n + a] - idx[j * g.n + a]) * h;
                        r2 += dx * dx;
                    }
                    k = kernel_value(q, std::sqrt(r2)) * cell;
                }
                B.M(i, j) += p.w[p.support[i]] * k * p.v[p.support[j]];
            }
        }
    }
    return B;
}

Eigen::VectorXd singular_values(const BSMatrix& B) {
    if (B.M.rows() == 0) return Eigen::VectorXd();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B.M);
    return svd.singularValues();
}

double sigma_min(const BSMatrix& B) {
    const Eigen::Index S = B.M.rows();
    if (S == 0) return 1.0;
    bool sym = false;
    auto ev = symmetric_eigs(B.M, sym);
    if (sym) {
        double m = std::numeric_limits<double>::infinity();
        for (double x : ev) m = std::min(m, std::abs(x));
        return m;
    }
    if (S <= 2000) return singular_values(B).minCoeff();
    // inverse iteration on (M^H M)^{-1}
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B.M);
    Eigen::PartialPivLU<Eigen::MatrixXcd> luh(B.M.adjoint());
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(S).normalized();
    double est = 0.0;
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXcd y = lu.solve(luh.solve(x));
        double ny = y.norm();
        double next = 1.0 / std::sqrt(ny);
        x = y / ny;
        if (it > 0 && std::abs(next - est) < 1e-8 * next) {
            est = next;
            break;
        }
        est = next;
    }
    return est;
}

double inverse_norm(const BSMatrix& B) { return 1.0 / sigma_min(B); }

NeumannResult neumann_threshold(const Potential& p, int m, double r_lo, double r_hi, int n_radii, int n_angles,
                                std::size_t cap) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("neumann_threshold: bad search range");
    NeumannResult res;
    res.resolved = std::pow(0.5 * p.grid.nyquist(), 2.0 * m);
    if (p.zero()) {
        res.r = r_lo;
        res.found = true;
        res.radii = {r_lo};
        res.max_norm = {0.0};
        return res;
    }
    // beyond this radius the sampled kernel oscillates faster than the grid resolves
    res.resolved = std::pow(0.5 * p.grid.nyquist(), 2.0 * m);
    for (int k = 0; k < n_radii; ++k) {
        const double r = r_lo * std::pow(r_hi / r_lo, n_radii > 1 ? double(k) / (n_radii - 1) : 0.0);
        if (r > res.resolved) break;
        std::vector<ResolventQuery> qs;
        qs.push_back({cplx(r, 0.0), Side::plus, m, p.grid.n});
        qs.push_back({cplx(r, 0.0), Side::minus, m, p.grid.n});
        for (int a = 1; a < n_angles; ++a) qs.push_back({std::polar(r, 2.0 * pi * a / n_angles), Side::none, m, p.grid.n});
        double worst = 0.0;
        for (const auto& q : qs) {
            BSMatrix B = assemble_M(p, q, Assembly::kernel, cap);
            B.M -= Eigen::MatrixXcd::Identity(B.M.rows(), B.M.cols());
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(B.M);
            worst = std::max(worst, svd.singularValues()(0));
        }
        res.radii.push_back(r);
        res.max_norm.push_back(worst);
        if (worst <= 0.5) {
            res.r = r;
            res.found = true;
            break;
        }
    }
    return res;
}

SweepResult inv_norm_sweep(const Potential& p, int m, const std::vector<double>& lambdas,
                           const std::vector<double>& thetas, double nu, const std::vector<double>& eigen,
                           std::size_t cap) {
    SweepResult res;
    res.nu = nu;
    res.thetas = thetas;
    std::vector<double> lam;
    for (double l : lambdas) {
        bool keep = true;
        for (double e : eigen) keep = keep && std::abs(l - e) >= nu;
        if (keep)
            lam.push_back(l);
        else
            res.excluded.push_back(l);
    }
    struct Job {
        double l, t;
        int side;
    };
    std::vector<Job> jobs;
    for (double t : thetas)
        for (double l : lam)
            for (int s : {1, -1}) jobs.push_back({l, t, s});
    std::vector<SweepRow> rows(jobs.size());
    bool failed = false;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(jobs.size()); ++k) {
        const auto& j = jobs[k];
        ResolventQuery q{cplx(j.l, j.side * j.t), Side::none, m, p.grid.n};
        BSMatrix B = assemble_M(p, q, Assembly::lattice, cap);
        double s = sigma_min(B);
        if (!(s > 0.0)) {
#pragma omp atomic write
            failed = true;
        }
        rows[k] = {j.l, j.t, j.side, 1.0 / s, s, 0};
    }
    if (failed) throw std::runtime_error("inv_norm_sweep: singular M inside the swept region (spectral leak)");
    res.rows = rows;
    for (double t : thetas) {
        double sup = 0.0;
        for (const auto& r : rows)
            if (r.theta == t) sup = std::max(sup, r.norm);
        res.sup_by_theta.push_back(sup);
        res.sup = std::max(res.sup, sup);
    }
    if (thetas.size() >= 2) {
        std::vector<std::size_t> order(thetas.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return thetas[a] < thetas[b]; });
        double s0 = res.sup_by_theta[order[0]], s1 = res.sup_by_theta[order[1]];
        res.plateau = std::abs(s0 - s1) / s1;
    }
    return res;
}

double zero_sigma_min(const Potential& p, int m, std::size_t cap) {
    ResolventQuery q{cplx(0.0, 0.0), Side::none, m, p.grid.n};
    return sigma_min(assemble_M(p, q, Assembly::kernel, cap));
}

ZeroResonance detect_zero_resonance(const std::function<Potential(const GridSpec&)>& build,
                                    const std::vector<GridSpec>& ladder, int m, double tau_res, std::size_t cap) {
    ZeroResonance zr;
    for (const auto& g : ladder) zr.sigma_min.push_back(zero_sigma_min(build(g), m, cap));
    if (zr.sigma_min.empty()) return zr;
    const double last = zr.sigma_min.back();
    const bool grows = zr.sigma_min.size() >= 2 && last > 1.1 * zr.sigma_min.front();
    zr.suspect = last < tau_res && !grows;
    return zr;
}

std::vector<PointEigen> detect_point_spectrum(const Potential& p, int m, double e_lo, double e_hi,
                                              const PointSpectrumOptions& opt) {
    if (!(e_hi < 0.0) || !(e_lo < e_hi)) throw std::invalid_argument("detect_point_spectrum: interval must lie below 0");
    std::vector<PointEigen> out;
    if (p.zero()) return out;
    bool any_neg = false;
    for (double x : p.V) any_neg = any_neg || x < 0.0;
    if (!any_neg) return out;

    auto sig = [&](double E) {
        ResolventQuery q{cplx(E, 0.0), Side::none, m, p.grid.n};
        return sigma_min(assemble_M(p, q, Assembly::lattice, opt.cap));
    };
    const int ns = std::max(opt.scan, 3);
    std::vector<double> E(ns), s(ns);
    for (int i = 0; i < ns; ++i) E[i] = e_lo + (e_hi - e_lo) * i / (ns - 1);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < ns; ++i) s[i] = sig(E[i]);

    std::vector<std::pair<double, double>> brackets;
    for (int i = 0; i < ns; ++i) {
        bool left = i == 0 || s[i] <= s[i - 1];
        bool right = i == ns - 1 || s[i] <= s[i + 1];
        if (left && right) brackets.emplace_back(E[std::max(i - 1, 0)], E[std::min(i + 1, ns - 1)]);
    }
    std::vector<PointEigen> found(brackets.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(brackets.size()); ++b) {
        double a = brackets[b].first, c = brackets[b].second;
        const double d = 0.05 * opt.tol;
        while (c - a > opt.tol) {
            double mid = 0.5 * (a + c);
            if (sig(mid + d) - sig(mid - d) > 0.0)
                c = mid;
            else
                a = mid;
        }
        double e = 0.5 * (a + c);
        ResolventQuery q{cplx(e, 0.0), Side::none, m, p.grid.n};
        BSMatrix B = assemble_M(p, q, Assembly::lattice, opt.cap);
        bool sym = false;
        auto ev = symmetric_eigs(B.M, sym);
        std::vector<double> sv;
        if (sym) {
            for (double x : ev) sv.push_back(std::abs(x));
        } else {
            auto v = singular_values(B);
            sv.assign(v.data(), v.data() + v.size());
        }
        double smin = *std::min_element(sv.begin(), sv.end());
        int mult = 0;
        for (double x : sv)
            if (x < opt.accept) ++mult;
        found[b] = {e, smin, mult};
    }
    for (const auto& f : found)
        if (f.sigma_min < opt.accept) out.push_back(f);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.E < b.E; });
    return out;
}

PerturbedResolvent::PerturbedResolvent(const Potential& p, const ResolventQuery& q, std::size_t cap)
    : pot_(&p), q_(q), support_(p.support) {
    q_.n = p.grid.n;
    q_.validate();
    sym_ = resolvent_multiplier(p.grid, q_);
    if (!p.zero()) {
        BSMatrix B = assemble_M(p, q_, Assembly::lattice, cap);
        smin_ = ksl::sigma_min(B);
        if (!(smin_ > 1e-12)) throw std::domain_error("perturbed resolvent: M(z) is singular");
        lu_.compute(B.M);
    }
}

Field PerturbedResolvent::apply(const Field& f) const {
    Field u = apply_symbol(f, sym_);
    if (support_.empty()) return u;
    const Eigen::Index S = static_cast<Eigen::Index>(support_.size());
    Eigen::VectorXcd b(S);
    for (Eigen::Index i = 0; i < S; ++i) b[i] = pot_->v[support_[i]] * u.v[support_[i]];
    Eigen::VectorXcd x = lu_.solve(b);
    Field g(f.grid);
    for (Eigen::Index i = 0; i < S; ++i) g.v[support_[i]] = pot_->w[support_[i]] * x[i];
    Field corr = apply_symbol(g, sym_);
    par::axpy(-1.0, corr.v, u.v);
    return u;
}

Field perturbed_resolvent_apply(const Potential& p, const ResolventQuery& q, const Field& f) {
    return PerturbedResolvent(p, q).apply(f);
}

SupersmoothResult supersmooth_sweep(const Hamiltonian& h, double gamma, double eps, const std::vector<double>& lambdas,
                                    const std::vector<double>& thetas, bool projected,
                                    const SupersmoothOptions& opt) {
    const int m = h.m();
    const GridSpec& g = h.grid();
    if (!(gamma > m - g.n / 2.0) || gamma > m - 0.5) throw std::invalid_argument("supersmooth_sweep: gamma out of range");
    SupersmoothResult res;
    res.projected = projected;
    res.thetas = thetas;
    std::vector<double> W;
    if (gamma == m - 0.5) {
        W = bracket_weight(g, -0.5 - eps);
        res.weight = "<x>^{-1/2-eps}";
    } else {
        W = power_weight(g, -m + gamma);
        res.weight = "|x|^{-m+gamma}";
    }
    const auto Dg = radial_symbol_real(g, [gamma](double k) { return std::pow(k, gamma); });
    if (projected) negative_spectrum(h);

    auto side_op = [&](const Field& x, const PerturbedResolvent& R) {
        Field y = apply_symbol(pointwise(x, W), Dg);
        if (projected) y = projector_ac(h, y);
        y = R.apply(y);
        if (projected) y = projector_ac(h, y);
        return pointwise(apply_symbol(y, Dg), W);
    };

    for (double t : thetas) {
        double sup = 0.0;
        for (double l : lambdas) {
            for (int side : {1, -1}) {
                ResolventQuery q{cplx(l, side * t), Side::none, m, g.n};
                ResolventQuery qc{cplx(l, -side * t), Side::none, m, g.n};
                PerturbedResolvent R(h.potential(), q, opt.cap), Rc(h.potential(), qc, opt.cap);
                FieldOp A = [&](const Field& x) { return side_op(x, R); };
                FieldOp As = [&](const Field& x) { return side_op(x, Rc); };
                auto pr = power_norm(g, A, As, opt.power);
                res.rows.push_back({l, t, side, pr.norm, R.sigma_min(), pr.iterations});
                sup = std::max(sup, pr.norm);
            }
        }
        res.sup_by_theta.push_back(sup);
        res.sup = std::max(res.sup, sup);
    }
    if (thetas.size() >= 2) {
        std::vector<std::size_t> order(thetas.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return thetas[a] < thetas[b]; });
        double s0 = res.sup_by_theta[order[0]], s1 = res.sup_by_theta[order[1]];
        res.plateau = std::abs(s0 - s1) / s1;
    }
    return res;
}

}  // namespace ksl
