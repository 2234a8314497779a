#include "ksl/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

#include "ksl/kernels.hpp"

namespace ksl {

namespace {

std::uint64_t fnv(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

// out = sym * in in frequency space plus V * in; work is scratch of the same size
void apply_into(const GridSpec& g, const std::vector<double>& sym, const std::vector<double>& V,
                const std::vector<cplx>& in, std::vector<cplx>& out) {
    out = in;
    par::dft(out, g.n, g.N, -1);
    par::mul(out, sym);
    par::dft(out, g.n, g.N, +1);
    const double inv = 1.0 / static_cast<double>(in.size());
    const std::ptrdiff_t sz = in.size();
#pragma omp parallel for schedule(static) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) out[i] = out[i] * inv + V[i] * in[i];
}

}  // namespace

Hamiltonian::Hamiltonian(Potential pot, int m) : pot_(std::move(pot)), m_(m) {
    const GridSpec& g = pot_.grid;
    g.validate();
    if (m < 1) throw std::invalid_argument("hamiltonian: m must be >= 1");
    if (g.n <= 2 * m) throw std::invalid_argument("hamiltonian: requires n > 2m");
    const auto& xi2 = xi2_table(g);
    sym_.resize(xi2.size());
    double smax = 0.0;
    for (std::size_t i = 0; i < xi2.size(); ++i) {
        sym_[i] = std::pow(xi2[i], m);
        smax = std::max(smax, sym_[i]);
    }
    emin_ = std::min(0.0, pot_.min());
    emax_ = smax + std::max(0.0, pot_.max());
    fp_ = fnv(&g.n, sizeof g.n);
    fp_ = fnv(&g.N, sizeof g.N, fp_);
    fp_ = fnv(&g.L, sizeof g.L, fp_);
    fp_ = fnv(&m_, sizeof m_, fp_);
    fp_ = fnv(pot_.V.data(), pot_.V.size() * sizeof(double), fp_);
}

Field Hamiltonian::apply(const Field& f) const {
    if (f.rep != Rep::physical) throw std::invalid_argument("apply_H: field must be physical");
    if (!(f.grid == grid())) throw std::invalid_argument("apply_H: grid mismatch");
    Field out(f.grid);
    apply_into(grid(), sym_, pot_.V, f.v, out.v);
    return out;
}

void Hamiltonian::cache_eigenset(EigenSet e) const {
    if (eig_) throw std::logic_error("eigenset already cached on this Hamiltonian");
    e.fingerprint = fp_;
    eig_ = std::make_shared<const EigenSet>(std::move(e));
}

Field apply_operator(const Field& f, int m, const std::vector<double>& V) {
    if (f.rep != Rep::physical) throw std::invalid_argument("apply_operator: field must be physical");
    const auto& xi2 = xi2_table(f.grid);
    std::vector<double> sym(xi2.size());
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = std::pow(xi2[i], m);
    Field out(f.grid);
    if (V.empty()) {
        out = apply_symbol(f, sym);
    } else {
        apply_into(f.grid, sym, V, f.v, out.v);
    }
    return out;
}

EigenSet lanczos_extreme(const Hamiltonian& h, int k, Which which, const LanczosOptions& opt) {
    using Eigen::MatrixXcd;
    using Eigen::VectorXcd;
    const GridSpec& g = h.grid();
    const Eigen::Index D = static_cast<Eigen::Index>(g.size());
    if (k < 1 || k > 50) throw std::invalid_argument("lanczos: k must be in [1, 50]");
    if (k > D) throw std::invalid_argument("lanczos: k exceeds the problem size");
    const Eigen::Index b = std::min<Eigen::Index>(std::max(opt.block, 1), D);
    Eigen::Index maxdim = std::min<Eigen::Index>(opt.max_dim, D);
    maxdim = std::min<Eigen::Index>(maxdim, static_cast<Eigen::Index>(opt.mem_budget / (sizeof(cplx) * D)));
    maxdim = std::max<Eigen::Index>(maxdim, std::min<Eigen::Index>(D, k + 2 * b));
    const double sgn = which == Which::low ? 1.0 : -1.0;

    std::vector<cplx> in(D), out(D);
    auto applyH = [&](const VectorXcd& x) {
        std::copy(x.data(), x.data() + D, in.begin());
        apply_into(g, h.symbol(), h.potential().V, in, out);
        VectorXcd y(D);
        for (Eigen::Index i = 0; i < D; ++i) y[i] = sgn * out[i];
        return y;
    };

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd;
    auto random_block = [&](Eigen::Index cols) {
        MatrixXcd R(D, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index i = 0; i < D; ++i) R(i, c) = nd(rng);
        return R;
    };

    MatrixXcd Q(D, maxdim);
    MatrixXcd T = MatrixXcd::Zero(maxdim + b, maxdim + b);
    Eigen::Index dim = 0;

    // orthonormalise a block against Q[:, :dim] and itself, refilling lost columns
    auto orthonormalise = [&](MatrixXcd W, MatrixXcd& B) {
        const double scale = std::max(1.0, W.norm());
        for (int pass = 0; pass < 2 && dim > 0; ++pass) W -= Q.leftCols(dim) * (Q.leftCols(dim).adjoint() * W);
        Eigen::ColPivHouseholderQR<MatrixXcd> qr(W);
        qr.setThreshold(1e-12 * scale / std::max(1.0, W.norm()));
        const Eigen::Index rank = qr.rank();
        MatrixXcd Qn = qr.householderQ() * MatrixXcd::Identity(D, W.cols());
        MatrixXcd R = qr.matrixR().topRows(W.cols()).triangularView<Eigen::Upper>();
        B = R * qr.colsPermutation().transpose();
        for (Eigen::Index c = rank; c < W.cols(); ++c) {
            B.row(c).setZero();
            VectorXcd x = random_block(1).col(0);
            for (int pass = 0; pass < 2; ++pass) {
                if (dim > 0) x -= Q.leftCols(dim) * (Q.leftCols(dim).adjoint() * x);
                x -= Qn.leftCols(c) * (Qn.leftCols(c).adjoint() * x);
            }
            Qn.col(c) = x / x.norm();
        }
        return Qn;
    };

    MatrixXcd B0;
    MatrixXcd Qj = orthonormalise(random_block(b), B0);
    Eigen::VectorXd theta;
    MatrixXcd Y;
    bool converged = false;
    int step = 0;
    while (true) {
        const Eigen::Index c0 = dim;
        const Eigen::Index bj = Qj.cols();
        Q.middleCols(c0, bj) = Qj;
        dim += bj;
        MatrixXcd W(D, bj);
        for (Eigen::Index c = 0; c < bj; ++c) W.col(c) = applyH(Qj.col(c));
        MatrixXcd A = Qj.adjoint() * W;
        T.block(c0, c0, bj, bj) = 0.5 * (A + A.adjoint());
        const bool full = dim >= D;
        MatrixXcd B;
        MatrixXcd Qn;
        Eigen::Index bn = std::min<Eigen::Index>(b, maxdim - dim);
        if (!full && bn > 0) Qn = orthonormalise(W.leftCols(std::min(bn, bj)), B);
        ++step;
        const bool last = full || bn <= 0 || dim + bn > maxdim;
        if (dim >= k && (step % 4 == 0 || last)) {
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(T.topLeftCorner(dim, dim));
            theta = es.eigenvalues();
            Y = es.eigenvectors();
            converged = true;
            if (!full) {
                for (int i = 0; i < k; ++i) {
                    double r = (B * Y.block(dim - bj, i, B.cols(), 1)).norm();
                    if (r > opt.tol) converged = false;
                }
            }
            if (converged || last) break;
        }
        if (last) break;
        T.block(dim, c0, B.rows(), B.cols()) = B;
        T.block(c0, dim, B.cols(), B.rows()) = B.adjoint();
        Qj = Qn;
    }

    EigenSet es;
    MatrixXcd X = Q.leftCols(dim) * Y.leftCols(k);
    const double cellroot = std::sqrt(g.cell());
    for (int i = 0; i < k; ++i) {
        VectorXcd x = X.col(i);
        x /= x.norm();
        VectorXcd hx = applyH(x);
        double lam = theta[i];
        double res = (hx - lam * x).norm();
        Field f(g);
        for (Eigen::Index j = 0; j < D; ++j) f.v[j] = x[j] / cellroot;
        es.values.push_back(sgn * lam);
        es.vectors.push_back(std::move(f));
        es.residuals.push_back(res);
        if (res > 1e-8) converged = false;
    }
    es.converged = converged;
    es.fingerprint = h.fingerprint();
    es.N0 = 0;
    for (double v : es.values)
        if (v < 0.0) ++es.N0;
    return es;
}

double default_tau_neg(const Hamiltonian& h) {
    // the constant box mode is pulled slightly below 0 by an attractive V;
    // anything above a quarter of the first box level is treated as continuum
    const double box = 0.25 * std::pow(h.grid().dxi(), 2.0 * h.m());
    return std::max(1e-6 * std::max(1.0, h.potential().max_abs()), box);
}

const EigenSet& negative_spectrum(const Hamiltonian& h, int k_cap, const LanczosOptions& opt, double tau_neg) {
    if (const EigenSet* e = h.eigenset()) {
        if (e->fingerprint != h.fingerprint()) throw std::logic_error("stale eigenset");
        return *e;
    }
    const double tau = tau_neg < 0.0 ? default_tau_neg(h) : tau_neg;
    EigenSet out;
    out.fingerprint = h.fingerprint();
    if (h.potential().min() < -tau) {
        const int D = static_cast<int>(h.grid().size());
        int k = std::min({8, k_cap, D});
        while (true) {
            EigenSet es = lanczos_extreme(h, k, Which::low, opt);
            int count = 0;
            for (double v : es.values)
                if (v < -tau) ++count;
            if (count < k || k >= D) {
                for (std::size_t i = 0; i < es.values.size(); ++i) {
                    if (es.values[i] < -tau) {
                        out.values.push_back(es.values[i]);
                        out.vectors.push_back(std::move(es.vectors[i]));
                        out.residuals.push_back(es.residuals[i]);
                    }
                }
                out.converged = es.converged;
                break;
            }
            if (k >= k_cap) throw std::runtime_error("negative_spectrum: count exceeds the k-cap");
            k = std::min({2 * k, k_cap, D});
        }
    }
    out.N0 = static_cast<int>(out.values.size());
    h.cache_eigenset(std::move(out));
    return *h.eigenset();
}

ClrResult clr_check(const Hamiltonian& h, double C) {
    ClrResult r;
    r.N0 = negative_spectrum(h).N0;
    r.integral = clr_integral(h.potential(), h.m());
    r.bound = C * r.integral;
    r.pass = r.N0 <= r.bound;
    return r;
}

RepulsiveResult repulsive_check(const Potential& p, double tau_grad) {
    RepulsiveResult r;
    const GridSpec& g = p.grid;
    const double tau = tau_grad < 0.0 ? 1e-6 * std::max(1.0, p.max_abs()) : tau_grad;
    // exact samples when the family provides them; spectral differentiation rings on coarse grids
    std::vector<double> xg = p.xgradV;
    Field V(g);
    if (xg.empty()) {
        xg.assign(g.size(), 0.0);
        for (std::size_t i = 0; i < V.size(); ++i) V.v[i] = p.V[i];
    }
    for (int a = 0; a < g.n && p.xgradV.empty(); ++a) {
        Field d = apply_multiplier(V, [a](std::span<const double> xi) { return cplx(0.0, xi[a]); });
        Field xa = sample(g, [a](std::span<const double> x) { return cplx(x[a], 0.0); });
        for (std::size_t i = 0; i < xg.size(); ++i) xg[i] += xa.v[i].real() * d.v[i].real();
    }
    r.max_xgradV = *std::max_element(xg.begin(), xg.end());
    r.min_V = p.min();
    r.repulsive = r.max_xgradV <= tau;
    r.nonneg = r.min_V >= -tau;
    return r;
}

Field projector_ac(const Hamiltonian& h, const Field& f) {
    const EigenSet* e = h.eigenset();
    if (!e) throw std::logic_error("projector_ac: negative_spectrum has not been computed");
    if (e->fingerprint != h.fingerprint()) throw std::logic_error("projector_ac: stale eigenset");
    Field out = f;
    for (const auto& psi : e->vectors) {
        cplx c = inner(psi, f);
        par::axpy(-c, psi.v, out.v);
    }
    return out;
}

double energy(const Hamiltonian& h, const Field& f) { return std::real(inner(f, h.apply(f))); }

Field chebyshev_step(const Hamiltonian& h, const Field& f, double dt, const PropagateOptions& opt) {
    if (dt == 0.0) return f;
    const GridSpec& g = h.grid();
    double emin = h.e_min(), emax = h.e_max();
    const double pad = 1e-3 * std::max(1.0, emax - emin);
    emin -= pad;
    emax += pad;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const double a = 0.5 * (emax - emin), c = 0.5 * (emax + emin);
        const int nsub = std::max(1, static_cast<int>(std::ceil(a * std::abs(dt) / opt.max_phase)));
        const double tau = dt / nsub;
        const double x = a * std::abs(tau);
        std::vector<double> J;
        for (int kk = 0;; ++kk) {
            J.push_back(std::cyl_bessel_j(static_cast<double>(kk), x));
            if (kk > x + 10 && std::abs(J[kk]) < 1e-3 * opt.tol && std::abs(J[kk - 1]) < 1e-3 * opt.tol) break;
        }
        const int K = static_cast<int>(J.size());
        std::vector<cplx> coef(K);
        const cplx I(0.0, 1.0);
        cplx ik = 1.0;
        for (int kk = 0; kk < K; ++kk) {
            double jk = J[kk] * ((tau < 0.0 && (kk & 1)) ? -1.0 : 1.0);
            coef[kk] = (kk == 0 ? 1.0 : 2.0) * ik * jk;
            ik *= I;
        }
        const std::size_t D = f.size();
        const double nf = std::sqrt(par::sum_abs_pow(f.v, 2.0));
        std::vector<cplx> cur = f.v, prev(D), next(D), acc(D), hv(D);
        bool ok = true;
        for (int s = 0; s < nsub && ok; ++s) {
            std::vector<cplx> t0 = cur;
            std::fill(acc.begin(), acc.end(), cplx(0.0));
            par::axpy(coef[0], t0, acc);
            apply_into(g, h.symbol(), h.potential().V, t0, hv);
            std::vector<cplx> t1(D);
            for (std::size_t i = 0; i < D; ++i) t1[i] = (hv[i] - c * t0[i]) / a;
            if (K > 1) par::axpy(coef[1], t1, acc);
            prev = std::move(t0);
            cur = std::move(t1);
            for (int kk = 2; kk < K; ++kk) {
                apply_into(g, h.symbol(), h.potential().V, cur, hv);
                const std::ptrdiff_t sz = D;
#pragma omp parallel for schedule(static) if (sz > 4096)
                for (std::ptrdiff_t i = 0; i < sz; ++i) next[i] = 2.0 * (hv[i] - c * cur[i]) / a - prev[i];
                par::axpy(coef[kk], next, acc);
                std::swap(prev, cur);
                std::swap(cur, next);
                if ((kk & 15) == 0 && std::sqrt(par::sum_abs_pow(cur, 2.0)) > 1.5 * nf) {
                    ok = false;
                    break;
                }
            }
            const cplx ph = std::polar(1.0, c * tau);
            for (std::size_t i = 0; i < D; ++i) acc[i] *= ph;
            cur = acc;
        }
        if (ok) {
            Field out(g);
            out.v = std::move(cur);
            return out;
        }
        // spectral bounds were too tight: widen and retry
        const double mid = 0.5 * (emax + emin), half = 0.75 * (emax - emin);
        emin = mid - half;
        emax = mid + half;
    }
    throw std::runtime_error("chebyshev_step: spectral bound estimate violated");
}

namespace {

void check_times(const std::vector<double>& times) {
    double prev = 0.0;
    int sign = 0;
    for (double t : times) {
        int s = t > 0 ? 1 : (t < 0 ? -1 : 0);
        if (s != 0) {
            if (sign != 0 && s != sign) throw std::invalid_argument("times must share one sign");
            sign = s;
        }
        if (std::abs(t) < std::abs(prev)) throw std::invalid_argument("times must be sorted by |t|");
        prev = t;
    }
}

}  // namespace

void propagate_each(const Hamiltonian& h, const Field& psi0, const std::vector<double>& times, const TrajectoryFn& cb,
                    const PropagateOptions& opt) {
    check_times(times);
    Field psi = psi0;
    double t = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        psi = chebyshev_step(h, psi, times[i] - t, opt);
        t = times[i];
        cb(i, t, psi);
    }
}

std::vector<Field> propagate(const Hamiltonian& h, const Field& psi0, const std::vector<double>& times,
                             const PropagateOptions& opt) {
    std::vector<Field> out;
    propagate_each(h, psi0, times, [&](std::size_t, double, const Field& f) { out.push_back(f); }, opt);
    return out;
}

void duhamel_each(const Hamiltonian& h, const std::function<Field(double)>& F, const std::vector<double>& times,
                  int substeps, const TrajectoryFn& cb, const PropagateOptions& opt) {
    if (substeps < 1) throw std::invalid_argument("duhamel: substeps must be >= 1");
    check_times(times);
    const cplx I(0.0, 1.0);
    Field u(h.grid());
    double s = 0.0;
    Field Fs = F(0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double dt = (times[i] - s) / substeps;
        for (int j = 0; j < substeps && dt != 0.0; ++j) {
            Field tmp = u;
            par::axpy(I * (0.5 * dt), Fs.v, tmp.v);
            u = chebyshev_step(h, tmp, dt, opt);
            s += dt;
            Fs = F(s);
            par::axpy(I * (0.5 * dt), Fs.v, u.v);
        }
        s = times[i];
        cb(i, s, u);
    }
}

std::vector<Field> duhamel(const Hamiltonian& h, const std::function<Field(double)>& F, const std::vector<double>& times,
                           int substeps, const PropagateOptions& opt) {
    std::vector<Field> out;
    duhamel_each(h, F, times, substeps, [&](std::size_t, double, const Field& f) { out.push_back(f); }, opt);
    return out;
}

}  // namespace ksl
