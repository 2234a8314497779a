#include <cmath>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "ksl/linalg.hpp"
#include "ksl/probes.hpp"
#include "ksl/spectral.hpp"
#include "oracles.hpp"

using namespace ksl;

namespace {

const GridSpec kTiny{3, 4, 2.0};

Field from_vec(const GridSpec& g, const Eigen::VectorXcd& x) {
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f.v[i] = x[static_cast<Eigen::Index>(i)];
    return f;
}

double rel(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("Hamiltonian preconditions") {
    CHECK_THROWS_AS(Hamiltonian(zero_potential(GridSpec{3, 8, 4.0}), 2), std::invalid_argument);
    CHECK_THROWS_AS(Hamiltonian(zero_potential(GridSpec{3, 8, 4.0}), 0), std::invalid_argument);
    Hamiltonian h(zero_potential(GridSpec{3, 8, 4.0}), 1);
    CHECK_THROWS_AS(h.apply(Field(GridSpec{3, 8, 4.0}, Rep::frequency)), std::invalid_argument);
    CHECK_THROWS_AS(h.apply(Field(GridSpec{3, 8, 5.0})), std::invalid_argument);
    Hamiltonian a(gaussian_well(kTiny, 2.0, 1.0), 1), b(gaussian_well(kTiny, 2.5, 1.0), 1);
    CHECK(a.fingerprint() != b.fingerprint());
    CHECK(a.e_min() <= a.potential().min());
}

TEST_CASE("matvec, eigenvalues and propagation match dense matrices") {
    Potential p = gaussian_well(kTiny, 6.0, 1.0);
    Hamiltonian h(p, 1);
    const Eigen::MatrixXcd H = dense::hamiltonian(kTiny, 1, p.V);
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    const Field f = random_field(kTiny, 3, false);
    CHECK(rel(dense::to_vec(h.apply(f)), H * dense::to_vec(f)) < 1e-12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const auto lo = lanczos_extreme(h, 4, Which::low);
    const auto hi = lanczos_extreme(h, 2, Which::high);
    CHECK(lo.converged);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(lo.values[i] - es.eigenvalues()[i]) < 1e-8);
    const auto D = es.eigenvalues().size();
    CHECK(std::abs(hi.values[0] - es.eigenvalues()[D - 1]) < 1e-8 * es.eigenvalues()[D - 1]);
    CHECK(std::abs(hi.values[1] - es.eigenvalues()[D - 2]) < 1e-8 * es.eigenvalues()[D - 1]);
    CHECK(h.e_min() <= es.eigenvalues()[0] + 1e-12);
    CHECK(h.e_max() >= es.eigenvalues()[D - 1] - 1e-12);

    const auto traj = propagate(h, f, {0.5, 1.0, 3.0});
    CHECK(rel(dense::to_vec(traj[0]), dense::propagate(H, dense::to_vec(f), 0.5)) < 1e-8);
    CHECK(rel(dense::to_vec(traj[1]), dense::propagate(H, dense::to_vec(f), 1.0)) < 1e-8);
    CHECK(rel(dense::to_vec(traj[2]), dense::propagate(H, dense::to_vec(f), 3.0)) < 1e-8);
    const auto back = propagate(h, f, {-2.0});
    CHECK(rel(dense::to_vec(back[0]), dense::propagate(H, dense::to_vec(f), -2.0)) < 1e-8);
}

TEST_CASE("Lanczos on the Gaussian well reproduces the reference levels") {
    Hamiltonian h(gaussian_well(GridSpec{3, 8, 4.0}, 10.0, 1.5), 1);
    const auto& es = negative_spectrum(h);
    CHECK(es.converged);
    CHECK(es.N0 == static_cast<int>(es.values.size()));
    CHECK(es.values[0] == doctest::Approx(oracle::kWellGround).epsilon(1e-8));
    CHECK(es.values[1] == doctest::Approx(oracle::kWellSecond).epsilon(1e-8));
    for (double r : es.residuals) CHECK(r < 1e-8);
    // eigenvectors are orthonormal in the grid L2 inner product
    for (std::size_t i = 0; i < es.vectors.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            CHECK(std::abs(inner(es.vectors[i], es.vectors[j]) - (i == j ? 1.0 : 0.0)) < 1e-9);
    // second call hits the cache
    CHECK(&negative_spectrum(h) == &es);
    CHECK_THROWS_AS(h.cache_eigenset(EigenSet{}), std::logic_error);
}

TEST_CASE("H is symmetric and plane waves diagonalise the free part") {
    const GridSpec g{5, 8, 3.0};
    Hamiltonian h(gaussian_bump(g, 1.5, 1.0), 2);
    const Field f = random_field(g, 1, false), u = random_field(g, 2, false);
    const cplx a = inner(f, h.apply(u)), b = inner(h.apply(f), u);
    CHECK(std::abs(a - b) < 1e-11 * std::abs(a));
    CHECK(energy(h, f) >= 0.0);

    Hamiltonian free(zero_potential(g), 2);
    const int k[5] = {1, -2, 0, 3, 1};
    Field e = plane_wave(g, k);
    double xi2 = 0.0;
    for (int c : k) xi2 += std::pow(c * g.dxi(), 2);
    Field he = free.apply(e);
    CHECK(norm_l2(he - cplx(xi2 * xi2) * e) < 1e-10 * xi2 * xi2 * norm_l2(e));
}

TEST_CASE("negative spectrum counts and the repulsive check") {
    const GridSpec g{3, 8, 4.0};
    Hamiltonian free(zero_potential(g), 1);
    CHECK(negative_spectrum(free).N0 == 0);
    Hamiltonian bump(gaussian_bump(g, 2.0, 1.0), 1);
    CHECK(negative_spectrum(bump).N0 == 0);
    const auto rb = repulsive_check(bump.potential());
    CHECK(rb.repulsive);
    CHECK(rb.nonneg);
    const auto rw = repulsive_check(gaussian_well(g, 2.0, 1.0));
    CHECK_FALSE(rw.repulsive);
    CHECK_FALSE(rw.nonneg);
    // spectral differentiation of the bare samples agrees with the exact x . grad V on a fine grid
    const GridSpec fine{3, 32, 6.0};
    const Potential exact = gaussian_bump(fine, 2.0, 1.0);
    const Potential bare = Potential::from_values(fine, exact.V);
    REQUIRE(bare.xgradV.empty());
    CHECK(repulsive_check(bare).max_xgradV == doctest::Approx(repulsive_check(exact).max_xgradV).epsilon(1e-6));
    CHECK(repulsive_check(bare).repulsive);
    // on a coarse n = 5 grid the spectral derivative rings, the exact samples do not
    const Potential coarse = gaussian_bump(GridSpec{5, 12, 16.32}, 1.0, 2.0);
    CHECK(repulsive_check(coarse).repulsive);
    CHECK(repulsive_check(coarse.scaled(0.5)).repulsive);
    CHECK_FALSE(repulsive_check(Potential::from_values(coarse.grid, coarse.V)).repulsive);
    // the box floor keeps the shifted constant mode out of the count
    CHECK(default_tau_neg(free) == doctest::Approx(0.25 * std::pow(g.dxi(), 2)));
}

TEST_CASE("CLR bookkeeping") {
    const GridSpec g{3, 8, 4.0};
    Hamiltonian h(gaussian_well(g, 10.0, 1.5), 1);
    const double I = clr_integral(h.potential(), 1);
    CHECK(I > 0.0);
    const int N0 = negative_spectrum(h).N0;
    auto ok = clr_check(h, N0 / I);
    CHECK(ok.pass);
    CHECK(ok.N0 == N0);
    CHECK(ok.bound == doctest::Approx(N0));
    auto bad = clr_check(h, 0.5 * N0 / I);
    CHECK_FALSE(bad.pass);
    // N0 is nondecreasing along a coupling ladder
    int prev = 0;
    for (double c : {0.25, 0.5, 1.0, 2.0}) {
        Hamiltonian hc(gaussian_well(g, 10.0, 1.5, c), 1);
        const int n0 = negative_spectrum(hc).N0;
        CHECK(n0 >= prev);
        prev = n0;
    }
}

TEST_CASE("continuous-spectrum projector") {
    const GridSpec g{3, 8, 4.0};
    Hamiltonian h(gaussian_well(g, 10.0, 1.5), 1);
    const Field f = random_field(g, 4, false);
    CHECK_THROWS_AS(projector_ac(h, f), std::logic_error);
    const auto& es = negative_spectrum(h);
    const Field pf = projector_ac(h, f);
    CHECK(norm_l2(projector_ac(h, pf) - pf) < 1e-10 * norm_l2(f));
    for (const auto& v : es.vectors) {
        CHECK(std::abs(inner(v, pf)) < 1e-10 * norm_l2(f));
        CHECK(norm_l2(projector_ac(h, v)) < 1e-8);
    }
    // P_ac commutes with the propagator
    const auto a = propagate(h, pf, {1.0}).front();
    const auto b = projector_ac(h, propagate(h, f, {1.0}).front());
    CHECK(norm_l2(a - b) < 1e-8 * norm_l2(f));
    // with no bound states it is the identity
    Hamiltonian bump(gaussian_bump(g, 2.0, 1.0), 1);
    negative_spectrum(bump);
    CHECK(norm_l2(projector_ac(bump, f) - f) == 0.0);
}

TEST_CASE("propagator integrity for m = 2, n = 5") {
    const GridSpec g{5, 8, 8.0};
    Hamiltonian h(gaussian_bump(g, 1.0, 2.0), 2);
    const Field psi = packet_samples(g, 1, 9).front();
    const double n0 = norm_l2(psi), e0 = energy(h, psi);
    std::vector<double> times{1.0, 2.5, 5.0, 10.0};
    const auto traj = propagate(h, psi, times);
    for (const auto& u : traj) {
        CHECK(std::abs(norm_l2(u) - n0) < 1e-10 * n0);
        CHECK(std::abs(energy(h, u) - e0) < 1e-8 * e0);
    }
    // group law
    const auto half = propagate(h, traj[1], {2.5}).front();
    CHECK(norm_l2(half - traj[2]) < 1e-9 * n0);
    // free evolution equals the exact multiplier
    Hamiltonian free(zero_potential(g), 2);
    const auto ft = propagate(free, psi, {10.0}).front();
    std::vector<cplx> mult(free.symbol().size());
    for (std::size_t k = 0; k < mult.size(); ++k) mult[k] = std::polar(1.0, 10.0 * free.symbol()[k]);
    CHECK(norm_l2(ft - apply_symbol(psi, mult)) < 1e-8 * n0);

    CHECK_THROWS_AS(propagate(h, psi, {1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(propagate(h, psi, {2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("Duhamel integral") {
    Potential p = gaussian_well(kTiny, 3.0, 1.0);
    Hamiltonian h(p, 1);
    const Eigen::MatrixXcd H = dense::hamiltonian(kTiny, 1, p.V);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Field g = random_field(kTiny, 8);
    // constant forcing: u(t) = i int_0^t e^{i(t-s)H} g ds = sum_j (e^{it l_j} - 1) / l_j P_j g
    auto exact = [&](double t) {
        Eigen::VectorXcd c = es.eigenvectors().adjoint() * dense::to_vec(g);
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            const double l = es.eigenvalues()[j];
            c[j] *= std::abs(l) > 1e-12 ? (std::polar(1.0, t * l) - 1.0) / l : cplx(0.0, t);
        }
        return Eigen::VectorXcd(es.eigenvectors() * c);
    };
    auto F = [&](double) { return g; };
    const auto u = duhamel(h, F, {0.5, 1.0}, 2000);
    CHECK(rel(dense::to_vec(u[0]), exact(0.5)) < 1e-5);
    CHECK(rel(dense::to_vec(u[1]), exact(1.0)) < 1e-5);
    // second-order convergence of the trapezoid rule
    const auto c1 = duhamel(h, F, {1.0}, 50).front(), c2 = duhamel(h, F, {1.0}, 100).front();
    const double e1 = rel(dense::to_vec(c1), exact(1.0)), e2 = rel(dense::to_vec(c2), exact(1.0));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));

    // the integral with this sign solves i u' + H u = -F
    const double t = 1.0, d = 1e-5;
    const Eigen::VectorXcd du = (exact(t + d) - exact(t - d)) / (2.0 * d);
    const Eigen::VectorXcd lhs = cplx(0.0, 1.0) * du + H * exact(t);
    CHECK((lhs + dense::to_vec(g)).norm() < 1e-5 * dense::to_vec(g).norm());

    CHECK_THROWS_AS(duhamel(h, F, {1.0}, 0), std::invalid_argument);
}

TEST_CASE("Duhamel with time-dependent forcing is linear in F") {
    const GridSpec g{3, 8, 4.0};
    Hamiltonian h(gaussian_bump(g, 1.0, 1.0), 1);
    const Field a = random_field(g, 1), b = random_field(g, 2);
    auto Fa = [&](double s) { return cplx(std::sin(s)) * a; };
    auto Fb = [&](double s) { return cplx(s * s) * b; };
    auto Fab = [&](double s) { return Fa(s) + cplx(2.0) * Fb(s); };
    const auto ua = duhamel(h, Fa, {1.0}, 8).front(), ub = duhamel(h, Fb, {1.0}, 8).front();
    const auto uab = duhamel(h, Fab, {1.0}, 8).front();
    CHECK(norm_l2(uab - (ua + cplx(2.0) * ub)) < 1e-9 * norm_l2(uab));
}
