#include <cmath>

#include "doctest.h"
#include "ksl/birman.hpp"
#include "ksl/linalg.hpp"
#include "oracles.hpp"

using namespace ksl;

namespace {

const GridSpec kSmall{3, 8, 4.0};

Potential well(const GridSpec& g, double depth = 10.0) { return gaussian_well(g, depth, 1.5); }

// ||(H - z) u - f|| / ||f||
double solve_residual(const Hamiltonian& h, cplx z, const Field& f, const Field& u) {
    Field r = h.apply(u) - z * u;
    return norm_l2(r - f) / norm_l2(f);
}

}  // namespace

TEST_CASE("V = 0 gives M = I and no point spectrum") {
    Potential p = zero_potential(kSmall);
    BSMatrix B = assemble_M(p, {cplx(-1.0, 0.0), Side::none, 1, 3});
    CHECK(B.M.rows() == 0);
    CHECK(sigma_min(B) == 1.0);
    CHECK(inverse_norm(B) == 1.0);
    CHECK(detect_point_spectrum(p, 1, -5.0, -0.1).empty());
    CHECK(zero_sigma_min(p, 1) == 1.0);
    auto sw = inv_norm_sweep(p, 1, {-2.0, -1.0, -0.5}, {0.1, 0.01}, 0.05, {});
    for (const auto& r : sw.rows) CHECK(r.norm == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sw.plateau == doctest::Approx(0.0));
}

TEST_CASE("nonnegative V gives a Hermitian M bounded below by I") {
    Potential p = gaussian_bump(kSmall, 3.0, 1.2);
    BSMatrix B = assemble_M(p, {cplx(-1.0, 0.0), Side::none, 1, 3});
    CHECK((B.M - B.M.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sigma_min(B) >= 1.0 - 1e-12);
    CHECK(detect_point_spectrum(p, 1, -5.0, -0.1).empty());
}

TEST_CASE("kernel assembly is complex symmetric for sign-definite V") {
    Potential p = well(kSmall);
    BSMatrix B = assemble_M(p, {cplx(-0.5, 0.7), Side::none, 1, 3}, Assembly::kernel);
    CHECK((B.M - B.M.transpose()).cwiseAbs().maxCoeff() < 1e-12 * B.M.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(assemble_M(p, {cplx(1.0, 0.0), Side::plus, 1, 3}, Assembly::lattice), std::invalid_argument);
    CHECK_NOTHROW(assemble_M(p, {cplx(1.0, 0.0), Side::plus, 1, 3}, Assembly::kernel));
    CHECK_THROWS_AS(assemble_M(p, {cplx(-1.0, 0.0), Side::none, 1, 3}, Assembly::lattice, 5), std::invalid_argument);
}

TEST_CASE("M is singular exactly at the Lanczos eigenvalues") {
    Potential p = well(kSmall);
    Hamiltonian h(p, 1);
    const auto& es = negative_spectrum(h);
    REQUIRE(es.N0 >= 2);
    CHECK(es.values[0] == doctest::Approx(oracle::kWellGround).epsilon(1e-8));
    CHECK(es.values[1] == doctest::Approx(oracle::kWellSecond).epsilon(1e-8));
    CHECK(sigma_min(assemble_M(p, {cplx(es.values[0], 0.0), Side::none, 1, 3})) < 1e-8);
    CHECK(sigma_min(assemble_M(p, {cplx(0.5 * (es.values[0] + es.values[1]), 0.0), Side::none, 1, 3})) > 1e-2);

    const auto found = detect_point_spectrum(p, 1, 1.001 * p.min(), -default_tau_neg(h));
    int count = 0;
    for (const auto& e : found) count += e.multiplicity;
    CHECK(count == es.N0);
    CHECK(found.front().E == doctest::Approx(es.values[0]).epsilon(1e-6));
    // the second level is threefold degenerate by symmetry
    CHECK(found[1].multiplicity == 3);
    CHECK(found[1].E == doctest::Approx(es.values[1]).epsilon(1e-6));
}

TEST_CASE("inverse-norm sweep drops eigenvalue neighbourhoods") {
    Potential p = well(kSmall);
    Hamiltonian h(p, 1);
    const auto& es = negative_spectrum(h);
    std::vector<double> lam{-4.0, es.values[0] + 0.01, -3.0};
    auto sw = inv_norm_sweep(p, 1, lam, {0.1, 0.03}, 0.05, es.values);
    REQUIRE(sw.excluded.size() == 1);
    CHECK(sw.excluded[0] == lam[1]);
    CHECK(sw.rows.size() == 2 * 2 * 2);
    CHECK(std::isfinite(sw.sup));
    // closer to the axis the norm cannot shrink at a fixed lambda below the spectrum
    CHECK(sw.sup_by_theta[1] >= sw.sup_by_theta[0] * (1.0 - 1e-12));
}

TEST_CASE("perturbed resolvent solves (H - z) u = f") {
    Potential p = well(kSmall);
    Hamiltonian h(p, 1);
    const Field f = random_field(kSmall, 5);
    for (cplx z : {cplx(-1.0, 1.0), cplx(2.0, -0.5), cplx(-6.0, 0.0)}) {
        PerturbedResolvent R(p, {z, Side::none, 1, 3});
        CHECK(solve_residual(h, z, f, R.apply(f)) < 1e-8);
    }
    CHECK_THROWS_AS(PerturbedResolvent(p, {cplx(negative_spectrum(h).values[0], 0.0), Side::none, 1, 3}),
                    std::domain_error);
}

TEST_CASE("perturbed resolvent identities") {
    Potential p = well(kSmall, 4.0);
    const Field f = random_field(kSmall, 1), g = random_field(kSmall, 2, false);
    const cplx z1(-1.0, 0.5), z2(0.7, -1.2);
    PerturbedResolvent R1(p, {z1, Side::none, 1, 3}), R2(p, {z2, Side::none, 1, 3});
    // R(z1) - R(z2) = (z1 - z2) R(z1) R(z2)
    Field lhs = R1.apply(f) - R2.apply(f);
    Field rhs = (z1 - z2) * R1.apply(R2.apply(f));
    CHECK(norm_l2(lhs - rhs) < 1e-10 * norm_l2(lhs));
    // <g, R(z) f> = <R(conj z) g, f>
    PerturbedResolvent R1c(p, {std::conj(z1), Side::none, 1, 3});
    const cplx a = inner(g, R1.apply(f)), b = inner(R1c.apply(g), f);
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    // V = 0 reduces to the free lattice resolvent
    Potential zero = zero_potential(kSmall);
    Field u = PerturbedResolvent(zero, {z1, Side::none, 1, 3}).apply(f);
    Field u0 = apply_free_resolvent(f, {z1, Side::none, 1, 3});
    CHECK(norm_l2(u - u0) < 1e-14 * norm_l2(u0));
}

TEST_CASE("Neumann threshold") {
    Potential weak = gaussian_bump(kSmall, 0.5, 1.0), strong = gaussian_bump(kSmall, 1.0, 1.0);
    auto a = neumann_threshold(weak, 1, 1e-2, 1e4, 12, 8);
    auto b = neumann_threshold(strong, 1, 1e-2, 1e4, 12, 8);
    REQUIRE(a.found);
    REQUIRE(b.found);
    CHECK(a.max_norm.back() <= 0.5);
    // the Neumann series converges with ratio 1/2 or better, so ||M^{-1}|| <= 2 beyond r
    BSMatrix B = assemble_M(weak, {cplx(0.0, a.r), Side::none, 1, 3}, Assembly::kernel);
    CHECK(inverse_norm(B) <= 2.0 + 1e-12);
    // a larger coupling never needs a smaller radius
    CHECK(b.r >= a.r);
    auto z = neumann_threshold(zero_potential(kSmall), 1, 1e-2, 1e4);
    CHECK(z.found);
    CHECK(z.r == 1e-2);
    CHECK_THROWS_AS(neumann_threshold(weak, 1, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("zero-energy resonance check") {
    auto build_zero = [](const GridSpec& g) { return zero_potential(g); };
    auto zr = detect_zero_resonance(build_zero, {GridSpec{3, 8, 4.0}, GridSpec{3, 12, 4.0}}, 1);
    CHECK_FALSE(zr.suspect);
    for (double s : zr.sigma_min) CHECK(s == 1.0);
    // a repulsive bump keeps M(0) = I + v (-Delta)^{-1} v away from singular
    auto build_bump = [](const GridSpec& g) { return gaussian_bump(g, 2.0, 1.0); };
    auto zb = detect_zero_resonance(build_bump, {GridSpec{3, 8, 4.0}, GridSpec{3, 12, 4.0}}, 1);
    CHECK_FALSE(zb.suspect);
    for (double s : zb.sigma_min) CHECK(s >= 1.0 - 1e-12);
}

TEST_CASE("point-spectrum search validates its interval") {
    Potential p = well(kSmall);
    CHECK_THROWS_AS(detect_point_spectrum(p, 1, -1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(detect_point_spectrum(p, 1, -1.0, -2.0), std::invalid_argument);
}

TEST_CASE("supersmoothing sweep on a nonnegative potential") {
    Hamiltonian h(gaussian_bump(kSmall, 2.0, 1.0), 1);
    SupersmoothOptions so;
    so.power.max_iter = 30;
    auto r = supersmooth_sweep(h, 0.0, 0.1, {-1.0, -0.5}, {0.1, 0.03}, true, so);
    CHECK(r.weight == "|x|^{-m+gamma}");
    CHECK(r.rows.size() == 8);
    CHECK(std::isfinite(r.sup));
    auto e = supersmooth_sweep(h, 0.5, 0.1, {-1.0}, {0.1}, false, so);
    CHECK(e.weight == "<x>^{-1/2-eps}");
    CHECK_THROWS_AS(supersmooth_sweep(h, 0.7, 0.1, {-1.0}, {0.1}, false, so), std::invalid_argument);
    CHECK_THROWS_AS(supersmooth_sweep(h, -0.6, 0.1, {-1.0}, {0.1}, false, so), std::invalid_argument);
}
