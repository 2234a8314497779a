#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "ksl/grid.hpp"
#include "ksl/kernels.hpp"
#include "ksl/linalg.hpp"
#include "oracles.hpp"

using namespace ksl;

namespace {

double rel_diff(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a.v[i] - b.v[i]);
        den += std::norm(b.v[i]);
    }
    return std::sqrt(num / den);
}

// f^_k = (2 pi)^{-n/2} h^n sum_j f_j e^{-i xi_k . x_j}
Field brute_dft(const Field& f, int sign) {
    const GridSpec& g = f.grid;
    Field out(g, sign < 0 ? Rep::frequency : Rep::physical);
    std::vector<int> a(g.n), b(g.n);
    const double c = (sign < 0 ? g.cell() : g.fcell()) / std::pow(2.0 * pi, g.n / 2.0);
    for (std::size_t k = 0; k < f.size(); ++k) {
        multi_index(g, k, a.data());
        cplx s = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            multi_index(g, j, b.data());
            double ph = 0.0;
            for (int d = 0; d < g.n; ++d) {
                // the physical index is j, the frequency index is k (signed)
                if (sign < 0)
                    ph += g.dxi() * signed_index(a[d], g.N) * coord(g, b[d]);
                else
                    ph += g.dxi() * signed_index(b[d], g.N) * coord(g, a[d]);
            }
            s += f.v[j] * std::polar(1.0, sign * ph);
        }
        out.v[k] = c * s;
    }
    return out;
}

Field gaussian(const GridSpec& g, double sigma) {
    return sample_radial(g, [&](double r) { return std::exp(-r * r / (2.0 * sigma * sigma)); });
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS((GridSpec{3, 5, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{3, 2, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{4, 8, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{3, 8, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{5, 64, 1.0}.validate(std::size_t(1) << 20)), std::invalid_argument);
    CHECK_NOTHROW((GridSpec{3, 8, 1.0}.validate()));
    GridSpec g{3, 8, 2.0};
    CHECK(g.h() == doctest::Approx(0.5));
    CHECK(g.dxi() == doctest::Approx(pi / 2.0));
}

TEST_CASE("representation tags are enforced") {
    GridSpec g{3, 4, 1.0};
    Field f(g);
    CHECK_THROWS_AS(inverse_transform(f), std::invalid_argument);
    CHECK_THROWS_AS(forward_transform(forward_transform(f)), std::invalid_argument);
    CHECK_THROWS_AS(norm_lp(forward_transform(f), 2.0), std::invalid_argument);
    CHECK_THROWS_AS(norm_lp(f, 0.5), std::invalid_argument);
}

TEST_CASE("plane wave transforms to a single lattice point") {
    GridSpec g{3, 8, 3.0};
    const int k[3] = {1, -2, 3};
    Field F = forward_transform(plane_wave(g, k));
    const std::size_t at = linear_index(g, k);
    double off = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i)
        if (i != at) off = std::max(off, std::abs(F.v[i]));
    CHECK(off < 1e-12 * std::abs(F.v[at]));
    CHECK(norm_l2(F) == doctest::Approx(norm_l2(plane_wave(g, k))).epsilon(1e-12));
}

TEST_CASE("unitarity and round trip") {
    for (GridSpec g : {GridSpec{3, 8, 2.0}, GridSpec{5, 6, 1.5}}) {
        Field f = random_field(g, 5, false);
        Field F = forward_transform(f);
        CHECK(std::abs(norm_l2(F) - norm_l2(f)) < 1e-12 * norm_l2(f));
        CHECK(rel_diff(inverse_transform(F), f) < 1e-12);
    }
}

TEST_CASE("brute-force DFT oracle, n = 3, N = 4") {
    GridSpec g{3, 4, 1.3};
    Field f = random_field(g, 17, false);
    CHECK(rel_diff(forward_transform(f), brute_dft(f, -1)) < 1e-12);
    Field F = random_field(g, 18, false);
    F.rep = Rep::frequency;
    CHECK(rel_diff(inverse_transform(F), brute_dft(F, +1)) < 1e-12);
}

TEST_CASE("delta at zero frequency is a constant field") {
    GridSpec g{3, 6, 2.0};
    Field F(g, Rep::frequency);
    F.v[0] = 1.0;
    Field f = inverse_transform(F);
    for (const auto& v : f.v) CHECK(std::abs(v - f.v[0]) < 1e-14);
    CHECK(std::abs(f.v[0]) > 0.0);
}

TEST_CASE("multiplier algebra") {
    GridSpec g{3, 8, 4.0};
    Field f = random_field(g, 3, false);
    Field id = apply_radial_multiplier(f, [](double) { return cplx(1.0); });
    CHECK(rel_diff(id, f) < 1e-12);
    const cplx z(-1.0, 0.0);
    Field a = apply_radial_multiplier(f, [&](double k) { return std::pow(k, 4) - z; });
    Field b = apply_radial_multiplier(a, [&](double k) { return 1.0 / (std::pow(k, 4) - z); });
    CHECK(rel_diff(b, f) < 1e-12);
    auto s1 = [](double k) { return cplx(std::exp(-k), k); };
    auto s2 = [](double k) { return cplx(1.0 + k * k, 0.5); };
    Field c = apply_radial_multiplier(apply_radial_multiplier(f, s1), s2);
    Field d = apply_radial_multiplier(f, [&](double k) { return s1(k) * s2(k); });
    CHECK(rel_diff(c, d) < 1e-12);
    CHECK_THROWS_AS(apply_radial_multiplier(f, [](double k) { return k > 1.0 ? cplx(NAN) : cplx(1.0); }),
                    std::domain_error);
}

TEST_CASE("multiplier preserves the representation tag") {
    GridSpec g{3, 4, 1.0};
    Field F = forward_transform(random_field(g, 1));
    CHECK(apply_radial_multiplier(F, [](double k) { return cplx(k); }).rep == Rep::frequency);
}

TEST_CASE("Riesz potential of a Gaussian matches the radial oracle") {
    // h = 0.5 puts r = 0.5, 1, 2 on the first axis; the dropped zero mode
    // shifts the periodic solution by O(1/L), hence the large box
    GridSpec g{3, 96, 24.0};
    Field f = gaussian(g, 1.0 / std::sqrt(2.0));  // exp(-|x|^2)
    Field u = apply_radial_multiplier(f, [](double k) { return cplx(1.0 / k); });
    const double rs[3] = {0.5, 1.0, 2.0};
    const double oracle[3] = {oracle::kRieszGauss_0, oracle::kRieszGauss_1, oracle::kRieszGauss_2};
    for (int i = 0; i < 3; ++i) {
        int idx[3] = {g.N / 2 + static_cast<int>(std::lround(rs[i] / g.h())), g.N / 2, g.N / 2};
        const double val = u.v[linear_index(g, idx)].real();
        CHECK(std::abs(val - oracle[i]) < 0.02 * oracle[i]);
    }
}

TEST_CASE("L^p norms") {
    GridSpec g{3, 8, 2.0};
    Field e(g);
    e.v[5] = 1.0;
    for (double p : {1.0, 2.0, 3.5}) CHECK(norm_lp(e, p) == doctest::Approx(std::pow(g.h(), 3.0 / p)).epsilon(1e-13));
    CHECK(norm_lp(e, INFINITY) == 1.0);
    Field f = random_field(g, 9, false);
    CHECK(std::abs(norm_lp(f, 2.0) - norm_l2(forward_transform(f))) < 1e-12 * norm_lp(f, 2.0));
    GridSpec gg{3, 32, 8.0};
    CHECK(norm_lp(gaussian(gg, 1.0), 3.0) == doctest::Approx(oracle::kGaussL3).epsilon(0.01));
}

TEST_CASE("weighted L2 norms") {
    GridSpec g{3, 16, 6.0};
    Field f = random_field(g, 2, false);
    std::vector<double> one(g.size(), 1.0);
    CHECK(weighted_l2_norm(f, one) == doctest::Approx(norm_l2(f)).epsilon(1e-14));
    CHECK(weighted_l2_norm(f, bracket_weight(g, 0.0)) == doctest::Approx(norm_lp(f, 2.0)).epsilon(1e-14));
    std::vector<double> neg(g.size(), 1.0);
    neg[3] = -1.0;
    CHECK_THROWS_AS(weighted_l2_norm(f, neg), std::invalid_argument);
    // the zero-cell rule converges at first order in h
    GridSpec gg{3, 176, 4.0};
    Field h = gaussian(gg, 1.0 / std::sqrt(2.0));
    CHECK(weighted_l2_norm(h, power_weight(gg, -1.0)) == doctest::Approx(oracle::kWeightedGauss).epsilon(0.02));
}

TEST_CASE("translation covariance") {
    GridSpec g{3, 8, 2.5};
    Field f = random_field(g, 4, false);
    Field F = forward_transform(f), S = forward_transform(shift_cells(f, 1, 1));
    std::vector<int> idx(3);
    double err = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        multi_index(g, i, idx.data());
        const cplx phase = std::polar(1.0, -g.dxi() * signed_index(idx[1], g.N) * g.h());
        err = std::max(err, std::abs(S.v[i] - phase * F.v[i]));
    }
    CHECK(err < 1e-12 * norm_l2(F));
}

TEST_CASE("zero-cell rule for singular weights") {
    GridSpec g{3, 8, 2.0};
    auto w = power_weight(g, -1.0);
    const double rbar = g.h() * volume_ball_radius(3);
    CHECK(w[origin_index(g)] == doctest::Approx(1.0 / rbar));
    CHECK(volume_ball_radius(3) == doctest::Approx(std::cbrt(3.0 / (4.0 * pi))));
}

TEST_CASE("field binary round trip") {
    GridSpec g{3, 6, 1.7};
    Field f = random_field(g, 8, false);
    const auto path = std::filesystem::temp_directory_path() / "kslab_field_test.bin";
    write_field(path.string(), f);
    Field r = read_field(path.string());
    CHECK(r.grid == g);
    CHECK(r.rep == f.rep);
    CHECK(rel_diff(r, f) == 0.0);
    std::filesystem::remove(path);
    CHECK_THROWS(read_field("/nonexistent/kslab.bin"));
}

TEST_CASE("parallel kernels agree with the serial reference") {
    GridSpec g{3, 12, 1.0};
    Field a = random_field(g, 21, false), b = random_field(g, 22, false);
    auto pa = a.v, sa = a.v;
    par::dft(pa, 3, 12, -1);
    serial::dft(sa, 3, 12, -1);
    double err = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) err = std::max(err, std::abs(pa[i] - sa[i]));
    CHECK(err < 1e-10);
    CHECK(std::abs(par::dot(a.v, b.v) - serial::dot(a.v, b.v)) < 1e-10);
    CHECK(par::sum_abs_pow(a.v, 3.0) == doctest::Approx(serial::sum_abs_pow(a.v, 3.0)).epsilon(1e-12));
    CHECK(par::max_abs(a.v) == serial::max_abs(a.v));
    auto py = b.v, sy = b.v;
    par::axpy(cplx(0.3, -1.0), a.v, py);
    serial::axpy(cplx(0.3, -1.0), a.v, sy);
    for (std::size_t i = 0; i < py.size(); ++i) CHECK(std::abs(py[i] - sy[i]) < 1e-14);
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + i % 7;
    auto pm = a.v, sm = a.v;
    par::mul(pm, w);
    serial::mul(sm, w);
    CHECK(pm == sm);
}
