#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "ksl/counterexample.hpp"
#include "ksl/radial.hpp"
#include "ksl/resolvent.hpp"
#include "ksl/spectral.hpp"
#include "oracles.hpp"

using namespace ksl;
namespace fs = std::filesystem;

TEST_CASE("Bessel kernel of (1 - Delta)^{-1}") {
    CHECK(bessel_kernel(3, 0.5) == doctest::Approx(oracle::kBessel3_0).epsilon(1e-12));
    CHECK(bessel_kernel(3, 1.0) == doctest::Approx(oracle::kBessel3_1).epsilon(1e-12));
    CHECK(bessel_kernel(3, 2.0) == doctest::Approx(oracle::kBessel3_2).epsilon(1e-12));
    CHECK(bessel_kernel(5, 0.5) == doctest::Approx(oracle::kBessel5_0).epsilon(1e-6));
    CHECK(bessel_kernel(5, 1.0) == doctest::Approx(oracle::kBessel5_1).epsilon(1e-6));
    CHECK(bessel_kernel(5, 2.0) == doctest::Approx(oracle::kBessel5_2).epsilon(1e-6));
    CHECK(bessel_kernel(3, 1.0) == doctest::Approx(laplace_kernel(3, cplx(-1.0, 0.0), 1.0).real()).epsilon(1e-14));
    // n = 5 against the radial Fourier-Bessel quadrature of 1 / (1 + |xi|^2)
    const cplx q = radial_kernel_quadrature(5, 1.0, [](double k) { return cplx(1.0 / (1.0 + k * k)); }, 1.0);
    CHECK(bessel_kernel(5, 1.0) == doctest::Approx(q.real()).epsilon(1e-6));
    for (int n : {3, 5, 7}) {
        double prev = INFINITY;
        for (int i = 0; i <= 40; ++i) {
            const double r = std::pow(10.0, -2.0 + 0.1 * i);
            const double G = bessel_kernel(n, r);
            CHECK(G > 0.0);
            CHECK(G < prev);
            prev = G;
        }
    }
    CHECK_THROWS_AS(bessel_kernel(4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_kernel(3, 0.0), std::invalid_argument);
}

TEST_CASE("embedded pair preconditions") {
    const GridSpec g{3, 24, 1.05};
    CHECK_THROWS_AS(build_embedded_pair(g, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_embedded_pair(g, 3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_embedded_pair(GridSpec{4, 12, 1.05}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_embedded_pair(GridSpec{3, 8, 1.05}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_embedded_pair(g, 2, 1.2), std::invalid_argument);
    EmbeddedOptions bad;
    bad.cap = 0.0;
    CHECK_THROWS_AS(build_embedded_pair(g, 2, 1.0, bad), std::invalid_argument);
}

TEST_CASE("residual harness on an exact eigenmode") {
    // on L = pi the mode k = (1, 0, 0) has |xi|^4 = 1
    const GridSpec g{3, 8, pi};
    const int k[3] = {1, 0, 0};
    EmbeddedPair pair;
    pair.V = zero_potential(g);
    pair.phi = plane_wave(g, k);
    pair.m = 2;
    pair.n = 3;
    pair.delta = 1.0;
    const auto r = verify_embedded(pair);
    CHECK(r.residual < 1e-10);
    CHECK(r.leak == 0.0);
}

TEST_CASE("m = 2, n = 3 pair: compact support and refinement ladder") {
    std::vector<double> res;
    for (int N : {24, 48, 96}) {
        const GridSpec g{3, N, 1.05};
        const auto pair = build_embedded_pair(g, 2, 1.0);
        CHECK(pair.check.min_phi > 0.0);
        CHECK(pair.check.leak < 1e-6);
        CHECK(pair.check.max_V > 0.0);
        for (double v : pair.V.V) CHECK(std::isfinite(v));
        // the eigenvalue 1 sits inside the lattice band [0, |xi|_max^4]
        CHECK(std::pow(g.xi_max(), 4) > 1.0);
        res.push_back(pair.check.residual);
        // the stored residual is ||H phi - phi|| / ||phi|| with H applied directly
        Field hp = apply_operator(pair.phi, 2, pair.V.V);
        CHECK(norm_l2(hp - pair.phi) / norm_l2(pair.phi) == doctest::Approx(pair.check.residual).epsilon(1e-10));
    }
    CHECK(res[1] < 1e-3);
    CHECK(res[1] <= 0.5 * res[0]);
    CHECK(res[2] <= 0.5 * res[1]);
}

TEST_CASE("V vanishes outside the ball and phi is the kernel there") {
    const GridSpec g{3, 48, 1.05};
    const auto pair = build_embedded_pair(g, 2, 1.0);
    const auto& R = radius_table(g);
    // outside the ball phi is the periodic (1 - Delta)^{-1} kernel, so the
    // exterior identity (-Delta)^2 phi = phi holds up to spectral error
    Field hp = apply_operator(pair.phi, 2, std::vector<double>(g.size(), 0.0));
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (R[i] > pair.delta + 2.0 * g.h()) {
            CHECK(pair.V.V[i] == 0.0);
            worst = std::max(worst, std::abs(hp.v[i] - pair.phi.v[i]));
            scale = std::max(scale, std::abs(pair.phi.v[i]));
        }
    }
    CHECK(worst < 1e-2 * scale);
}

TEST_CASE("embedded pair persistence") {
    const GridSpec g{3, 24, 1.05};
    const auto pair = build_embedded_pair(g, 2, 1.0);
    const fs::path dir = fs::temp_directory_path() / "kslab_test_embedded";
    fs::remove_all(dir);
    save_embedded(pair, dir.string());
    const Field V = read_field((dir / "V.bin").string());
    const Field phi = read_field((dir / "phi.bin").string());
    CHECK(V.grid == g);
    CHECK(norm_l2(phi - pair.phi) == 0.0);
    for (std::size_t i = 0; i < V.size(); ++i) CHECK(V.v[i].real() == pair.V.V[i]);
    std::ifstream in(dir / "manifest.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["schema_version"] == 1);
    CHECK(j["m"] == 2);
    CHECK(j["n"] == 3);
    CHECK(j["delta"] == 1.0);
    CHECK(j["residual"].get<double>() == pair.check.residual);
    fs::remove_all(dir);
}

// known failure: 12 points per axis do not resolve the cap in five dimensions
TEST_CASE("m = 2, n = 5 pair at N = 12" * doctest::skip()) {
    const GridSpec g{5, 12, 1.05};
    const auto pair = build_embedded_pair(g, 2, 1.0);
    CHECK(pair.check.min_phi > 0.0);
    CHECK(pair.check.leak < 1e-6);
    CHECK(pair.check.residual < 1e-3);
}
