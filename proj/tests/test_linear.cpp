#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qr_oracle.hpp"
#include "synclab/errors.hpp"
#include "synclab/linear.hpp"
#include "synclab/rng.hpp"

using namespace synclab;

TEST_CASE("qr oracle reproduces known spectra") {
    CHECK(std::abs(oracle::spectral_radius(Mat{{0.5, 0.0}, {0.0, -0.9}}) - 0.9) < 1e-12);
    // Scaled rotation: complex pair of modulus 0.8.
    double c = 0.8 * std::cos(1.1), s = 0.8 * std::sin(1.1);
    CHECK(std::abs(oracle::spectral_radius(Mat{{c, -s}, {s, c}}) - 0.8) < 1e-12);
    // Defective Jordan block.
    CHECK(std::abs(oracle::spectral_radius(Mat{{0.5, 1.0}, {0.0, 0.5}}) - 0.5) < 1e-9);
    // Companion matrix of (x-1)(x-2)(x-3).
    Mat comp{{6.0, -11.0, 6.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    CHECK(std::abs(oracle::spectral_radius(comp) - 3.0) < 1e-9);
    CHECK(std::abs(oracle::spectral_abscissa(comp) - 3.0) < 1e-9);
}

TEST_CASE("response_block slices the conjugated matrix") {
    Mat a{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
    auto s = ProductStructure::identity(3, {1});
    Mat b = response_block(a, s);
    REQUIRE(b.rows() == 2);
    CHECK(b(0, 0) == 1);
    CHECK(b(0, 1) == 3);
    CHECK(b(1, 0) == 7);
    CHECK(b(1, 1) == 10);

    // A similarity transform changes the block but not its spectrum when the
    // transform respects the splitting.
    Mat t{{1, 0, 0}, {0, 2, 0}, {0, 0, 1}};
    ProductStructure st(t, {0, 0, 0}, {1});
    Mat bt = response_block(a, st);
    CHECK(std::abs(oracle::spectral_radius(bt) - oracle::spectral_radius(b)) < 1e-9);
}

TEST_CASE("power iteration agrees with the oracle on random matrices") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(substream(0xABCD, seed));
        std::size_t d = 1 + seed % 3;
        Mat m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.symmetric(1.0);
        double ref = oracle::spectral_radius(m);
        double est = spectral_radius_power(m, 400, 5);
        // Equal-modulus complex pairs limit the power method to O(1/iters)
        // accuracy; the exact small-dimension path below has no such floor.
        CHECK(std::abs(est - ref) < 5e-3 * (1.0 + ref));
        auto exact = spectral_radius_smalldim(m);
        REQUIRE(exact.has_value());
        CHECK(std::abs(*exact - ref) < 1e-8 * (1.0 + ref));
    }
}

TEST_CASE("expm matches the scalar exponential and the oracle") {
    Mat b{{-1.0}};
    CHECK(std::abs(expm(b, 1.0)(0, 0) - 0.36787944117144233) < 1e-13);

    Mat r{{0.0, -2.0}, {2.0, 0.0}};  // rotation generator
    Mat e = expm(r, 0.5);            // rotation by one radian
    CHECK(std::abs(e(0, 0) - std::cos(1.0)) < 1e-12);
    CHECK(std::abs(e(1, 0) - std::sin(1.0)) < 1e-12);
}

TEST_CASE("decide_map classifies contraction of the response block") {
    auto s = ProductStructure::identity(3, {1});
    Mat a{{0.5, 0.2, 0.0}, {0.1, 1.2, 0.3}, {0.0, 0.4, 0.7}};
    LinearSyncReport rep = decide_map(a, s);
    CHECK(std::abs(rep.criterion_value - 0.7) < 1e-9);
    CHECK(rep.synchronizable);
    CHECK(!rep.borderline);

    Mat bad{{1.5, 0.0, 0.0}, {0.0, 0.5, 0.0}, {0.0, 0.0, 0.5}};
    LinearSyncReport rep2 = decide_map(bad, ProductStructure::identity(3, {1}));
    CHECK(rep2.criterion_value > 1.0);
    CHECK(!rep2.synchronizable);
}

TEST_CASE("decide_flow uses the spectral abscissa per unit time") {
    auto s = ProductStructure::identity(3, {0});
    Mat a{{0.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, -2.5}};
    LinearSyncReport rep = decide_flow(a, s);
    CHECK(std::abs(rep.criterion_value - (-1.0)) < 1e-6);
    CHECK(rep.synchronizable);

    Mat b{{0.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, -1.0}};
    LinearSyncReport rep2 = decide_flow(b, s);
    CHECK(std::abs(rep2.criterion_value - 2.0) < 1e-6);
    CHECK(!rep2.synchronizable);
}

TEST_CASE("borderline flag trips near the threshold") {
    Mat a{{1.0 - 1e-10, 0.0}, {0.0, 0.1}};
    auto s = ProductStructure::identity(2, {1});
    LinearSyncReport rep = decide_map(a, s);
    CHECK(rep.borderline);
}

TEST_CASE("search_structure finds an obvious split and respects the budget") {
    // Drive the expanding coordinate away and the rest contracts.
    Mat a{{2.0, 0.0, 0.0}, {0.0, 0.5, 0.1}, {0.0, 0.0, 0.6}};
    auto found = search_structure(a, SystemKind::map, 50, 1);
    REQUIRE(found.has_value());
    LinearSyncReport rep = decide_map(a, *found);
    CHECK(rep.synchronizable);

    // Uniform expansion in every direction cannot be synchronized by any
    // affine split: the response block always has spectral radius 2.
    Mat expand{{2.0, 0.0}, {0.0, 2.0}};
    CHECK(!search_structure(expand, SystemKind::map, 300, 1).has_value());
}

TEST_CASE("planar synchronizability does not reduce to the eigenvalues") {
    // One contracting eigendirection: drive the expanding one.
    Mat a{{2.0, 0.0}, {0.0, 0.5}};
    auto found = search_structure(a, SystemKind::map, 100, 3);
    REQUIRE(found.has_value());
    CHECK(decide_map(a, *found).synchronizable);

    // Both eigenvalues outside the unit circle and still synchronizable: a
    // similarity transform can zero a diagonal entry (e.g. [[0,-6],[1,5]] is
    // similar to diag(2,3)), leaving a nilpotent response block.
    Mat b{{2.0, 0.0}, {0.0, 3.0}};
    auto found2 = search_structure(b, SystemKind::map, 500, 3);
    REQUIRE(found2.has_value());
    LinearSyncReport rep = decide_map(b, *found2);
    CHECK(rep.synchronizable);
    CHECK(rep.criterion_value < 1.0);
}

TEST_CASE("density_experiment reports coherent wilson bounds") {
    DensityResult r = density_experiment(2, 60, 40, 17);
    CHECK(r.n_samples == 60);
    CHECK(r.n_found <= 60);
    CHECK(r.fraction == doctest::Approx(double(r.n_found) / 60.0));
    CHECK(r.wilson_lo >= 0.0);
    // The interval covers the point estimate up to rounding at fraction 1.
    CHECK(r.wilson_lo <= r.fraction + 1e-12);
    CHECK(r.fraction <= r.wilson_hi + 1e-12);
    CHECK(r.wilson_hi <= 1.0);
    CHECK(r.wilson_lo < r.wilson_hi);
    // Same seed, same counts.
    DensityResult r2 = density_experiment(2, 60, 40, 17);
    CHECK(r2.n_found == r.n_found);
}

TEST_CASE("agreement of decide_map with the oracle over a seeded batch") {
    auto s = ProductStructure::identity(3, {0});
    for (std::uint64_t k = 0; k < 50; ++k) {
        Rng rng(substream(0x51AB, k));
        Mat a(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) a(i, j) = rng.symmetric(1.25);
        LinearSyncReport rep = decide_map(a, s);
        double ref = oracle::spectral_radius(response_block(a, s));
        CHECK(std::abs(rep.criterion_value - ref) < 1e-6);
        CHECK(rep.synchronizable == (ref < 1.0));
    }
}
