#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "synclab/errors.hpp"
#include "synclab/sync.hpp"

using namespace synclab;

TEST_CASE("driven henon pair collapses to zero distance after one step") {
    System henon = make_system(HenonMap{});
    auto s = ProductStructure::identity(2, {1});
    auto drive = DriveSequence::orbit_projection(orbit(henon, {0.1, 0.15}, 60), s);

    auto d = run_pair(henon, s, drive, {0.4}, {-0.6}, 50);
    REQUIRE(d.size() == 51);
    CHECK(d[0] == 1.0);
    for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k] == 0.0);
}

TEST_CASE("sync_test verdict for the driven henon family") {
    System henon = make_system(HenonMap{});
    auto s = ProductStructure::identity(2, {1});
    TrialConfig cfg;
    cfg.n_steps = 100;
    cfg.n_pairs = 4;
    cfg.seed = 12;
    SyncVerdict v = sync_test(henon, s, cfg, {{0.1, 0.1}, {0.0, 0.2}});
    CHECK(v.verdict == Verdict::synchronizing);
    CHECK(v.worst_final_distance == 0.0);
    CHECK(v.evidence.size() == 8);
    CHECK(v.excluded_starts.empty());
}

TEST_CASE("series are recorded only on request") {
    System henon = make_system(HenonMap{});
    auto s = ProductStructure::identity(2, {1});
    TrialConfig cfg;
    cfg.n_steps = 20;
    cfg.n_pairs = 1;
    SyncVerdict off = sync_test(henon, s, cfg, {{0.1, 0.1}});
    CHECK(off.evidence[0].distances.empty());

    cfg.record_series = true;
    SyncVerdict on = sync_test(henon, s, cfg, {{0.1, 0.1}});
    CHECK(on.evidence[0].distances.size() == 21);
    CHECK(on.evidence[0].distances.front() == on.evidence[0].initial_distance);
    CHECK(on.evidence[0].distances.back() == on.evidence[0].final_distance);
}

TEST_CASE("expanding response is reported as non-synchronizing") {
    // Map (x, y) -> (0.5 x, 2 y): the drive contracts, the response doubles.
    System m = make_system(
        LinearSystem{Mat{{0.5, 0.0}, {0.0, 2.0}}, SystemKind::map});
    auto s = ProductStructure::identity(2, {0});
    TrialConfig cfg;
    cfg.n_steps = 60;
    cfg.n_pairs = 4;
    cfg.seed = 5;
    SyncVerdict v = sync_test(m, s, cfg, {{1.0, 0.0}});
    CHECK(v.verdict == Verdict::non_synchronizing);
    CHECK(v.worst_final_distance > 1.0);
}

TEST_CASE("neutral response is inconclusive") {
    System m = make_system(
        LinearSystem{Mat{{0.5, 0.0}, {0.0, 1.0}}, SystemKind::map});
    auto s = ProductStructure::identity(2, {0});
    TrialConfig cfg;
    cfg.n_steps = 50;
    cfg.n_pairs = 4;
    cfg.seed = 2;
    cfg.delta_fail = 1e6;  // unreachable: distances stay at their initial size
    SyncVerdict v = sync_test(m, s, cfg, {{1.0, 0.0}});
    CHECK(v.verdict == Verdict::inconclusive);
}

TEST_CASE("slave divergence throws from run_pair and fails sync_test") {
    // Response cubes each step: finite range is left after ~9 iterations.
    System m = make_system(PlanarMap{[](const Vec2& p) {
        return Vec2{0.5 * p.x, p.y * p.y * p.y};
    }, {}});
    auto s = ProductStructure::identity(2, {0});
    auto drive = DriveSequence::constant({0.0});
    CHECK_THROWS_AS(run_pair(m, s, drive, {3.0}, {-3.0}, 100), divergence_error);

    TrialConfig cfg;
    cfg.n_steps = 100;
    cfg.n_pairs = 2;
    cfg.seed = 1;
    cfg.init_box = Box{{2.0}, {3.0}};
    SyncVerdict v = sync_test(m, s, cfg, {{1.0, 0.0}});
    CHECK(v.verdict == Verdict::non_synchronizing);
    bool any_diverged = false;
    for (const auto& e : v.evidence) any_diverged = any_diverged || e.diverged;
    CHECK(any_diverged);
}

TEST_CASE("diverging master orbits are excluded, not fatal") {
    System m = make_system(PlanarMap{[](const Vec2& p) {
        return Vec2{p.x * p.x, 0.5 * p.y};
    }, {}});
    auto s = ProductStructure::identity(2, {0});
    TrialConfig cfg;
    cfg.n_steps = 80;
    cfg.n_pairs = 2;
    cfg.seed = 3;
    SyncVerdict v = sync_test(m, s, cfg, {{0.5, 1.0}, {2.0, 1.0}});
    CHECK(v.excluded_starts == std::vector<std::size_t>{1});
    CHECK(v.evidence.size() == 2);
    CHECK(v.verdict == Verdict::synchronizing);
}

TEST_CASE("sync_test results do not depend on the thread count") {
    System henon = make_system(HenonMap{});
    auto s = ProductStructure::identity(2, {0});
    TrialConfig cfg;
    cfg.n_steps = 40;
    cfg.n_pairs = 6;
    cfg.seed = 8;
    cfg.record_series = true;
    SyncVerdict a = sync_test(henon, s, cfg, {{0.1, 0.1}});
    cfg.threads = 4;
    SyncVerdict b = sync_test(henon, s, cfg, {{0.1, 0.1}});
    REQUIRE(a.evidence.size() == b.evidence.size());
    for (std::size_t i = 0; i < a.evidence.size(); ++i)
        CHECK(a.evidence[i].distances == b.evidence[i].distances);
}

TEST_CASE("absolute_sync_test uses the provided generators") {
    System henon = make_system(HenonMap{});
    auto s = ProductStructure::identity(2, {1});
    TrialConfig cfg;
    cfg.n_steps = 30;
    cfg.n_pairs = 3;
    cfg.seed = 4;
    std::vector<DriveSequence> gens = {
        DriveSequence::iid_uniform(11, Box::cube(1, 0.5)),
        DriveSequence::sinusoid(12, 0.5, 0.37)};
    SyncVerdict v = absolute_sync_test(henon, s, cfg, gens);
    CHECK(v.verdict == Verdict::synchronizing);
    CHECK(v.evidence.size() == 6);
    CHECK_THROWS_AS(absolute_sync_test(henon, s, cfg, {}), config_error);
}

TEST_CASE("trial validation catches inconsistent settings") {
    System henon = make_system(HenonMap{});
    auto s = ProductStructure::identity(2, {1});
    TrialConfig cfg;
    cfg.delta_sync = 1.0;
    cfg.delta_fail = 0.5;
    CHECK_THROWS_AS(sync_test(henon, s, cfg, {{0.1, 0.1}}), config_error);
    cfg = TrialConfig{};
    cfg.init_box = Box::cube(2, 1.0);  // response is one-dimensional
    CHECK_THROWS_AS(sync_test(henon, s, cfg, {{0.1, 0.1}}), config_error);
    cfg = TrialConfig{};
    CHECK_THROWS_AS(sync_test(henon, s, cfg, {}), config_error);
}

TEST_CASE("conditional lyapunov exponents for the driven lorenz system") {
    System lorenz = make_system(LorenzSystem{});
    auto s = ProductStructure::identity(3, {0});
    double lam = conditional_lyapunov(lorenz, s, {1.0, 1.0, 1.0}, 20000, 1e-3);
    CHECK(lam > -1.95);
    CHECK(lam < -1.55);
}

TEST_CASE("conditional lyapunov hits the floor for a dead response") {
    // Response copies the drive, so response perturbations vanish in one step.
    System henon = make_system(HenonMap{});
    auto s = ProductStructure::identity(2, {1});
    double lam = conditional_lyapunov(henon, s, {0.1, 0.1}, 2000);
    CHECK(lam <= -49.0);
}

TEST_CASE("lorenz response pair obeys the contraction identity") {
    LorenzSystem sys;
    System full = make_system(sys);
    Trajectory master = integrate(full, {1.0, 1.0, 1.0}, 52.0, {1e-3});
    auto signal = sampled_signal(master, 0);

    auto res = lorenz_response_trial(sys, signal, {6.0, 6.0}, {6.6, 6.8}, 50.0, {1e-3});
    REQUIRE(res.error.size() == res.times.size());
    REQUIRE(res.lyapunov_v.size() == res.times.size());
    CHECK(std::abs(res.error.front() - 1.0) < 1e-12);

    double vmax = 0.0;
    for (double v : res.lyapunov_v) vmax = std::max(vmax, v);
    for (std::size_t i = 1; i < res.lyapunov_v.size(); ++i)
        CHECK(res.lyapunov_v[i] <= res.lyapunov_v[i - 1] + 1e-9 * vmax);
    CHECK(res.error.back() < 1e-6);
}

TEST_CASE("sampled_signal interpolates linearly and clamps") {
    Trajectory tr;
    tr.time_step = 0.5;
    tr.states = {{0.0}, {1.0}, {4.0}};
    auto f = sampled_signal(tr, 0);
    CHECK(f(0.0) == 0.0);
    CHECK(std::abs(f(0.25) - 0.5) < 1e-15);
    CHECK(std::abs(f(0.75) - 2.5) < 1e-15);
    CHECK(f(2.0) == 4.0);
    CHECK(f(-1.0) == 0.0);
}
