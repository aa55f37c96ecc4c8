#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "synclab/product.hpp"
#include "synclab/rng.hpp"
#include "synclab/systems.hpp"

namespace synclab {

struct TrialConfig {
    std::size_t n_steps = 2000;
    std::size_t n_pairs = 8;
    Box init_box = Box::cube(1, 1.0);  // response-space; dimension checked at use
    double delta_sync = 1e-8;
    double delta_fail = 1e-2;
    std::uint64_t seed = 0;
    double h = 1e-3;      // sample interval for flow systems
    int threads = 1;      // pair-level parallelism; results independent of it
    bool record_series = false;  // keep per-step distances in the evidence
};

enum class Verdict { synchronizing, non_synchronizing, inconclusive };

const char* verdict_name(Verdict v);

struct PairEvidence {
    std::size_t pair_id = 0;
    std::size_t start_id = 0;       // orbit start (sync_test) or generator (absolute)
    double initial_distance = 0.0;
    double final_distance = 0.0;
    double max_distance = 0.0;
    double min_last_window = 0.0;   // min over the last 10% of steps
    bool diverged = false;          // slave state left representable range
    Vec distances;                  // per-step series, only when recorded
};

struct SyncVerdict {
    Verdict verdict = Verdict::inconclusive;
    double worst_final_distance = 0.0;
    std::vector<PairEvidence> evidence;
    std::vector<std::size_t> excluded_starts;  // diverged master orbits
    double delta_sync = 0.0, delta_fail = 0.0;
};

// Distance series (length n+1, including the initial distance) between two
// slave states under a common drive.  d_N is the Euclidean norm on response
// coordinates.  Throws divergence_error when a state goes non-finite.
std::vector<double> run_pair(const System& sys, const ProductStructure& s,
                             const DriveSequence& drive, const Vec& y1_0,
                             const Vec& y2_0, std::size_t n, double h = 1e-3);

// Drives are projections of master orbits from the given starts.  Verdict:
// synchronizing iff every pair's final distance is below delta_sync;
// non_synchronizing iff some pair stays above delta_fail over the last 10%
// of steps (divergence of a slave counts as staying above); else
// inconclusive.
SyncVerdict sync_test(const System& sys, const ProductStructure& s,
                      const TrialConfig& cfg, const std::vector<Vec>& orbit_starts);

// Same verdict rules, drives drawn from the given generators.
SyncVerdict absolute_sync_test(const System& sys, const ProductStructure& s,
                               const TrialConfig& cfg,
                               const std::vector<DriveSequence>& drive_generators);

// Largest conditional Lyapunov exponent along the driven trajectory started
// at orbit_start.  Tangents are propagated by central finite differences
// (step 1e-6) with renormalization each step.  Per-step normalization for
// maps, per-unit-time for flows.  Guarded below at -50.
double conditional_lyapunov(const System& sys, const ProductStructure& s,
                            const Vec& orbit_start, std::size_t n,
                            double h = 1e-3);

struct LorenzTrialResult {
    Vec times;
    Vec error;       // |(Y1,Z1)-(Y2,Z2)| per step
    Vec lyapunov_v;  // V = (Y1-Y2)^2 + (Z1-Z2)^2
};

// Integrates the driven response pair
//   Y' = r x(t) - Y - x(t) Z,  Z' = x(t) Y - b Z
// for two initial conditions under the same scalar signal x(t).
LorenzTrialResult lorenz_response_trial(const LorenzSystem& sys,
                                        const std::function<double(double)>& drive_signal,
                                        const Vec2& yz1, const Vec2& yz2, double T,
                                        const IntegratorConfig& cfg);

// Piecewise-linear interpolant through trajectory samples of one coordinate.
std::function<double(double)> sampled_signal(const Trajectory& tr, std::size_t coord);

}  // namespace synclab
