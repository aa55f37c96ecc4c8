#include "synclab/sync.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "synclab/errors.hpp"

namespace synclab {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::synchronizing: return "synchronizing";
        case Verdict::non_synchronizing: return "non_synchronizing";
        default: return "inconclusive";
    }
}

namespace {

double response_distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

bool finite_vec(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Advances both slave states once; returns false when either goes
// non-finite.
bool pair_step(const System& sys, const ProductStructure& s,
               const DriveSequence& drive, std::size_t n, double h,
               Vec& y1, Vec& y2) {
    if (sys.kind == SystemKind::map) {
        const Vec x = drive.value(n);
        y1 = slave_step(sys, s, x, y1);
        y2 = slave_step(sys, s, x, y2);
    } else {
        const Vec xa = drive.value(n), xb = drive.value(n + 1);
        y1 = slave_step_flow(sys, s, xa, xb, y1, h);
        y2 = slave_step_flow(sys, s, xa, xb, y2, h);
    }
    return finite_vec(y1) && finite_vec(y2);
}

struct PairRun {
    std::vector<double> distances;
    bool diverged = false;
};

PairRun run_pair_impl(const System& sys, const ProductStructure& s,
                      const DriveSequence& drive, Vec y1, Vec y2,
                      std::size_t n, double h) {
    if (y1.size() != s.response_dim() || y2.size() != s.response_dim())
        throw config_error("run_pair: response dimension mismatch");
    if (drive.drive_dim() != s.drive_dim())
        throw config_error("run_pair: drive dimension mismatch");
    PairRun out;
    out.distances.reserve(n + 1);
    out.distances.push_back(response_distance(y1, y2));
    for (std::size_t i = 0; i < n; ++i) {
        if (!pair_step(sys, s, drive, i, h, y1, y2)) {
            out.diverged = true;
            break;
        }
        out.distances.push_back(response_distance(y1, y2));
    }
    return out;
}

// Shared verdict assembly for sync_test / absolute_sync_test.
SyncVerdict judge(std::vector<PairEvidence> evidence,
                  std::vector<std::size_t> excluded, const TrialConfig& cfg) {
    SyncVerdict v;
    v.evidence = std::move(evidence);
    v.excluded_starts = std::move(excluded);
    v.delta_sync = cfg.delta_sync;
    v.delta_fail = cfg.delta_fail;
    if (v.evidence.empty()) {
        v.verdict = Verdict::inconclusive;
        return v;
    }
    bool all_sync = true, any_fail = false;
    double worst = 0.0;
    for (const auto& e : v.evidence) {
        if (e.diverged) {
            // A diverged slave never settled; strongest non-convergence
            // evidence available at finite horizon.
            any_fail = true;
            all_sync = false;
            worst = HUGE_VAL;
            continue;
        }
        worst = std::max(worst, e.final_distance);
        if (!(e.final_distance < cfg.delta_sync)) all_sync = false;
        if (e.min_last_window > cfg.delta_fail) any_fail = true;
    }
    v.worst_final_distance = worst;
    v.verdict = all_sync ? Verdict::synchronizing
                         : any_fail ? Verdict::non_synchronizing
                                    : Verdict::inconclusive;
    return v;
}

PairEvidence summarize(const PairRun& run, std::size_t pair_id, std::size_t start_id,
                       bool record_series) {
    PairEvidence e;
    e.pair_id = pair_id;
    e.start_id = start_id;
    e.diverged = run.diverged;
    const auto& d = run.distances;
    e.initial_distance = d.front();
    e.final_distance = d.back();
    e.max_distance = *std::max_element(d.begin(), d.end());
    const std::size_t window = std::max<std::size_t>(1, d.size() / 10);
    e.min_last_window = *std::min_element(d.end() - static_cast<std::ptrdiff_t>(window), d.end());
    if (record_series) e.distances = d;
    return e;
}

// Deterministic pair-parallel driver: slot i of the output is task i
// regardless of thread count.
template <typename Fn>
void parallel_slots(std::size_t n, int threads, Fn&& fn) {
    const int t = std::max(1, threads);
    if (t == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + t - 1) / static_cast<std::size_t>(t);
    for (int w = 0; w < t; ++w) {
        const std::size_t lo = chunk * static_cast<std::size_t>(w);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

Vec sample_pair_point(const Box& box, std::uint64_t seed, std::size_t key) {
    Rng rng(substream(seed, key));
    return rng.uniform_vec(box.lo, box.hi);
}

}  // namespace

std::vector<double> run_pair(const System& sys, const ProductStructure& s,
                             const DriveSequence& drive, const Vec& y1_0,
                             const Vec& y2_0, std::size_t n, double h) {
    PairRun run = run_pair_impl(sys, s, drive, y1_0, y2_0, n, h);
    if (run.diverged)
        throw divergence_error("run_pair: slave state diverged",
                               run.distances.size() - 1);
    return run.distances;
}

SyncVerdict sync_test(const System& sys, const ProductStructure& s,
                      const TrialConfig& cfg, const std::vector<Vec>& orbit_starts) {
    if (orbit_starts.empty()) throw config_error("sync_test: no orbit starts");
    if (cfg.init_box.dim() != s.response_dim())
        throw config_error("sync_test: init_box dimension mismatch");
    if (!(cfg.delta_sync < cfg.delta_fail))
        throw config_error("sync_test: delta_sync must be below delta_fail");
    if (cfg.n_steps < 1) throw config_error("sync_test: n_steps must be >= 1");

    std::vector<std::size_t> excluded;
    struct Task {
        std::size_t drive_id, start_id, pair_id;
        Vec y1, y2;
    };
    std::vector<DriveSequence> drives;
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < orbit_starts.size(); ++si) {
        Trajectory master;
        try {
            if (sys.kind == SystemKind::map) {
                master = orbit(sys, orbit_starts[si], cfg.n_steps);
            } else {
                IntegratorConfig ic{cfg.h};
                master = integrate(sys, orbit_starts[si],
                                   cfg.h * static_cast<double>(cfg.n_steps + 1), ic);
            }
        } catch (const divergence_error&) {
            excluded.push_back(si);
            continue;
        }
        drives.push_back(DriveSequence::orbit_projection(std::move(master), s));
        for (std::size_t pj = 0; pj < cfg.n_pairs; ++pj) {
            const std::size_t key = si * cfg.n_pairs + pj;
            Task t;
            t.drive_id = drives.size() - 1;
            t.start_id = si;
            t.pair_id = pj;
            t.y1 = sample_pair_point(cfg.init_box, cfg.seed, 2 * key);
            t.y2 = sample_pair_point(cfg.init_box, cfg.seed, 2 * key + 1);
            tasks.push_back(std::move(t));
        }
    }

    std::vector<PairEvidence> evidence(tasks.size());
    parallel_slots(tasks.size(), cfg.threads, [&](std::size_t i) {
        const Task& t = tasks[i];
        PairRun run =
            run_pair_impl(sys, s, drives[t.drive_id], t.y1, t.y2, cfg.n_steps, cfg.h);
        evidence[i] = summarize(run, t.pair_id, t.start_id, cfg.record_series);
    });
    return judge(std::move(evidence), std::move(excluded), cfg);
}

SyncVerdict absolute_sync_test(const System& sys, const ProductStructure& s,
                               const TrialConfig& cfg,
                               const std::vector<DriveSequence>& drive_generators) {
    if (drive_generators.empty()) throw config_error("absolute_sync_test: no drives");
    if (cfg.init_box.dim() != s.response_dim())
        throw config_error("absolute_sync_test: init_box dimension mismatch");
    if (!(cfg.delta_sync < cfg.delta_fail))
        throw config_error("absolute_sync_test: delta_sync must be below delta_fail");

    struct Task {
        const DriveSequence* drive;
        std::size_t start_id, pair_id;
        Vec y1, y2;
    };
    std::vector<DriveSequence> drives;
    drives.reserve(drive_generators.size());
    for (const auto& g : drive_generators)
        drives.push_back(sys.kind == SystemKind::flow ? g.with_time_step(cfg.h) : g);

    std::vector<Task> tasks;
    for (std::size_t gi = 0; gi < drives.size(); ++gi)
        for (std::size_t pj = 0; pj < cfg.n_pairs; ++pj) {
            const std::size_t key = gi * cfg.n_pairs + pj;
            Task t;
            t.drive = &drives[gi];
            t.start_id = gi;
            t.pair_id = pj;
            t.y1 = sample_pair_point(cfg.init_box, cfg.seed, 2 * key);
            t.y2 = sample_pair_point(cfg.init_box, cfg.seed, 2 * key + 1);
            tasks.push_back(std::move(t));
        }

    std::vector<PairEvidence> evidence(tasks.size());
    parallel_slots(tasks.size(), cfg.threads, [&](std::size_t i) {
        const Task& t = tasks[i];
        PairRun run = run_pair_impl(sys, s, *t.drive, t.y1, t.y2, cfg.n_steps, cfg.h);
        evidence[i] = summarize(run, t.pair_id, t.start_id, cfg.record_series);
    });
    return judge(std::move(evidence), {}, cfg);
}

double conditional_lyapunov(const System& sys, const ProductStructure& s,
                            const Vec& orbit_start, std::size_t n, double h) {
    if (n < 1000) throw config_error("conditional_lyapunov: n must be >= 1000");
    if (orbit_start.size() != sys.dim)
        throw config_error("conditional_lyapunov: start dimension mismatch");

    // Drive from the master's own orbit; slave rides along it.
    Trajectory master;
    if (sys.kind == SystemKind::map) {
        master = orbit(sys, orbit_start, n);
    } else {
        IntegratorConfig ic{h};
        master = integrate(sys, orbit_start, h * static_cast<double>(n + 1), ic);
    }
    DriveSequence drive = DriveSequence::orbit_projection(master, s);

    Vec x0, y;
    s.to_coords(orbit_start, x0, y);
    const std::size_t k = s.response_dim();

    Vec v(k, 0.0);
    v[0] = 1.0;
    const double fd = 1e-6;
    const double log_floor = -50.0;  // growth floor; exact-zero tangents land here
    double acc = 0.0;

    Vec yp(k), ym(k), img_p, img_m;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            yp[j] = y[j] + fd * v[j];
            ym[j] = y[j] - fd * v[j];
        }
        if (sys.kind == SystemKind::map) {
            const Vec x = drive.value(i);
            img_p = slave_step(sys, s, x, yp);
            img_m = slave_step(sys, s, x, ym);
            y = slave_step(sys, s, x, y);
        } else {
            const Vec xa = drive.value(i), xb = drive.value(i + 1);
            img_p = slave_step_flow(sys, s, xa, xb, yp, h);
            img_m = slave_step_flow(sys, s, xa, xb, ym, h);
            y = slave_step_flow(sys, s, xa, xb, y, h);
        }
        if (!finite_vec(y)) throw divergence_error("conditional_lyapunov: diverged", i);
        double growth = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            v[j] = (img_p[j] - img_m[j]) / (2.0 * fd);
            growth += v[j] * v[j];
        }
        growth = std::sqrt(growth);
        const double per_step_floor =
            sys.kind == SystemKind::map ? log_floor : log_floor * h;
        acc += std::max(std::log(std::max(growth, 1e-300)), per_step_floor);
        if (growth < 1e-300) {
            // Degenerate tangent: restart from a basis direction.
            std::fill(v.begin(), v.end(), 0.0);
            v[0] = 1.0;
        } else {
            for (std::size_t j = 0; j < k; ++j) v[j] /= growth;
        }
    }
    const double denom = sys.kind == SystemKind::map
                             ? static_cast<double>(n)
                             : static_cast<double>(n) * h;
    return std::max(acc / denom, log_floor);
}

LorenzTrialResult lorenz_response_trial(const LorenzSystem& sys,
                                        const std::function<double(double)>& drive_signal,
                                        const Vec2& yz1, const Vec2& yz2, double T,
                                        const IntegratorConfig& cfg) {
    if (!(T > 0.0)) throw config_error("lorenz_response_trial: T must be positive");
    if (!(cfg.h > 0.0)) throw config_error("lorenz_response_trial: h must be positive");
    const auto n = static_cast<std::size_t>(std::llround(T / cfg.h));

    // State: (Y1, Z1, Y2, Z2, t); both responses share the drive, so one RK4
    // step keeps them on identical drive samples.
    Vec st{yz1.x, yz1.y, yz2.x, yz2.y, 0.0};
    const double r = sys.r, b = sys.b;
    auto field = [&](const double* in, double* out) {
        const double x = drive_signal(in[4]);
        out[0] = r * x - in[0] - x * in[1];
        out[1] = x * in[0] - b * in[1];
        out[2] = r * x - in[2] - x * in[3];
        out[3] = x * in[2] - b * in[3];
        out[4] = 1.0;
    };

    LorenzTrialResult res;
    res.times.reserve(n + 1);
    res.error.reserve(n + 1);
    res.lyapunov_v.reserve(n + 1);
    auto record = [&](double t) {
        const double ey = st[0] - st[2], ez = st[1] - st[3];
        res.times.push_back(t);
        res.lyapunov_v.push_back(ey * ey + ez * ez);
        res.error.push_back(std::hypot(ey, ez));
    };
    record(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rk4_step(field, st, cfg.h);
        if (!finite_vec(st))
            throw divergence_error("lorenz_response_trial: diverged", i);
        record(st[4]);
    }
    return res;
}

std::function<double(double)> sampled_signal(const Trajectory& tr, std::size_t coord) {
    if (tr.states.empty()) throw config_error("sampled_signal: empty trajectory");
    if (coord >= tr.dim()) throw config_error("sampled_signal: coordinate out of range");
    Vec samples(tr.states.size());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = tr.states[i][coord];
    const double h = tr.time_step;
    return [samples = std::move(samples), h](double t) {
        if (t <= 0.0) return samples.front();
        const double u = t / h;
        const auto i = static_cast<std::size_t>(u);
        if (i + 1 >= samples.size()) return samples.back();
        const double frac = u - static_cast<double>(i);
        return samples[i] + (samples[i + 1] - samples[i]) * frac;
    };
}

}  // namespace synclab
