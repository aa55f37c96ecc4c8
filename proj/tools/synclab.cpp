#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "synclab/config.hpp"
#include "synclab/errors.hpp"
#include "synclab/io.hpp"
#include "synclab/svg.hpp"

namespace fs = std::filesystem;
using namespace synclab;

namespace {

struct Cli {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    int threads = 1;

    // plot-only flags
    std::string plot_csv, plot_x = "n", plot_title;
    std::vector<std::string> plot_y;
    bool plot_log_y = false;
};

struct RunOutputs {
    std::vector<std::string> files;
    Json verdict_summary = Json::object();
    bool diverged = false;
};

const Json& need_field(const Json& cfg, const char* key) {
    if (!cfg.contains(key))
        throw config_error(std::string("config is missing required field '") + key + "'");
    return cfg[key];
}

std::uint64_t seed_of(const Json& cfg) { return cfg["seed"].get<std::uint64_t>(); }

std::pair<double, double> window_of(const Json& cfg) {
    if (!cfg.contains("window")) return {0.0, 5.0};
    Vec w = vec_from_json(cfg["window"]);
    if (w.size() != 2) throw config_error("'window' must be [lo, hi]");
    return {w[0], w[1]};
}

CertifyConfig certify_cfg_of(const Json& cfg) {
    CertifyConfig cc;
    if (!cfg.contains("certify")) return cc;
    const Json& j = cfg["certify"];
    cc.disk_radius = j.value("disk_radius", cc.disk_radius);
    cc.fp_tol = j.value("fp_tol", cc.fp_tol);
    cc.grid_step = j.value("grid_step", cc.grid_step);
    cc.bisect_tol = j.value("bisect_tol", cc.bisect_tol);
    if (j.contains("disk_center")) {
        Vec c = vec_from_json(j["disk_center"]);
        if (c.size() != 2) throw config_error("'disk_center' must be [x, y]");
        cc.disk_center = {c[0], c[1]};
    }
    return cc;
}

std::vector<ProductStructure> structures_of(const Json& cfg) {
    if (!cfg.contains("structures") || cfg["structures"] == "rotations")
        return rotation_family();
    if (!cfg["structures"].is_array())
        throw config_error("'structures' must be \"rotations\" or an array");
    std::vector<ProductStructure> out;
    for (const auto& sj : cfg["structures"]) out.push_back(structure_from_json(sj));
    if (out.empty()) throw config_error("'structures' must not be empty");
    return out;
}

void write_text(const Cli& cli, RunOutputs& out, const std::string& name,
                const std::string& content) {
    atomic_write(fs::path(cli.out_dir) / name, content);
    out.files.push_back(name);
}

void write_json_file(const Cli& cli, RunOutputs& out, const std::string& name,
                     const Json& j) {
    write_text(cli, out, name, j.dump(2) + "\n");
}

std::string trajectory_csv(const Trajectory& tr, bool flow) {
    CsvTable t;
    t.columns.push_back(flow ? "t" : "n");
    for (std::size_t c = 0; c < tr.dim(); ++c) t.columns.push_back("s" + std::to_string(c));
    for (std::size_t i = 0; i < tr.size(); ++i) {
        Vec row;
        row.reserve(tr.dim() + 1);
        row.push_back(flow ? static_cast<double>(i) * tr.time_step
                           : static_cast<double>(i));
        for (double v : tr.states[i]) row.push_back(v);
        t.rows.push_back(std::move(row));
    }
    return to_csv(t);
}

void maybe_plot_trajectory(const Cli& cli, RunOutputs& out, const Json& cfg,
                           const Trajectory& tr, const std::string& name) {
    if (!cfg.contains("plot")) return;
    Vec idx = vec_from_json(cfg["plot"]);
    if (idx.size() != 2) throw config_error("'plot' must be a pair of coordinate indices");
    auto i = static_cast<std::size_t>(idx[0]);
    auto j = static_cast<std::size_t>(idx[1]);
    if (i >= tr.dim() || j >= tr.dim()) throw config_error("'plot' index out of range");
    Vec xs(tr.size()), ys(tr.size());
    for (std::size_t k = 0; k < tr.size(); ++k) {
        xs[k] = tr.states[k][i];
        ys[k] = tr.states[k][j];
    }
    SvgPlot plot;
    plot.set_title(name);
    plot.set_labels("s" + std::to_string(i), "s" + std::to_string(j));
    plot.add_series("trajectory", xs, ys);
    write_text(cli, out, name + ".svg", plot.render());
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

RunOutputs cmd_orbit(const Cli& cli, const Json& cfg) {
    System sys = system_from_json(cfg);
    if (sys.kind != SystemKind::map)
        throw config_error("orbit iterates map systems; use integrate for flows");
    Vec x0 = vec_from_json(need_field(cfg, "start"));
    auto n = static_cast<std::size_t>(cfg.value("n", 100.0));

    RunOutputs out;
    Trajectory tr;
    try {
        tr = orbit(sys, x0, n);
    } catch (const divergence_error& e) {
        tr = orbit(sys, x0, e.last_valid);  // deterministic partial replay
        out.diverged = true;
    }
    write_text(cli, out, "orbit.csv", trajectory_csv(tr, false));
    maybe_plot_trajectory(cli, out, cfg, tr, "orbit");
    out.verdict_summary = {{"rows", tr.size()}, {"diverged", out.diverged}};
    return out;
}

RunOutputs cmd_integrate(const Cli& cli, const Json& cfg) {
    System sys = system_from_json(cfg);
    if (sys.kind != SystemKind::flow)
        throw config_error("integrate advances flow systems; use orbit for maps");
    Vec x0 = vec_from_json(need_field(cfg, "start"));
    const double T = need_field(cfg, "T").get<double>();
    IntegratorConfig ic{cfg.value("h", 1e-3)};

    RunOutputs out;
    Trajectory tr;
    try {
        tr = integrate(sys, x0, T, ic);
    } catch (const divergence_error& e) {
        tr = integrate(sys, x0, ic.h * static_cast<double>(e.last_valid), ic);
        out.diverged = true;
    }
    write_text(cli, out, "trajectory.csv", trajectory_csv(tr, true));
    maybe_plot_trajectory(cli, out, cfg, tr, "trajectory");
    out.verdict_summary = {{"rows", tr.size()}, {"diverged", out.diverged}};
    return out;
}

RunOutputs cmd_sync_test(const Cli& cli, const Json& cfg) {
    System sys = system_from_json(need_field(cfg, "system"));
    ProductStructure s = structure_from_json(need_field(cfg, "structure"));
    TrialConfig tc = trial_from_json(cfg.value("trial", Json::object()), s.response_dim());
    tc.seed = seed_of(cfg);
    tc.threads = cli.threads;
    tc.record_series = true;

    const std::string mode = cfg.value("mode", "orbit");
    SyncVerdict v;
    if (mode == "orbit") {
        const Json& js = need_field(cfg, "orbit_starts");
        std::vector<Vec> starts;
        for (const auto& e : js) starts.push_back(vec_from_json(e));
        v = sync_test(sys, s, tc, starts);
    } else if (mode == "absolute") {
        const Json& jd = need_field(cfg, "drives");
        std::vector<DriveSequence> drives;
        for (std::size_t gi = 0; gi < jd.size(); ++gi)
            // Generator streams live far from the pair-sampling streams
            // (substream keys 2*(start*n_pairs+pair)+{0,1}) used inside the
            // engine.
            drives.push_back(drive_from_json(jd[gi], s.drive_dim(),
                                             substream(tc.seed, 0x10000000ULL + gi)));
        v = absolute_sync_test(sys, s, tc, drives);
    } else {
        throw config_error("'mode' must be \"orbit\" or \"absolute\"");
    }

    RunOutputs out;
    CsvTable t;
    t.columns = {"pair_id", "n", "distance"};
    for (std::size_t i = 0; i < v.evidence.size(); ++i)
        for (std::size_t k = 0; k < v.evidence[i].distances.size(); ++k)
            t.rows.push_back({static_cast<double>(i), static_cast<double>(k),
                              v.evidence[i].distances[k]});
    write_text(cli, out, "evidence.csv", to_csv(t));
    write_json_file(cli, out, "summary.json", to_json(v));
    out.verdict_summary = {{"verdict", verdict_name(v.verdict)}};
    return out;
}

RunOutputs cmd_lyapunov(const Cli& cli, const Json& cfg) {
    System sys = system_from_json(need_field(cfg, "system"));
    ProductStructure s = structure_from_json(need_field(cfg, "structure"));
    Vec x0 = vec_from_json(need_field(cfg, "start"));
    auto n = static_cast<std::size_t>(cfg.value("n", 10000.0));
    const double h = cfg.value("h", 1e-3);

    double lambda = conditional_lyapunov(sys, s, x0, n, h);
    RunOutputs out;
    Json j{{"lambda", lambda}, {"n", n}, {"h", h}};
    write_json_file(cli, out, "lyapunov.json", j);
    out.verdict_summary = {{"lambda", lambda}};
    return out;
}

RunOutputs cmd_linsync(const Cli& cli, const Json& cfg) {
    Json result = Json::object();
    const std::uint64_t seed = seed_of(cfg);

    if (cfg.contains("matrix")) {
        Mat a = mat_from_json(cfg["matrix"]);
        const std::string kindstr = cfg.value("kind", "map");
        if (kindstr != "map" && kindstr != "flow")
            throw config_error("'kind' must be \"map\" or \"flow\"");
        SystemKind kind = kindstr == "flow" ? SystemKind::flow : SystemKind::map;

        if (cfg.contains("structure")) {
            ProductStructure s = structure_from_json(cfg["structure"]);
            LinearSyncReport rep =
                kind == SystemKind::map ? decide_map(a, s) : decide_flow(a, s);
            result["report"] = to_json(rep);
        }
        if (cfg.contains("search_budget")) {
            auto budget = static_cast<std::size_t>(cfg["search_budget"].get<double>());
            auto found = search_structure(a, kind, budget, seed);
            Json js{{"found", found.has_value()}};
            if (found) {
                js["structure"] = structure_to_json(*found);
                LinearSyncReport rep = kind == SystemKind::map ? decide_map(a, *found)
                                                               : decide_flow(a, *found);
                js["report"] = to_json(rep);
            }
            result["search"] = std::move(js);
        }
    }
    if (cfg.contains("density")) {
        const Json& dj = cfg["density"];
        auto n = static_cast<std::size_t>(dj.value("n", 100.0));
        auto budget = static_cast<std::size_t>(dj.value("budget", 1000.0));
        std::vector<std::size_t> dims;
        if (dj.contains("dims"))
            for (const auto& e : dj["dims"]) dims.push_back(e.get<std::size_t>());
        else
            dims.push_back(static_cast<std::size_t>(dj.value("d", 3.0)));
        Json arr = Json::array();
        for (std::size_t d : dims) {
            Json jr = to_json(density_experiment(d, n, budget, substream(seed, d)));
            jr["d"] = d;
            arr.push_back(std::move(jr));
        }
        result["density"] = std::move(arr);
    }
    if (result.empty())
        throw config_error("linsync needs 'matrix' (+'structure'/'search_budget') or 'density'");

    RunOutputs out;
    write_json_file(cli, out, "linsync.json", result);
    out.verdict_summary = result.contains("report")
                              ? Json{{"synchronizable", result["report"]["synchronizable"]}}
                              : Json::object();
    return out;
}

TypeConfig type_cfg_of(const Json& cfg) {
    TypeConfig tc;
    if (!cfg.contains("options")) return tc;
    const Json& j = cfg["options"];
    tc.grid_n = static_cast<std::size_t>(j.value("grid_n", static_cast<double>(tc.grid_n)));
    tc.n_iter = static_cast<std::size_t>(j.value("n_iter", static_cast<double>(tc.n_iter)));
    tc.tol = j.value("tol", tc.tol);
    tc.unwrap_n = static_cast<std::size_t>(j.value("unwrap_n", static_cast<double>(tc.unwrap_n)));
    return tc;
}

RunOutputs cmd_annulus(const Cli& cli, const Json& cfg) {
    PlanarMap map = planar_map_from_json(need_field(cfg, "map"));
    TypeConfig tc = type_cfg_of(cfg);
    RunOutputs out;

    if (cfg.contains("annuli")) {
        const Json& ja = cfg["annuli"];
        if (!ja.is_array() || ja.size() != 2)
            throw config_error("'annuli' must be a pair of radius intervals");
        Vec a1 = vec_from_json(ja[0]), a2 = vec_from_json(ja[1]);
        if (a1.size() != 2 || a2.size() != 2)
            throw config_error("each annulus must be [r_in, r_out]");
        ConditionRReport rep =
            condition_r_report(map, {a1[0], a1[1]}, {a2[0], a2[1]}, tc);
        write_json_file(cli, out, "annulus.json", to_json(rep));
        out.verdict_summary = {{"condition_R", rep.overall}};
        return out;
    }

    Vec a = vec_from_json(need_field(cfg, "annulus"));
    if (a.size() != 2) throw config_error("'annulus' must be [r_in, r_out]");
    AnnulusAdapter ad(map, a[0], a[1]);
    const double c = cfg.value("c", 0.5 * (a[0] + a[1]));
    TypeReport rep = type_report(ad, c, tc);
    write_json_file(cli, out, "annulus.json", to_json(rep));

    if (cfg.value("svg", false)) {
        SvgPlot plot;
        plot.set_title("curve iterates");
        plot.set_labels("x", "y");
        constexpr std::size_t kN = 256;
        std::vector<Vec2> pts(kN);
        const double sc = (c - ad.r_in) / ad.width();
        for (std::size_t i = 0; i < kN; ++i)
            pts[i] = ad.plane_point(static_cast<double>(i) / kN, sc);
        for (int it = 0; it <= 5; ++it) {
            Vec xs(kN + 1), ys(kN + 1);
            for (std::size_t i = 0; i < kN; ++i) {
                xs[i] = pts[i].x;
                ys[i] = pts[i].y;
            }
            xs[kN] = xs[0];
            ys[kN] = ys[0];
            plot.add_series(it == 0 ? "C" : "F^" + std::to_string(it) + "(C)", xs, ys);
            for (auto& p : pts) p = map(p);
        }
        write_text(cli, out, "annulus.svg", plot.render());
    }
    out.verdict_summary = {{"type_P", rep.type_P}, {"type_Q", rep.type_Q}};
    return out;
}

RunOutputs cmd_certify(const Cli& cli, const Json& cfg) {
    PlanarMap map = planar_map_from_json(need_field(cfg, "map"));
    auto structures = structures_of(cfg);
    auto window = window_of(cfg);
    CertifyConfig cc = certify_cfg_of(cfg);

    auto certs = certify(map, structures, window, cc);
    RunOutputs out;
    Json arr = Json::array();
    bool all = true;
    for (const auto& c : certs) {
        arr.push_back(to_json(c));
        all = all && c.verdict == CertVerdict::non_synchronizing_for_structure;
    }
    write_json_file(cli, out, "certify.json", arr);

    // Section profile for the first structure, for plotting psi(t) - t.
    if (certs[0].note.find("fixed point search failed") == std::string::npos) {
        auto psi = slave_section(map, structures[0], certs[0].fixed_point);
        CsvTable t;
        t.columns = {"t", "psi_minus_t"};
        const std::size_t n = 5000;
        for (std::size_t i = 0; i <= n; ++i) {
            const double tt = window.first +
                              (window.second - window.first) * static_cast<double>(i) /
                                  static_cast<double>(n);
            t.rows.push_back({tt, psi(tt) - tt});
        }
        write_text(cli, out, "psi.csv", to_csv(t));
    }
    out.verdict_summary = {{"all_certified", all},
                           {"n_structures", structures.size()}};
    return out;
}

RunOutputs cmd_perturb(const Cli& cli, const Json& cfg) {
    PlanarMap map = planar_map_from_json(need_field(cfg, "map"));
    auto structures = structures_of(cfg);
    auto window = window_of(cfg);
    CertifyConfig cc = certify_cfg_of(cfg);
    const std::uint64_t seed = seed_of(cfg);

    Vec eps = vec_from_json(need_field(cfg, "eps_list"));
    auto n_samples = static_cast<std::size_t>(cfg.value("n_samples", 20.0));
    SweepReport rep =
        perturbation_sweep(map, eps, n_samples, structures, seed, window, cc);

    RunOutputs out;
    std::string csv = "epsilon,sample,structure_id,n_fixed_points,verdict\n";
    for (const auto& cell : rep.cells) {
        csv += format_double(cell.epsilon);
        csv += ',' + std::to_string(cell.sample);
        csv += ',' + std::to_string(cell.structure_id);
        csv += ',' + std::to_string(cell.n_fixed_points);
        csv += ',';
        csv += cert_verdict_name(cell.verdict);
        csv += '\n';
    }
    write_text(cli, out, "sweep.csv", csv);

    Json summary = to_json(rep);
    if (cfg.contains("critical")) {
        const Json& jc = cfg["critical"];
        EpsilonBracket br = estimate_critical_epsilon(
            map, structures[0], jc.value("seed", static_cast<double>(seed)),
            jc.value("eps_lo", 1e-4), jc.value("eps_hi", 1e-1),
            static_cast<std::size_t>(jc.value("iters", 10.0)), window, cc);
        summary["eps_star"] = Json{{"lo", br.lo}, {"hi", br.hi}};
    }
    write_json_file(cli, out, "sweep.json", summary);
    out.verdict_summary = {{"success_fraction", rep.success_fraction}};
    return out;
}

RunOutputs cmd_plot(const Cli& cli) {
    if (cli.plot_csv.empty()) throw config_error("plot needs --csv");
    if (cli.plot_y.empty()) throw config_error("plot needs at least one --y column");
    CsvTable t = read_csv(cli.plot_csv);
    const std::size_t xi = t.column_index(cli.plot_x);
    SvgPlot plot;
    plot.set_title(cli.plot_title.empty() ? fs::path(cli.plot_csv).filename().string()
                                          : cli.plot_title);
    plot.set_labels(cli.plot_x, cli.plot_y.size() == 1 ? cli.plot_y[0] : "value");
    plot.set_log_y(cli.plot_log_y);
    for (const auto& name : cli.plot_y) {
        const std::size_t yi = t.column_index(name);
        Vec xs(t.rows.size()), ys(t.rows.size());
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            xs[r] = t.rows[r][xi];
            ys[r] = t.rows[r][yi];
        }
        plot.add_series(name, xs, ys);
    }
    RunOutputs out;
    write_text(cli, out, "plot.svg", plot.render());
    return out;
}

Json resolve_config(const Cli& cli) {
    Json cfg = cli.config_path.empty() ? Json::object()
                                       : load_json_file(cli.config_path);
    if (!cfg.is_object()) throw config_error("config root must be a JSON object");
    if (cli.seed_set || !cfg.contains("seed")) cfg["seed"] = cli.seed;
    return cfg;
}

void write_manifest(const Cli& cli, const std::string& command, const Json& cfg,
                    const RunOutputs& out, double wall_ms) {
    Json m;
    m["tool"] = kToolVersion;
    m["command"] = command;
    m["config"] = cfg;
    m["outputs"] = out.files;
    m["verdict_summary"] = out.verdict_summary;
    m["diverged"] = out.diverged;
    m["wall_ms"] = wall_ms;
    atomic_write(fs::path(cli.out_dir) / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synchronization experiments for driven maps and flows"};
    app.require_subcommand(1);
    // Global options may follow the subcommand name.
    app.fallthrough();

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON config file");
    auto* seed_opt = app.add_option("--seed", cli.seed, "override the config seed");
    app.add_option("--out", cli.out_dir, "output directory (created if absent)");
    app.add_option("--threads", cli.threads, "worker threads for pair runs");

    app.add_subcommand("orbit", "iterate a map system from a start point");
    app.add_subcommand("integrate", "integrate a flow system over [0, T]");
    app.add_subcommand("sync-test", "master-slave synchronization trial");
    app.add_subcommand("lyapunov", "conditional Lyapunov exponent along an orbit");
    app.add_subcommand("linsync", "linear synchronizability analysis");
    app.add_subcommand("annulus", "annulus type report for a planar map");
    app.add_subcommand("certify", "fixed-point non-synchronization certificates");
    app.add_subcommand("perturb-sweep", "certificate robustness under perturbations");
    auto* plot_cmd = app.add_subcommand("plot", "render CSV columns to an SVG line plot");
    plot_cmd->add_option("--csv", cli.plot_csv, "input CSV path");
    plot_cmd->add_option("--x", cli.plot_x, "x column name");
    plot_cmd->add_option("--y", cli.plot_y, "y column name (repeatable)");
    plot_cmd->add_option("--title", cli.plot_title, "plot title");
    plot_cmd->add_flag("--log-y", cli.plot_log_y, "logarithmic y axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cli.seed_set = seed_opt->count() > 0;
    const std::string command = app.get_subcommands().front()->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    try {
        fs::create_directories(cli.out_dir);
        Json cfg;
        RunOutputs out;
        if (command == "plot") {
            cfg = Json{{"csv", cli.plot_csv}, {"x", cli.plot_x}, {"y", cli.plot_y},
                       {"log_y", cli.plot_log_y}, {"seed", cli.seed}};
            out = cmd_plot(cli);
        } else {
            cfg = resolve_config(cli);
            if (command == "orbit") out = cmd_orbit(cli, cfg);
            else if (command == "integrate") out = cmd_integrate(cli, cfg);
            else if (command == "sync-test") out = cmd_sync_test(cli, cfg);
            else if (command == "lyapunov") out = cmd_lyapunov(cli, cfg);
            else if (command == "linsync") out = cmd_linsync(cli, cfg);
            else if (command == "annulus") out = cmd_annulus(cli, cfg);
            else if (command == "certify") out = cmd_certify(cli, cfg);
            else if (command == "perturb-sweep") out = cmd_perturb(cli, cfg);
        }
        const double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        write_manifest(cli, command, cfg, out, wall_ms);
        return out.diverged ? 3 : 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const divergence_error& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
