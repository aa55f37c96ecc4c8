#include "synclab/config.hpp"

#include <fstream>
#include <numbers>

#include "synclab/errors.hpp"

namespace synclab {

namespace {

// All schema violations surface as config_error so the CLI maps them to one
// exit code.
[[noreturn]] void bad(const std::string& msg) { throw config_error(msg); }

double need_num(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) bad(std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

double opt_num(const Json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) bad(std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

}  // namespace

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config file: " + path.string());
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) bad("invalid JSON in " + path.string());
    return j;
}

Mat mat_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) bad("matrix must be an array of rows");
    const std::size_t rows = j.size(), cols = j[0].size();
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) bad("matrix rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) bad("matrix entries must be numbers");
            m(i, k) = j[i][k].get<double>();
        }
    }
    return m;
}

Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vec vec_from_json(const Json& j) {
    if (!j.is_array()) bad("vector must be an array");
    Vec v(j.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!j[i].is_number()) bad("vector entries must be numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

PlanarPolarMap polar_from_json(const Json& j) {
    if (j.value("system", "") != "polar") bad("expected a polar system config");
    return PlanarPolarMap(opt_num(j, "mu", 1e-7),
                          opt_num(j, "beta_coeff", 2.0 * std::numbers::pi));
}

System system_from_json(const Json& j) {
    const std::string kind = j.value("system", "");
    if (kind == "polar") return make_system(polar_from_json(j));
    if (kind == "henon")
        return make_system(HenonMap{opt_num(j, "a", 1.4), opt_num(j, "b", 0.3)});
    if (kind == "lorenz")
        return make_system(LorenzSystem{opt_num(j, "sigma", 10.0), opt_num(j, "r", 28.0),
                                        opt_num(j, "b", 8.0 / 3.0)});
    if (kind == "linear") {
        if (!j.contains("matrix")) bad("linear system needs a 'matrix'");
        LinearSystem sys{mat_from_json(j["matrix"]), SystemKind::map};
        const std::string k = j.value("kind", "map");
        if (k == "flow") {
            sys.kind = SystemKind::flow;
        } else if (k != "map") {
            bad("linear 'kind' must be \"map\" or \"flow\"");
        }
        return make_system(sys);
    }
    bad("unknown 'system': \"" + kind + "\"");
}

PlanarMap planar_map_from_json(const Json& j) {
    const std::string kind = j.value("system", "");
    if (kind == "polar") return polar_from_json(j).as_planar_map();
    if (kind == "henon") {
        HenonMap h{opt_num(j, "a", 1.4), opt_num(j, "b", 0.3)};
        PlanarMap m;
        m.fwd = [h](const Vec2& p) { return h.apply(p); };
        return m;
    }
    bad("planar analysis needs a polar or henon system");
}

ProductStructure structure_from_json(const Json& j) {
    if (j.contains("rotation"))
        return ProductStructure::rotation2d(need_num(j, "rotation"));
    if (!j.contains("transform")) bad("structure needs 'transform' or 'rotation'");
    Mat t = mat_from_json(j["transform"]);
    Vec offset(t.rows(), 0.0);
    if (j.contains("offset")) offset = vec_from_json(j["offset"]);
    if (!j.contains("drive") || !j["drive"].is_array()) bad("structure needs a 'drive' index list");
    std::vector<std::size_t> drive;
    for (const auto& e : j["drive"]) {
        if (!e.is_number_unsigned()) bad("drive indices must be non-negative integers");
        drive.push_back(e.get<std::size_t>());
    }
    return ProductStructure(std::move(t), std::move(offset), std::move(drive));
}

Json structure_to_json(const ProductStructure& s) {
    Json j;
    j["transform"] = mat_to_json(s.transform());
    j["offset"] = s.offset();
    j["drive"] = s.drive_indices();
    return j;
}

TrialConfig trial_from_json(const Json& j, std::size_t response_dim) {
    TrialConfig cfg;
    cfg.n_steps = static_cast<std::size_t>(opt_num(j, "n_steps", 2000));
    cfg.n_pairs = static_cast<std::size_t>(opt_num(j, "n_pairs", 8));
    cfg.delta_sync = opt_num(j, "delta_sync", 1e-8);
    cfg.delta_fail = opt_num(j, "delta_fail", 1e-2);
    cfg.h = opt_num(j, "h", 1e-3);
    cfg.init_box = Box::cube(response_dim, opt_num(j, "init_half_width", 1.0));
    return cfg;
}

DriveSequence drive_from_json(const Json& j, std::size_t drive_dim,
                              std::uint64_t seed) {
    const std::string kind = j.value("kind", "");
    if (kind == "constant") {
        if (!j.contains("value")) bad("constant drive needs 'value'");
        Vec v = vec_from_json(j["value"]);
        if (v.size() != drive_dim) bad("constant drive dimension mismatch");
        return DriveSequence::constant(std::move(v));
    }
    if (kind == "iid")
        return DriveSequence::iid_uniform(seed,
                                          Box::cube(drive_dim, opt_num(j, "half_width", 1.0)));
    if (kind == "sinusoid")
        return DriveSequence::sinusoid(seed, opt_num(j, "amp", 1.0),
                                       opt_num(j, "freq", 1.0), drive_dim);
    bad("unknown drive kind: \"" + kind + "\"");
}

Json to_json(const SyncVerdict& v) {
    Json j;
    j["verdict"] = verdict_name(v.verdict);
    j["worst_final_distance"] = v.worst_final_distance;
    j["delta_sync"] = v.delta_sync;
    j["delta_fail"] = v.delta_fail;
    j["excluded_starts"] = v.excluded_starts;
    Json ev = Json::array();
    for (const auto& e : v.evidence) {
        Json je;
        je["pair_id"] = e.pair_id;
        je["start_id"] = e.start_id;
        je["initial_distance"] = e.initial_distance;
        je["final_distance"] = e.final_distance;
        je["max_distance"] = e.max_distance;
        je["min_last_window"] = e.min_last_window;
        je["diverged"] = e.diverged;
        ev.push_back(std::move(je));
    }
    j["evidence"] = std::move(ev);
    return j;
}

Json to_json(const LinearSyncReport& r) {
    Json j;
    j["structure"] = structure_to_json(r.structure);
    j["response_block"] = mat_to_json(r.response_block);
    j["criterion_value"] = r.criterion_value;
    j["synchronizable"] = r.synchronizable;
    j["borderline"] = r.borderline;
    j["power_stagnation"] = r.power_stagnation;
    return j;
}

Json to_json(const DensityResult& r) {
    Json j;
    j["n_samples"] = r.n_samples;
    j["n_found"] = r.n_found;
    j["fraction"] = r.fraction;
    j["wilson_lo"] = r.wilson_lo;
    j["wilson_hi"] = r.wilson_hi;
    return j;
}

Json to_json(const WindowResult& w) {
    Json j;
    j["lo"] = w.lo;
    j["hi"] = w.hi;
    j["pass"] = w.pass();
    j["witnesses"] = w.witnesses;
    if (w.witness) j["witness"] = *w.witness;
    j["borderline"] = w.borderline;
    return j;
}

Json to_json(const ConditionIEvidence& e) {
    Json j;
    j["pass"] = e.pass;
    j["separation"] = e.separation;
    j["iters_forward"] = e.iters_forward;
    j["iters_backward"] = e.iters_backward;
    j["dist_forward"] = e.dist_forward;
    j["dist_backward"] = e.dist_backward;
    j["early_exit_forward"] = e.early_exit_forward;
    j["early_exit_backward"] = e.early_exit_backward;
    j["monotone"] = e.monotone;
    return j;
}

Json to_json(const TypeReport& r) {
    Json j;
    j["condition_i"] = to_json(r.condition_i);
    j["displacement_bottom"] = Json{{"min", r.displacements.bottom.min},
                                    {"max", r.displacements.bottom.max}};
    j["displacement_top"] = Json{{"min", r.displacements.top.min},
                                 {"max", r.displacements.top.max}};
    j["condition_ii"] = to_json(r.condition_ii);
    j["condition_iii"] = to_json(r.condition_iii);
    j["type_P"] = r.type_P;
    j["type_Q"] = r.type_Q;
    return j;
}

Json to_json(const ConditionRReport& r) {
    Json j;
    j["inner"] = to_json(r.inner);
    j["outer"] = to_json(r.outer);
    j["overall"] = r.overall;
    return j;
}

Json to_json(const FixedPointCertificate& c) {
    Json j;
    j["structure_id"] = c.structure_id;
    j["fixed_point"] = Json::array({c.fixed_point.x, c.fixed_point.y});
    j["leaf_constant"] = c.leaf_constant;
    j["anchor_t"] = c.anchor_t;
    Json pts = Json::array();
    for (const auto& fp : c.fixed_points) {
        Json p;
        p["t"] = fp.t;
        p["kind"] = fp.kind == FixedPointKind::transversal ? "transversal" : "tangential";
        pts.push_back(std::move(p));
    }
    j["fixed_points"] = std::move(pts);
    j["verdict"] = cert_verdict_name(c.verdict);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

Json to_json(const SweepReport& r) {
    Json j;
    j["eps_list"] = r.eps_list;
    j["success_fraction"] = r.success_fraction;
    return j;
}

}  // namespace synclab
