#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const char* g_cli_path = nullptr;

// Each case gets a fresh scratch directory under the system temp root.
fs::path fresh_dir() {
    static int counter = 0;
    fs::path d = fs::temp_directory_path() /
                 ("synclab_cli_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string("\"") + g_cli_path + "\" " + args +
                      " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p);
    f << content;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Json jload(const fs::path& p) { return Json::parse(slurp(p)); }

fs::path write_config(const fs::path& dir, const Json& j) {
    fs::path p = dir / "config.json";
    write_file(p, j.dump(2));
    return p;
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += (c == '\n');
    return n;
}

}  // namespace

TEST_CASE("bad invocations exit with the parse code") {
    fs::path d = fresh_dir();
    CHECK(run_cli("--out " + d.string()) == 2);            // no subcommand
    CHECK(run_cli("orbit --nonsense x") == 2);             // unknown flag
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("config problems exit with the config code") {
    fs::path d = fresh_dir();
    CHECK(run_cli("orbit --config " + (d / "missing.json").string() + " --out " +
                  d.string()) == 2);

    write_file(d / "garbage.json", "{ not json !");
    CHECK(run_cli("orbit --config " + (d / "garbage.json").string() + " --out " +
                  d.string()) == 2);

    write_file(d / "array.json", "[1,2,3]");
    CHECK(run_cli("orbit --config " + (d / "array.json").string() + " --out " +
                  d.string()) == 2);

    // Well-formed JSON, missing required field.
    fs::path cfg = write_config(d, Json{{"system", "henon"}});
    CHECK(run_cli("orbit --config " + cfg.string() + " --out " + d.string()) == 2);

    // Wrong dispatch: a flow cannot be iterated as a map.
    fs::path cfg2 = write_config(
        d, Json{{"system", "lorenz"}, {"start", {1.0, 1.0, 1.0}}});
    CHECK(run_cli("orbit --config " + cfg2.string() + " --out " + d.string()) == 2);
}

TEST_CASE("orbit writes the trajectory, a manifest, and exits cleanly") {
    fs::path d = fresh_dir();
    fs::path cfg = write_config(
        d, Json{{"system", "henon"}, {"start", {0.1, 0.1}}, {"n", 50}});
    CHECK(run_cli("orbit --config " + cfg.string() + " --out " + d.string()) == 0);

    std::string csv = slurp(d / "orbit.csv");
    CHECK(csv.rfind("n,s0,s1\n", 0) == 0);
    CHECK(line_count(csv) == 52);  // header + 51 states

    Json m = jload(d / "manifest.json");
    CHECK(m["tool"] == "synclab 0.1.0");
    CHECK(m["command"] == "orbit");
    CHECK(m["diverged"] == false);
    CHECK(m["verdict_summary"]["rows"] == 51);
    CHECK(m["config"]["seed"] == 0);
    CHECK(m["wall_ms"].get<double>() >= 0.0);
    bool listed = false;
    for (const auto& f : m["outputs"]) listed = listed || f == "orbit.csv";
    CHECK(listed);
}

TEST_CASE("integrate writes a time column and honors the step size") {
    fs::path d = fresh_dir();
    fs::path cfg = write_config(d, Json{{"system", "lorenz"},
                                        {"start", {1.0, 1.0, 1.0}},
                                        {"T", 0.1},
                                        {"h", 1e-3}});
    CHECK(run_cli("integrate --config " + cfg.string() + " --out " + d.string()) ==
          0);
    std::string csv = slurp(d / "trajectory.csv");
    CHECK(csv.rfind("t,s0,s1,s2\n", 0) == 0);
    CHECK(line_count(csv) == 102);  // header + 101 samples
}

TEST_CASE("a diverging orbit exits 3 and keeps the finite prefix") {
    fs::path d = fresh_dir();
    fs::path cfg = write_config(
        d, Json{{"system", "henon"}, {"start", {10.0, 10.0}}, {"n", 100}});
    CHECK(run_cli("orbit --config " + cfg.string() + " --out " + d.string()) == 3);

    Json m = jload(d / "manifest.json");
    CHECK(m["diverged"] == true);
    std::string csv = slurp(d / "orbit.csv");
    CHECK(line_count(csv) >= 2);   // header + at least the start
    CHECK(line_count(csv) < 102);  // strictly shorter than requested
    // Every recorded value is finite.
    CHECK(csv.find("inf") == std::string::npos);
    CHECK(csv.find("nan") == std::string::npos);
}

TEST_CASE("sync-test reports a verdict and replaying the manifest is byte identical") {
    Json cfg_json{
        {"system", Json{{"system", "henon"}}},
        {"structure", Json{{"transform", {{1.0, 0.0}, {0.0, 1.0}}},
                           {"offset", {0.0, 0.0}},
                           {"drive", {1}}}},
        {"mode", "orbit"},
        {"orbit_starts", {{0.3, 0.2}, {0.1, -0.4}}},
        {"trial", Json{{"n_steps", 60}, {"n_pairs", 3}}},
        {"seed", 11}};

    fs::path d1 = fresh_dir();
    fs::path cfg1 = write_config(d1, cfg_json);
    CHECK(run_cli("sync-test --config " + cfg1.string() + " --out " + d1.string()) ==
          0);
    Json s1 = jload(d1 / "summary.json");
    CHECK(s1["verdict"] == "synchronizing");
    CHECK(s1["worst_final_distance"] == 0.0);

    // The manifest echoes the resolved config; feeding it back reproduces
    // every artifact byte for byte.
    Json m1 = jload(d1 / "manifest.json");
    fs::path d2 = fresh_dir();
    fs::path cfg2 = write_config(d2, m1["config"]);
    CHECK(run_cli("sync-test --config " + cfg2.string() + " --out " + d2.string()) ==
          0);
    CHECK(slurp(d1 / "evidence.csv") == slurp(d2 / "evidence.csv"));
    CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
}

TEST_CASE("--seed overrides the config seed and lands in the manifest") {
    Json cfg_json{
        {"system", Json{{"system", "henon"}}},
        {"structure", Json{{"transform", {{1.0, 0.0}, {0.0, 1.0}}},
                           {"offset", {0.0, 0.0}},
                           {"drive", {0}}}},
        {"mode", "orbit"},
        {"orbit_starts", {{0.3, 0.2}}},
        {"trial", Json{{"n_steps", 40}, {"n_pairs", 4}}},
        {"seed", 11}};

    fs::path d1 = fresh_dir();
    CHECK(run_cli("sync-test --config " + write_config(d1, cfg_json).string() +
                  " --out " + d1.string()) == 0);
    fs::path d2 = fresh_dir();
    CHECK(run_cli("sync-test --config " + write_config(d2, cfg_json).string() +
                  " --seed 5 --out " + d2.string()) == 0);

    CHECK(jload(d1 / "manifest.json")["config"]["seed"] == 11);
    CHECK(jload(d2 / "manifest.json")["config"]["seed"] == 5);
    // Different seeds draw different slave pairs.
    CHECK(slurp(d1 / "evidence.csv") != slurp(d2 / "evidence.csv"));
}

TEST_CASE("sync-test validates the mode") {
    fs::path d = fresh_dir();
    Json cfg{{"system", Json{{"system", "henon"}}},
             {"structure", Json{{"transform", {{1.0, 0.0}, {0.0, 1.0}}},
                                {"offset", {0.0, 0.0}},
                                {"drive", {1}}}},
             {"mode", "weird"},
             {"seed", 1}};
    CHECK(run_cli("sync-test --config " + write_config(d, cfg).string() +
                  " --out " + d.string()) == 2);
}

TEST_CASE("lyapunov writes a negative conditional exponent for the stable split") {
    fs::path d = fresh_dir();
    Json cfg{{"system", Json{{"system", "lorenz"}}},
             {"structure", Json{{"transform",
                                 {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}},
                                {"offset", {0.0, 0.0, 0.0}},
                                {"drive", {0}}}},
             {"start", {1.0, 1.0, 1.0}},
             {"n", 2000},
             {"h", 1e-3},
             {"seed", 0}};
    CHECK(run_cli("lyapunov --config " + write_config(d, cfg).string() + " --out " +
                  d.string()) == 0);
    Json j = jload(d / "lyapunov.json");
    CHECK(j["lambda"].get<double>() < 0.0);
    CHECK(j["n"] == 2000);
}

TEST_CASE("linsync decides a structure and rejects an empty request") {
    fs::path d = fresh_dir();
    Json cfg{{"matrix", {{0.5, 0.0}, {0.0, 0.7}}},
             {"kind", "map"},
             {"structure", Json{{"transform", {{1.0, 0.0}, {0.0, 1.0}}},
                                {"offset", {0.0, 0.0}},
                                {"drive", {0}}}},
             {"seed", 3}};
    CHECK(run_cli("linsync --config " + write_config(d, cfg).string() + " --out " +
                  d.string()) == 0);
    Json j = jload(d / "linsync.json");
    CHECK(j["report"]["synchronizable"] == true);
    CHECK(jload(d / "manifest.json")["verdict_summary"]["synchronizable"] == true);

    fs::path d2 = fresh_dir();
    CHECK(run_cli("linsync --config " +
                  write_config(d2, Json{{"seed", 3}}).string() + " --out " +
                  d2.string()) == 2);
}

TEST_CASE("annulus reports the type and validates the interval") {
    fs::path d = fresh_dir();
    Json cfg{{"map", Json{{"system", "polar"}}}, {"annulus", {1.0, 2.0}},
             {"seed", 0}};
    CHECK(run_cli("annulus --config " + write_config(d, cfg).string() + " --out " +
                  d.string() + " --seed 0") == 0);
    Json j = jload(d / "annulus.json");
    CHECK(j["type_P"] == true);
    CHECK(j["type_Q"] == false);

    fs::path d2 = fresh_dir();
    Json bad{{"map", Json{{"system", "polar"}}}, {"annulus", {2.0, 1.0}},
             {"seed", 0}};
    CHECK(run_cli("annulus --config " + write_config(d2, bad).string() + " --out " +
                  d2.string()) == 2);
}

TEST_CASE("certify emits certificates and the section profile") {
    fs::path d = fresh_dir();
    Json cfg{{"map", Json{{"system", "polar"}}},
             {"structures", "rotations"},
             {"seed", 0}};
    CHECK(run_cli("certify --config " + write_config(d, cfg).string() + " --out " +
                  d.string()) == 0);
    Json arr = jload(d / "certify.json");
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 13);
    for (const auto& c : arr)
        CHECK(c["verdict"] == "non_synchronizing_for_structure");
    Json m = jload(d / "manifest.json");
    CHECK(m["verdict_summary"]["all_certified"] == true);
    CHECK(m["verdict_summary"]["n_structures"] == 13);

    std::string psi = slurp(d / "psi.csv");
    CHECK(psi.rfind("t,psi_minus_t\n", 0) == 0);
    CHECK(line_count(psi) == 5002);
}

TEST_CASE("plot renders selected columns and rejects missing ones") {
    fs::path d = fresh_dir();
    fs::path cfg = write_config(
        d, Json{{"system", "henon"}, {"start", {0.1, 0.1}}, {"n", 30}});
    REQUIRE(run_cli("orbit --config " + cfg.string() + " --out " + d.string()) == 0);
    fs::path csv = d / "orbit.csv";

    fs::path d2 = fresh_dir();
    CHECK(run_cli("plot --csv " + csv.string() + " --x s0 --y s1 --out " +
                  d2.string()) == 0);
    std::string svg = slurp(d2 / "plot.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);

    CHECK(run_cli("plot --csv " + csv.string() + " --x n --y nope --out " +
                  d2.string()) == 2);
    CHECK(run_cli("plot --x n --y s0 --out " + d2.string()) == 2);
    write_file(d / "empty.csv", "");
    CHECK(run_cli("plot --csv " + (d / "empty.csv").string() + " --x n --y s0 --out " +
                  d2.string()) == 2);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-synclab-binary>\n");
        return 1;
    }
    g_cli_path = argv[1];
    doctest::Context ctx;
    ctx.applyCommandLine(1, argv);
    return ctx.run();
}
