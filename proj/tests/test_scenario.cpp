#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "metacrystal/scenario.hpp"

using namespace metacrystal;
namespace sc = metacrystal::scenario;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json minimal_lattice() {
    return json{{"kind", "lattice_run"},
                {"band", {{"kind", "sawtooth"}, {"J", 1.0}}},
                {"lattice", {{"n_sites", 64}, {"origin_label", -32}}},
                {"run", {{"duration", 2.0}, {"sample_every", 100}}}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("metacrystal_test_" + tag);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("parse_config_json: defaults are echoed and hashed") {
    const auto cfg = sc::parse_config_json(minimal_lattice());
    CHECK(cfg.kind == "lattice_run");
    CHECK(cfg.effective["packet"]["center"] == -20.0);
    CHECK(cfg.effective["packet"]["sigma_sq"] == 16.0);
    CHECK(cfg.effective["potential"]["kind"] == "none");
    CHECK(cfg.effective["run"]["dt"] == 0.01);
    CHECK(cfg.config_hash.size() == 16);
    // identical documents hash identically; edits change the hash
    CHECK(sc::parse_config_json(minimal_lattice()).config_hash ==
          cfg.config_hash);
    auto other = minimal_lattice();
    other["run"]["duration"] = 3.0;
    CHECK(sc::parse_config_json(other).config_hash != cfg.config_hash);
}

TEST_CASE("parse_config_json: schema violations carry pointer paths") {
    auto unknown = minimal_lattice();
    unknown["typo_key"] = 1;
    CHECK_THROWS_WITH_AS(sc::parse_config_json(unknown),
                         doctest::Contains("/typo_key"), sc::SchemaError);

    auto nested_unknown = minimal_lattice();
    nested_unknown["run"]["dtt"] = 0.5;
    CHECK_THROWS_WITH_AS(sc::parse_config_json(nested_unknown),
                         doctest::Contains("/run/dtt"), sc::SchemaError);

    auto missing = minimal_lattice();
    missing.erase("run");
    CHECK_THROWS_WITH_AS(sc::parse_config_json(missing),
                         doctest::Contains("/run"), sc::SchemaError);

    auto bad_type = minimal_lattice();
    bad_type["run"]["duration"] = "long";
    CHECK_THROWS_WITH_AS(sc::parse_config_json(bad_type),
                         doctest::Contains("/run/duration"), sc::SchemaError);

    auto bad_width = minimal_lattice();
    bad_width["packet"] = {{"sigma_sq", 0.5}};
    CHECK_THROWS_AS(sc::parse_config_json(bad_width), sc::SchemaError);

    json bad_T = {{"kind", "cavity_run"},
                  {"cavity", {{"T", -0.1}}},
                  {"run", {{"n_trips", 10}}}};
    CHECK_THROWS_WITH_AS(sc::parse_config_json(bad_T),
                         doctest::Contains("/cavity/T"), sc::SchemaError);

    CHECK_THROWS_AS(sc::parse_config_json(json{{"kind", "nope"}}),
                    sc::SchemaError);
    CHECK_THROWS_AS(sc::parse_config_json(json::array()), sc::SchemaError);
}

TEST_CASE("parse_config: empty and missing files") {
    const auto dir = fresh_dir("parse");
    fs::create_directories(dir);
    const auto empty = dir / "empty.json";
    std::ofstream(empty).close();
    CHECK_THROWS_AS(sc::parse_config(empty.string()), sc::SchemaError);
    CHECK_THROWS_AS(sc::parse_config((dir / "absent.json").string()),
                    std::runtime_error);
}

TEST_CASE("shipped scenario configs all parse") {
    const fs::path dir = METACRYSTAL_CONFIG_DIR;
    int n = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        const auto cfg = sc::parse_config(entry.path().string());
        CHECK(!cfg.config_hash.empty());
        ++n;
    }
    CHECK(n >= 11);
    const auto defect =
        sc::parse_config((dir / "fig2a_sawtooth.json").string());
    CHECK(defect.effective["potential"]["kind"] == "site_delta");
    CHECK(defect.effective["potential"]["U0"] == 2.0);
}

TEST_CASE("run_scenario: lattice outputs, hash embedding, determinism") {
    const auto cfg = sc::parse_config_json(minimal_lattice());
    const auto d1 = fresh_dir("run1");
    const auto d2 = fresh_dir("run2");
    sc::run_scenario(cfg, d1.string());
    sc::run_scenario(cfg, d2.string());

    for (const char* name : {"summary.json", "trace.csv", "heatmap.csv"})
        CHECK(fs::exists(d1 / name));
    const auto trace = slurp(d1 / "trace.csv");
    CHECK(trace.find(cfg.config_hash) != std::string::npos);
    CHECK(trace == slurp(d2 / "trace.csv"));  // byte-identical rerun
    CHECK(slurp(d1 / "heatmap.csv") == slurp(d2 / "heatmap.csv"));

    const auto summary = json::parse(slurp(d1 / "summary.json"));
    CHECK(summary["config_hash"] == cfg.config_hash);
    CHECK(summary["tool_version"] == sc::kToolVersion);
    CHECK(summary["config"] == cfg.effective);
    CHECK(summary["observables"].contains("final_norm"));
    CHECK(std::abs(summary["observables"]["final_norm"].get<double>() - 1.0) <
          1e-10);
}

TEST_CASE("run_scenario: snapshots with sidecar") {
    auto doc = minimal_lattice();
    doc["run"]["snapshots"] = true;
    const auto cfg = sc::parse_config_json(doc);
    const auto dir = fresh_dir("snaps");
    sc::run_scenario(cfg, dir.string());
    REQUIRE(fs::exists(dir / "snapshots.bin"));
    const auto side = json::parse(slurp(dir / "snapshots.json"));
    CHECK(side["n_sites"] == 64);
    const auto frames = side["frames"].get<std::size_t>();
    CHECK(fs::file_size(dir / "snapshots.bin") ==
          frames * 64 * 2 * sizeof(double));
}

TEST_CASE("run_scenario: seed override changes disorder outputs only") {
    json doc = minimal_lattice();
    doc["potential"] = {{"kind", "uniform_disorder"},
                        {"half_width", 0.5},
                        {"seed", 1}};
    const auto cfg = sc::parse_config_json(doc);
    const auto d1 = fresh_dir("seed1");
    const auto d2 = fresh_dir("seed2");
    sc::Overrides ov;
    ov.seed = 77;
    sc::run_scenario(cfg, d1.string());
    sc::run_scenario(cfg, d2.string(), ov);
    const auto s1 = json::parse(slurp(d1 / "summary.json"));
    const auto s2 = json::parse(slurp(d2 / "summary.json"));
    CHECK(s1["seeds"]["disorder"] == 1);
    CHECK(s2["seeds"]["disorder"] == 77);
    CHECK(s1["observables"]["final_com"] != s2["observables"]["final_com"]);
    // the hash covers the config, not the override
    CHECK(s1["config_hash"] == s2["config_hash"]);
}

TEST_CASE("run_scenario: ensemble summary carries per-observable stats") {
    json doc = {{"kind", "ensemble_run"},
                {"scenario", minimal_lattice()},
                {"n_realizations", 4},
                {"base_seed", 5},
                {"workers", 2},
                {"windows",
                 {{"slope", {0.0, 2.0}},
                  {"early", {0.0, 1.0}},
                  {"late", {1.0, 2.0}}}}};
    doc["scenario"]["potential"] = {{"kind", "uniform_disorder"},
                                    {"half_width", 0.5}};
    doc["scenario"]["run"]["sample_every"] = 10;
    const auto cfg = sc::parse_config_json(doc);
    const auto dir = fresh_dir("ens");
    sc::run_scenario(cfg, dir.string());
    const auto summary = json::parse(slurp(dir / "summary.json"));
    for (const char* key : {"com_slope", "com_slope_early", "com_slope_late",
                            "final_norm"}) {
        CHECK(summary["observables"][key].contains("mean"));
        CHECK(summary["observables"][key].contains("stddev"));
        CHECK(summary["observables"][key].contains("min"));
        CHECK(summary["observables"][key].contains("max"));
    }
    const auto csv = slurp(dir / "realizations.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 4);  // header + rows
}

TEST_CASE("format_double round-trips and fnv1a is stable") {
    CHECK(sc::format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(sc::format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(sc::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(sc::fnv1a_hex("a") != sc::fnv1a_hex("b"));
}
