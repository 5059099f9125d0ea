#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "metacrystal/band.hpp"
#include "metacrystal/cavity.hpp"
#include "metacrystal/lattice.hpp"

namespace metacrystal::scenario {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Config validation failure; `pointer` is the JSON-pointer-style path of
/// the offending element.
struct SchemaError : std::runtime_error {
    std::string pointer;
    SchemaError(std::string ptr, const std::string& msg)
        : std::runtime_error(ptr + ": " + msg), pointer(std::move(ptr)) {}
};

struct PacketCfg {
    double center = -20.0;
    double sigma_sq = 16.0;
    double k0a = std::numbers::pi / 2.0;
};

struct PotentialCfg {
    std::string kind = "none";  // none | site_delta | gaussian_well | uniform_disorder
    int site = 0;
    double U0 = 0.0;
    double d = 0.0, s = 1.0;
    double half_width = 0.0;
    std::uint64_t seed = 0;

    lattice::PotentialProfile build(int N, int origin_label) const;
};

struct BandReportCfg {
    band::DispersionSpec spec;
    int M = 64;
    int n_samples = 256;
};

struct LatticeRunCfg {
    band::DispersionSpec spec;
    int n_sites = 256;
    int origin_label = -128;
    PacketCfg packet;
    PotentialCfg potential;
    double duration = 0.0;
    double dt = 0.01;
    int sample_every = 100;
    bool snapshots = false;
    std::optional<int> barrier_site;  // partition report
    double t_eval = 0.0;
};

struct CavityRunCfg {
    cavity::CavityConfig cavity;
    cavity::InjectionSpec injection;
    int n_trips = 100;
    int sample_every = 1;
    bool snapshots = false;
};

struct EnsembleRunCfg {
    LatticeRunCfg scenario;
    int n_realizations = 20;
    std::uint64_t base_seed = 0;
    int workers = 0;  // 0 = hardware concurrency
    double slope_t0 = 0.0, slope_t1 = 0.0;  // 0,0 = full run
    double early_t0 = 0.0, early_t1 = 10.0;
    double late_t0 = 20.0, late_t1 = 40.0;
};

struct ScenarioConfig {
    std::string kind;
    std::variant<BandReportCfg, LatticeRunCfg, CavityRunCfg, EnsembleRunCfg> run;
    json effective;           // config with all defaults applied
    std::string config_hash;  // FNV-1a over the effective document
};

struct Overrides {
    std::optional<std::uint64_t> seed;  // replaces disorder / base seed
    std::optional<int> workers;         // ensemble only
};

/// Strict parse: unknown keys rejected, every value range-checked, defaults
/// echoed into `effective`.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_json(const json& doc);

/// Executes the scenario and writes summary.json, trace.csv, heatmap.csv
/// (and snapshots.bin + snapshots.json when requested) under out_dir.
void run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                  const Overrides& ov = {});

/// 64-bit FNV-1a, hex-encoded.
std::string fnv1a_hex(const std::string& data);

/// Shortest round-trip formatting of a double (17 significant digits).
std::string format_double(double v);

}  // namespace metacrystal::scenario
