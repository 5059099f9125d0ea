#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "metacrystal/scenario.hpp"

namespace {

namespace sc = metacrystal::scenario;

struct CommonArgs {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_workers) {
    cmd->add_option("--config", args.config, "Scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out, "Output directory")->required();
    cmd->add_option("--seed", args.seed,
                    "Override the disorder / ensemble base seed");
    if (with_workers)
        cmd->add_option("--workers", args.workers,
                        "Worker threads (0 = hardware concurrency)")
            ->check(CLI::NonNegativeNumber);
}

int execute(const CommonArgs& args, const std::string& expected_kind) {
    sc::ScenarioConfig cfg;
    try {
        cfg = sc::parse_config(args.config);
        if (cfg.kind != expected_kind)
            throw sc::SchemaError("/kind", "expected '" + expected_kind +
                                               "' for this subcommand, got '" +
                                               cfg.kind + "'");
    } catch (const sc::SchemaError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    try {
        sc::Overrides ov;
        ov.seed = args.seed;
        ov.workers = args.workers;
        sc::run_scenario(cfg, args.out, ov);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::printf("wrote %s (config_hash=%s)\n", args.out.c_str(),
                cfg.config_hash.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Simulator of one-way wave transport in 1D metacrystals and the "
        "self-imaging ring cavity that emulates them"};
    app.set_version_flag("--version", sc::kToolVersion);
    app.require_subcommand(1);

    CommonArgs band_args, lattice_args, cavity_args, ensemble_args;
    auto* band =
        app.add_subcommand("band", "Dispersion report: band samples, hopping "
                                   "amplitudes, one-way certificate");
    add_common(band, band_args, false);
    auto* lat = app.add_subcommand(
        "lattice", "Wave-packet propagation on the tight-binding ring");
    add_common(lat, lattice_args, false);
    auto* cav = app.add_subcommand(
        "cavity", "Driven round-trip evolution in the 4-f ring resonator");
    add_common(cav, cavity_args, false);
    auto* ens = app.add_subcommand(
        "ensemble", "Disorder-averaged lattice runs with per-seed statistics");
    add_common(ens, ensemble_args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (band->parsed()) return execute(band_args, "band_report");
    if (lat->parsed()) return execute(lattice_args, "lattice_run");
    if (cav->parsed()) return execute(cavity_args, "cavity_run");
    return execute(ensemble_args, "ensemble_run");
}
