#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace metacrystal::ensemble {

/// Observables from one disorder realization, keyed by name.
using ObservableMap = std::map<std::string, double>;

/// Runs realization `index` with its derived seed; pure function of both.
using RealizationFn =
    std::function<ObservableMap(std::uint64_t seed, int index)>;

struct RealizationRecord {
    int index = 0;
    std::uint64_t seed = 0;
    ObservableMap observables;
};

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct EnsembleReport {
    std::vector<RealizationRecord> realizations;  // in index order
    std::map<std::string, Stats> stats;
};

/// Deterministic given base_seed regardless of worker count: realizations
/// are computed in parallel, collected by index, and reduced in index
/// order. The first failing realization's error is rethrown with its index.
EnsembleReport run_ensemble(int n_realizations, std::uint64_t base_seed,
                            const RealizationFn& fn, int n_workers = 1);

}  // namespace metacrystal::ensemble
