#include "metacrystal/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "metacrystal/rng.hpp"

namespace metacrystal::ensemble {

EnsembleReport run_ensemble(int n_realizations, std::uint64_t base_seed,
                            const RealizationFn& fn, int n_workers) {
    if (n_realizations < 1)
        throw std::invalid_argument("run_ensemble: n_realizations >= 1");
    if (n_workers < 1) n_workers = 1;

    std::vector<RealizationRecord> records(n_realizations);
    std::vector<std::exception_ptr> errors(n_realizations);
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_realizations) return;
            RealizationRecord rec;
            rec.index = i;
            rec.seed = rng::derive_seed(base_seed, static_cast<std::uint64_t>(i));
            try {
                rec.observables = fn(rec.seed, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
            records[i] = std::move(rec);
        }
    };

    if (n_workers == 1 || n_realizations == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n = std::min(n_workers, n_realizations);
        pool.reserve(n);
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (int i = 0; i < n_realizations; ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw std::runtime_error("realization " + std::to_string(i) +
                                         ": " + e.what());
            }
        }
    }

    EnsembleReport rep;
    rep.realizations = std::move(records);

    // Index-ordered reduction fixes the floating-point summation order.
    for (const auto& rec : rep.realizations) {
        for (const auto& [name, value] : rec.observables) {
            auto [it, fresh] = rep.stats.try_emplace(name);
            Stats& s = it->second;
            if (fresh) {
                s.min = s.max = value;
            } else {
                s.min = std::min(s.min, value);
                s.max = std::max(s.max, value);
            }
            s.mean += value;  // accumulate; normalized below
        }
    }
    for (auto& [name, s] : rep.stats) {
        s.mean /= static_cast<double>(n_realizations);
    }
    for (const auto& rec : rep.realizations) {
        for (const auto& [name, value] : rec.observables) {
            Stats& s = rep.stats[name];
            s.stddev += (value - s.mean) * (value - s.mean);
        }
    }
    for (auto& [name, s] : rep.stats) {
        s.stddev = std::sqrt(s.stddev / static_cast<double>(n_realizations));
    }
    return rep;
}

}  // namespace metacrystal::ensemble
