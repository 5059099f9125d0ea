#pragma once

#include <cstdint>

// Counter-based random numbers. Every draw is a pure function of
// (seed, counter), so disorder realizations replay bit-exactly and
// parallel workers never share generator state.
namespace metacrystal::rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for realization `index` of an ensemble keyed on `base`.
// Adding realizations never perturbs earlier ones.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 1));
}

// Uniform double in [0, 1)
inline double uniform_unit(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = splitmix64(splitmix64(seed) + counter);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform double strictly inside (-half_width, half_width)
inline double uniform_symmetric(std::uint64_t seed, std::uint64_t counter,
                                double half_width) {
    double u = uniform_unit(seed, counter);
    if (u == 0.0) u = 0.5;  // excluded endpoint, probability 2^-53
    return half_width * (2.0 * u - 1.0);
}

}  // namespace metacrystal::rng
