#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace hetseg::rng {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t value) noexcept { return mix(seed ^ mix(value)); }

/// Stream seed for one (base seed, noise level, replication) cell. Depends only
/// on the key, never on scheduling order.
inline std::uint64_t stream_seed(std::uint64_t base_seed, double sigma2, std::uint64_t rep) noexcept {
    return combine(combine(mix(base_seed), std::bit_cast<std::uint64_t>(sigma2)), rep);
}

inline Engine make_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Engine(seq);
}

} // namespace hetseg::rng
