#pragma once

#include <cstdint>

// Counter-based seed derivation so that every Monte Carlo trial draws from
// its own stream regardless of execution order or thread count.
namespace rfdop::seeding {

// SplitMix64 output function applied to x + golden-ratio increment.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// seed' = mix64(mix64(mix64(master) ^ grid_index) ^ trial)
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t trial) noexcept {
    return mix64(mix64(mix64(master) ^ grid_index) ^ trial);
}

// Independent sub-streams of one trial (bits, noise, ...).
enum class Stream : std::uint64_t { Bits = 1, Noise = 2, StaticNoise = 3, MovingNoise = 4, Gaussian = 5 };

constexpr std::uint64_t stream_seed(std::uint64_t trial, Stream stream) noexcept {
    return mix64(trial ^ mix64(static_cast<std::uint64_t>(stream)));
}

}  // namespace rfdop::seeding
