#pragma once

#include <cstdint>
#include <random>

namespace hawkes {

using Rng = std::mt19937_64;

// SplitMix64 finaliser; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Independent, reproducible stream `stream_id` derived from a top-level seed.
// Distinct (seed, stream_id) pairs map to distinct 64-bit stream seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept;
Rng seed_split(std::uint64_t seed, std::uint64_t stream_id);

}  // namespace hawkes
