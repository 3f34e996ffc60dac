#pragma once

#include <cstdint>
#include <random>

namespace sparsenorm {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based seed derivation: the seed of stream `index` under `base`
/// depends only on the pair, never on how many other streams were drawn.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace sparsenorm
