#pragma once

#include <cstdint>
#include <random>

namespace netcrop {

using Rng = std::mt19937_64;

/// Deterministic child seed for stream `stream` of `parent` (splitmix64 mixing).
/// Used so that repetition r, subnetwork q, candidate k each get a seed that does
/// not depend on the order in which work is scheduled.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline Rng child_rng(std::uint64_t parent, std::uint64_t stream) {
  return Rng(derive_seed(parent, stream));
}

/// Uniform draw in [0, 1).
inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace netcrop
