#pragma once

#include <random>
#include <string_view>

#include "fasec/common.hpp"

namespace fasec {

/// Derives an independent, reproducible RNG stream from (master seed,
/// purpose label, index). Streams for different purposes never share state,
/// so adding draws to one experiment stage cannot shift another.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::string_view purpose,
                                   std::uint64_t index = 0) {
  const std::uint64_t label = fnv1a(purpose);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(label),       static_cast<std::uint32_t>(label >> 32),
                    static_cast<std::uint32_t>(index),       static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& g) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

/// Standard circularly-symmetric complex normal draw (unit variance).
inline cd complex_normal(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  return {n(g), n(g)};
}

}  // namespace fasec
