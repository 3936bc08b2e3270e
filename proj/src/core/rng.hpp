#pragma once

#include <cstdint>
#include <random>

namespace aforge {

using Rng = std::mt19937_64;

// Independent stream for (seed, index, purpose). Scene `index` of a run with
// master `seed` is reproducible on its own, in any order or process.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint32_t purpose = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), purpose};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace aforge
