#pragma once

#include <cstdint>

namespace probewarp {

// Small deterministic PRNG used where reproducibility across platforms and
// schedules matters (RANSAC sampling, procedural textures). Distinct streams
// are derived by mixing a seed with a stream index.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) via the multiply-shift reduction.
  std::uint32_t next_below(std::uint32_t n) {
    return std::uint32_t((unsigned __int128)(next()) * n >> 64);
  }

  // Uniform double in [0, 1).
  double next_unit() { return double(next() >> 11) * 0x1.0p-53; }
};

// Stateless integer hash for lattice noise and stream derivation.
inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace probewarp
