#pragma once

#include <cstdint>

namespace dss {

// Counter-friendly splittable generator (splitmix64). Codebook sampling
// derives one independent stream per (seed, index) pair so that results do
// not depend on thread scheduling.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a ^ (0x9e3779b97f4a7c15ULL + b));
  std::uint64_t x = g.next();
  return x ^ g.next();
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return seed_mix(seed_mix(a, b), c);
}

}  // namespace dss
