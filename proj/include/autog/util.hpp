#pragma once

#include <cmath>
#include <cstdint>

namespace autog {

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// splitmix64-style mixing for deterministic per-replicate seed streams
inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return seed_mix(seed_mix(a, b), c);
}

}  // namespace autog
