#pragma once

#include <cstdint>
#include <random>

namespace eqa {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-article sub-seed; output is independent of worker scheduling because
// every article derives its stream from (master seed, article index) alone.
inline std::uint64_t derive_subseed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x51ed270b0a1cd5f1ULL));
}

// Unbiased draw in [0, n). Rejection sampling so the distribution is exact
// and stable across standard-library implementations.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

}  // namespace eqa
