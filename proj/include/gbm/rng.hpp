#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace gbm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of stream `index` under master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

using Engine64 = std::mt19937_64;

inline Engine64 make_engine(std::uint64_t seed) { return Engine64(seed); }

// Uniform on the open interval (0, 1).
inline double open_uniform(Engine64& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

// Sum of `count` fair +-1 steps.
inline std::int64_t rademacher_sum(Engine64& g, std::int64_t count) {
  std::int64_t ups = 0, left = count;
  while (left >= 64) {
    ups += std::popcount(g());
    left -= 64;
  }
  if (left > 0) ups += std::popcount(g() >> (64 - left));
  return 2 * ups - count;
}

}  // namespace gbm
