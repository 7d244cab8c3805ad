#pragma once
#include <cstdint>
#include <random>
#include <string_view>

namespace omni {

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Uniform in [0, 1) built from the top 53 bits; identical across platforms,
// unlike std::uniform_real_distribution.
inline double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in the open interval (lo, hi); endpoints rejected.
inline double uniform_open(std::mt19937_64& rng, double lo, double hi) {
  for (;;) {
    const double x = lo + (hi - lo) * uniform_double(rng);
    if (x > lo && x < hi) return x;
  }
}

// Independent per-item stream: the draw order of one item never affects
// another, so batches parallelize without losing determinism.
inline std::mt19937_64 derive_stream(std::uint64_t seed, std::string_view item_id) {
  return std::mt19937_64(fnv1a64(item_id, fnv1a64_mix(0xcbf29ce484222325ull, seed)));
}

}  // namespace omni
