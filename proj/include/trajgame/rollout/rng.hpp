#pragma once

#include <cstdint>

namespace trajgame {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, step, slot, draw), built from chained splitmix64 rounds.
// Draws are reproducible bit-for-bit regardless of evaluation order or
// thread count, and the scheme is simple enough to replicate in any
// language: hash the five 64-bit words in sequence, map the top 53 bits to
// (0,1), and Box-Muller two uniforms into one standard normal.
namespace rng {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t key(uint64_t seed, uint64_t stream, uint64_t step, uint64_t slot, uint64_t draw) {
  uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ step);
  h = splitmix64(h ^ slot);
  h = splitmix64(h ^ draw);
  return h;
}

// uniform in (0, 1)
inline double uniform(uint64_t seed, uint64_t stream, uint64_t step, uint64_t slot,
                      uint64_t draw) {
  const uint64_t bits = key(seed, stream, step, slot, draw);
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double standard_normal(uint64_t seed, uint64_t stream, uint64_t step, uint64_t slot);

}  // namespace rng
}  // namespace trajgame
