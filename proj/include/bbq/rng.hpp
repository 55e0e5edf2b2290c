#pragma once

#include <cstdint>

namespace bbq {

// Deterministic, platform-independent random streams (the standard library
// distributions are implementation defined, which would break bit-for-bit
// reproducibility of seeded runs).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1).
inline double uniform01(std::uint64_t& state) {
  return double(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Uniform in [-1, 1).
inline double uniform_pm1(std::uint64_t& state) {
  return 2.0 * uniform01(state) - 1.0;
}

// Stable per-mode stream: one generator state per (seed, k1, k2).
inline std::uint64_t mode_stream(std::uint64_t seed, int k1, int k2) {
  std::uint64_t s = seed;
  s ^= 0x517cc1b727220a95ULL * std::uint64_t(std::uint32_t(k1));
  s ^= 0x2545f4914f6cdd1dULL * std::uint64_t(std::uint32_t(k2));
  splitmix64(s);
  return s;
}

}  // namespace bbq
