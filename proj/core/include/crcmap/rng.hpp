#pragma once

#include <cstdint>
#include <random>

#include "crcmap/normal.hpp"

namespace crcmap {

// All randomness flows through std::mt19937_64 (the engine's output sequence
// is pinned by the standard) plus the hand-rolled value transforms below, so
// a seed reproduces identical results regardless of platform or standard
// library. std::* distributions are never used; their algorithms are
// implementation-defined.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent engine for (seed, stream). Streams indexed this
/// way are stable no matter which thread consumes them.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  const std::uint64_t a = splitmix64(state);
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

/// Pure seed mixer for nesting (e.g. one sub-seed per Monte Carlo trial).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t state =
      seed ^ (0x9e3779b97f4a7c15ULL * (salt + 0x632be59bd9b4e019ULL));
  return splitmix64(state);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1), endpoints excluded (safe for quantile maps).
inline double uniform_open01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by 128-bit multiply-shift (bias < 2^-64 * n).
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(gen()) * n) >> 64);
}

/// Standard normal draw by inversion.
inline double normal_draw(std::mt19937_64& gen) {
  return normal_quantile(uniform_open01(gen));
}

}  // namespace crcmap
