#pragma once

#include <cstdint>
#include <random>

namespace uowsn {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based split: the seed of substream (a, b) under `root` depends only
/// on the three words, never on the order in which substreams are created.
constexpr std::uint64_t substream_seed(std::uint64_t root, std::uint64_t a,
                                       std::uint64_t b = 0) {
  return mix64(mix64(mix64(root) ^ a) + 0x632be59bd9b4e019ULL * (b + 1));
}

inline Rng make_substream(std::uint64_t root, std::uint64_t a,
                          std::uint64_t b = 0) {
  return Rng(substream_seed(root, a, b));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace uowsn
