#pragma once

#include <cstdint>
#include <random>

namespace icb {

/// splitmix64 step; used only to derive well-separated seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seed for a named substream: replication index, policy
/// index, etc. Streams derived from distinct id tuples are independent for
/// all practical purposes.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id0,
                                 std::uint64_t id1 = 0, std::uint64_t id2 = 0) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0x243f6a8885a308d3ULL + id0;
  splitmix64(s);
  s ^= 0x13198a2e03707344ULL + id1;
  splitmix64(s);
  s ^= 0xa4093822299f31d0ULL + id2;
  return splitmix64(s);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace icb
