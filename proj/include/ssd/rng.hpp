#pragma once

#include <cstdint>
#include <random>

namespace ssd {

// splitmix64 finalizer; good avalanche, used to derive substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic substream: the engine state depends only on (seed, a, b, c),
// never on thread schedule. Replicate/cell indices go into a, b, c.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ mix64(a + 0x100000001ULL));
  s = mix64(s ^ mix64(b + 0x200000002ULL));
  s = mix64(s ^ mix64(c + 0x300000003ULL));
  return std::mt19937_64(s);
}

}  // namespace ssd
