#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pauselab {

using Engine = std::mt19937_64;

/// splitmix64 finalizer; mixes a seed with stream indices so that
/// (seed, rep) pairs give statistically independent engines.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (auto p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  return Engine(derive_seed(seed, path));
}

}  // namespace pauselab
