#pragma once

#include "debias/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace debias {

// splitmix64 step; good 64-bit avalanche, used only for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// One stream per (master seed, trial, stage tag). The same triple always
// yields the same stream; distinct triples yield independent streams.
inline std::mt19937_64 derive_stream(SeedSpec seed, std::uint64_t trial, std::string_view stage) {
  if (stage.empty()) throw std::invalid_argument("derive_stream: empty stage tag");
  std::uint64_t s = mix64(seed.master_seed);
  s = mix64(s ^ trial);
  s = mix64(s ^ fnv1a64(stage));
  return std::mt19937_64(s);
}

}  // namespace debias
