#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace simcr {

// 64-bit FNV-1a. Used for artifact layout hashes and seed-stream derivation.
inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Decorrelated per-purpose seed so stages can reseed independently.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  std::uint64_t x = root ^ fnv1a64(stream);
  return splitmix64(x);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace simcr
