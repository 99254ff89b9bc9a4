#pragma once
// Shared small utilities: error type, stable hashing, seed derivation.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace labelaudit {

// Thrown for all contract violations and I/O failures in this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// FNV-1a 64-bit. Used where output files need a digest that is stable
// across platforms and builds (std::hash is not).
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// splitmix64 finalizer; derives independent sub-seeds from one run seed.
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return mix_seed(a ^ mix_seed(b)); }

}  // namespace labelaudit
