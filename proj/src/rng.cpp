#include "plrd/rng.hpp"

namespace plrd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 is a bijection, so for fixed base the map index -> seed is too.
  return splitmix64(splitmix64(base) ^ index);
}

}  // namespace plrd
