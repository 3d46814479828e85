#pragma once

#include <cstdint>
#include <random>

namespace plrd {

/// One step of the splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` under `base`. Distinct indices give distinct seeds
/// for a fixed base, and the result does not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

}  // namespace plrd
