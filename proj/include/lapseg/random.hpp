#pragma once

#include <cstdint>
#include <random>

namespace lapseg {

// Mixes a master seed with stream identifiers (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// Unbiased integer in [0, bound); independent of the standard library's
// distribution implementations so results match across toolchains.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(std::mt19937_64& rng);

}  // namespace lapseg
