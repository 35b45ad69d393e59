#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace glmamp {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t& state);

// Seed for an independent stream keyed by (seed, path...). Order of path matters.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

}  // namespace glmamp
