#pragma once

#include <cstdint>
#include <random>

namespace stigmergy {

// All stochastic components draw from a single engine type so that a run is
// fully determined by its seed.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
// Unlike std::uniform_real_distribution the result does not depend on the
// standard library implementation.
double uniform01(Rng& rng);

// splitmix64 finalizer applied to (master, stream). Used to derive
// independent per-run seeds from one master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace stigmergy
