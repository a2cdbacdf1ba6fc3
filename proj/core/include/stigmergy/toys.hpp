#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "stigmergy/env.hpp"

namespace stigmergy {

// Small explicit POMDPs for exhaustive gradient checks.
struct Toy {
  std::string name;
  std::shared_ptr<const PomdpModel> model;
  // Step cap used when the caller does not pick one.
  std::size_t default_horizon = 1;
};

// Named toys:
//   bandit         one state, two arms paying 1 and 0, then terminal
//   chain          two observable states; right twice reaches +1
//   noisy          two states with stochastic transitions and rewards
//   aliased        three-state corridor whose last two states look alike
//   load-unload-3  three-location load-unload with one set/clear memory bit
//   random-<seed>  random_toy(seed)
// Throws std::invalid_argument for an unknown name.
Toy make_toy(std::string_view name);
std::vector<std::string> toy_names();

// Random POMDP with 1-3 hidden states, 1-2 observations, two actions and
// one or two stochastic outcomes per (state, action), each terminal with
// some probability. Deterministic in the seed.
Toy random_toy(std::uint64_t seed);

}  // namespace stigmergy
