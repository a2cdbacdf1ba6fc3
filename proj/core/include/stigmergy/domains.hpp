#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "stigmergy/env.hpp"
#include "stigmergy/memory.hpp"

namespace stigmergy {

enum class LoadStatus { Empty, GoodLoad, BadLoad };

// A row of locations the cart moves along with actions {left, right}.
// Moving off either end leaves the cart where it is. Entering a loading
// position loads an empty cart; entering a bad loading position always leaves
// the cart holding a bad load, even if it was carrying a good one. Arriving at
// unload_position with any load ends the trial with +1 (good) or -1 (bad).
// The agent observes its position only; the load is hidden.
struct LoadUnloadSpec {
  std::size_t location_count = 5;
  std::vector<std::size_t> loading_positions{4};
  std::vector<std::size_t> bad_loading_positions{};
  std::size_t unload_position = 0;

  // Throws std::invalid_argument on out-of-range positions, an unload
  // position that is also a loading position, or bad loaders that are not
  // loaders.
  void validate() const;
};

struct HiddenState {
  std::size_t position = 0;
  LoadStatus load = LoadStatus::Empty;
  friend bool operator==(const HiddenState&, const HiddenState&) = default;
};

inline constexpr Action kMoveLeft{0};
inline constexpr Action kMoveRight{1};
inline constexpr double kGoalReward = 1.0;
inline constexpr double kBadLoadReward = -1.0;

// Named presets: "load-unload-3", "load-unload-5", "load-unload-two-loaders".
// Throws std::invalid_argument for an unknown name.
LoadUnloadSpec load_unload_preset(std::string_view name);
std::vector<std::string> load_unload_preset_names();

// Hidden-state numbering: position * load_states + load, where load_states is
// 2 without bad loaders and 3 with them.
std::size_t load_state_count(const LoadUnloadSpec& spec);
std::size_t hidden_index(const LoadUnloadSpec& spec, const HiddenState& s);
HiddenState hidden_state(const LoadUnloadSpec& spec, std::size_t index);

PomdpModel make_load_unload_model(const LoadUnloadSpec& spec);
std::unique_ptr<Environment> make_load_unload(const LoadUnloadSpec& spec);

// Human-readable observation label, e.g. "Unload", "Load", "Location 2".
std::string observation_name(const LoadUnloadSpec& spec, Observation obs);

// Fewest steps from the initial state to a positive-reward terminal
// transition along a path that a deterministic reactive policy can follow,
// i.e. every observation on the path is always answered with the same
// action. A* over (hidden state, partial policy) nodes, guided by the
// policy-free distance to a rewarding terminal.
// Requires a single initial state and deterministic transitions
// (std::invalid_argument otherwise); throws std::runtime_error if no such
// path exists.
std::size_t shortest_goal_length(const PomdpModel& model);

// shortest_goal_length over the memory-augmented product model.
std::size_t optimal_trial_length(const LoadUnloadSpec& spec, const MemoryConfig& mem);

}  // namespace stigmergy
