#include "stigmergy/domains.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace stigmergy {

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

LoadStatus load_on_arrival(const LoadUnloadSpec& spec, std::size_t position, LoadStatus load) {
  if (contains(spec.bad_loading_positions, position)) return LoadStatus::BadLoad;
  if (load == LoadStatus::Empty && contains(spec.loading_positions, position)) {
    return LoadStatus::GoodLoad;
  }
  return load;
}

}  // namespace

void LoadUnloadSpec::validate() const {
  if (location_count < 2) throw std::invalid_argument("locations must be >= 2");
  if (unload_position >= location_count) throw std::invalid_argument("unload_position out of range");
  if (loading_positions.empty()) throw std::invalid_argument("loading_positions must not be empty");
  for (std::size_t p : loading_positions) {
    if (p >= location_count) throw std::invalid_argument("loading_positions: index out of range");
    if (p == unload_position) {
      throw std::invalid_argument("loading_positions must not contain unload_position");
    }
  }
  for (std::size_t p : bad_loading_positions) {
    if (!contains(loading_positions, p)) {
      throw std::invalid_argument("bad_loading_positions must be a subset of loading_positions");
    }
  }
}

LoadUnloadSpec load_unload_preset(std::string_view name) {
  if (name == "load-unload-3") return {3, {2}, {}, 0};
  if (name == "load-unload-5") return {5, {4}, {}, 0};
  // The five-location chain with a bad loader one step past the good one:
  // once loaded, overshooting the far end spoils the load.
  if (name == "load-unload-two-loaders") return {6, {4, 5}, {5}, 0};
  throw std::invalid_argument("unknown domain preset '" + std::string(name) + "'");
}

std::vector<std::string> load_unload_preset_names() {
  return {"load-unload-3", "load-unload-5", "load-unload-two-loaders"};
}

std::size_t load_state_count(const LoadUnloadSpec& spec) {
  return spec.bad_loading_positions.empty() ? 2 : 3;
}

std::size_t hidden_index(const LoadUnloadSpec& spec, const HiddenState& s) {
  return s.position * load_state_count(spec) + static_cast<std::size_t>(s.load);
}

HiddenState hidden_state(const LoadUnloadSpec& spec, std::size_t index) {
  const std::size_t k = load_state_count(spec);
  return {index / k, static_cast<LoadStatus>(index % k)};
}

PomdpModel make_load_unload_model(const LoadUnloadSpec& spec) {
  spec.validate();
  const std::size_t k = load_state_count(spec);
  PomdpModel model(spec.location_count * k, spec.location_count, 2);

  std::vector<double> initial(model.state_count(), 0.0);
  initial[hidden_index(spec, {spec.unload_position, LoadStatus::Empty})] = 1.0;
  model.set_initial(std::move(initial));

  for (std::size_t index = 0; index < model.state_count(); ++index) {
    const HiddenState s = hidden_state(spec, index);
    model.set_observation(index, {s.position});
    for (Action a : {kMoveLeft, kMoveRight}) {
      std::size_t next = s.position;
      if (a == kMoveLeft && next > 0) --next;
      if (a == kMoveRight && next + 1 < spec.location_count) ++next;
      const LoadStatus load = load_on_arrival(spec, next, s.load);
      const bool delivered = next == spec.unload_position && load != LoadStatus::Empty;
      double reward = 0.0;
      if (delivered) reward = load == LoadStatus::GoodLoad ? kGoalReward : kBadLoadReward;
      model.add_transition(index, a, {1.0, hidden_index(spec, {next, load}), reward, delivered});
    }
  }
  model.validate();
  return model;
}

std::unique_ptr<Environment> make_load_unload(const LoadUnloadSpec& spec) {
  return std::make_unique<ModelEnvironment>(
      std::make_shared<const PomdpModel>(make_load_unload_model(spec)));
}

std::string observation_name(const LoadUnloadSpec& spec, Observation obs) {
  if (obs.id == spec.unload_position) return "Unload";
  if (contains(spec.bad_loading_positions, obs.id)) return "BadLoad";
  if (contains(spec.loading_positions, obs.id)) return "Load";
  return "Location " + std::to_string(obs.id);
}

std::size_t shortest_goal_length(const PomdpModel& model) {
  constexpr std::uint8_t kUnassigned = 0xff;
  constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();
  if (model.action_count() >= kUnassigned) {
    throw std::invalid_argument("shortest_goal_length: too many actions");
  }
  const std::size_t states = model.state_count();
  std::optional<std::size_t> start;
  for (std::size_t s = 0; s < states; ++s) {
    if (model.initial()[s] <= 0.0) continue;
    if (start) throw std::invalid_argument("shortest_goal_length: needs a single initial state");
    start = s;
  }
  auto step = [&](std::size_t s, std::size_t a) -> const Transition& {
    auto row = model.transitions(s, {a});
    if (row.size() != 1) {
      throw std::invalid_argument("shortest_goal_length: needs deterministic transitions");
    }
    return row.front();
  };

  // Lower bound: distance to a rewarding terminal ignoring policy consistency.
  std::vector<std::size_t> bound(states, kUnreachable);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < states; ++s) {
      for (std::size_t a = 0; a < model.action_count(); ++a) {
        const Transition& t = step(s, a);
        std::size_t d = kUnreachable;
        if (t.terminal) {
          if (t.reward > 0.0) d = 1;
        } else if (bound[t.next_state] != kUnreachable) {
          d = bound[t.next_state] + 1;
        }
        if (d < bound[s]) {
          bound[s] = d;
          changed = true;
        }
      }
    }
  }
  if (bound[*start] == kUnreachable) {
    throw std::runtime_error("shortest_goal_length: no reactive policy reaches a rewarding terminal");
  }

  // A* over (hidden state, partial policy) with buckets indexed by
  // depth + bound.
  struct Node {
    std::size_t state;
    std::size_t depth;
    std::vector<std::uint8_t> policy;  // observation -> action, kUnassigned if free
  };
  auto key = [](std::size_t state, const std::vector<std::uint8_t>& policy) {
    std::string k(reinterpret_cast<const char*>(&state), sizeof state);
    k.append(policy.begin(), policy.end());
    return k;
  };
  std::unordered_map<std::string, std::size_t> best_depth;
  std::vector<std::vector<Node>> buckets;
  auto push = [&](Node node) {
    auto [it, fresh] = best_depth.try_emplace(key(node.state, node.policy), node.depth);
    if (!fresh) {
      if (it->second <= node.depth) return;
      it->second = node.depth;
    }
    const std::size_t f = node.depth + bound[node.state];
    if (buckets.size() <= f) buckets.resize(f + 1);
    buckets[f].push_back(std::move(node));
  };
  push({*start, 0, std::vector<std::uint8_t>(model.observation_count(), kUnassigned)});

  std::size_t best = kUnreachable;
  for (std::size_t f = 0; f < buckets.size() && f < best; ++f) {
    while (!buckets[f].empty()) {
      Node node = std::move(buckets[f].back());
      buckets[f].pop_back();
      if (best_depth[key(node.state, node.policy)] < node.depth) continue;
      const std::size_t obs = model.observation_of(node.state).id;
      const std::uint8_t fixed = node.policy[obs];
      for (std::size_t a = 0; a < model.action_count(); ++a) {
        if (fixed != kUnassigned && fixed != a) continue;
        const Transition& t = step(node.state, a);
        if (t.terminal) {
          if (t.reward > 0.0) best = std::min(best, node.depth + 1);
          continue;
        }
        if (bound[t.next_state] == kUnreachable) continue;
        Node child{t.next_state, node.depth + 1, node.policy};
        child.policy[obs] = static_cast<std::uint8_t>(a);
        push(std::move(child));
      }
    }
  }
  if (best == kUnreachable) {
    throw std::runtime_error("shortest_goal_length: no reactive policy reaches a rewarding terminal");
  }
  return best;
}

std::size_t optimal_trial_length(const LoadUnloadSpec& spec, const MemoryConfig& mem) {
  return shortest_goal_length(augment_model(make_load_unload_model(spec), mem));
}

}  // namespace stigmergy
