#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stigmergy/agents.hpp"
#include "stigmergy/domains.hpp"
#include "stigmergy/memory.hpp"
#include "stigmergy/policy.hpp"

namespace stigmergy {

enum class Algorithm { Sarsa, Vaps };

// Validation or parse failure. what() lists every problem, one per line,
// each prefixed with the offending field name.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ExperimentConfig {
  std::string domain = "load-unload-5";
  // Overrides applied on top of the preset named by domain.
  std::optional<std::size_t> locations;
  std::optional<std::size_t> unload_position;
  std::optional<std::vector<std::size_t>> loading_positions;
  std::optional<std::vector<std::size_t>> bad_loading_positions;

  MemoryConfig memory{1, MemoryMode::Augment, MemoryActionStyle::SetClear, true};

  Algorithm algorithm = Algorithm::Vaps;
  double lambda = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double b = 0.0;
  SarsaUpdateMode sarsa_update = SarsaUpdateMode::Online;
  TraceKind sarsa_traces = TraceKind::Replacing;

  double alpha0 = 0.5;
  // Unset means the per-algorithm default: 1.0 -> 0.2 for VAPS,
  // 0.2 -> 0.1 for SARSA.
  std::optional<double> c_max;
  std::optional<double> c_min;
  double epsilon = 0.0;
  double init_scale = 0.01;

  std::size_t runs = 50;
  std::size_t trials = 1000;
  // Unset means 4 x optimal_trial_length.
  std::optional<std::size_t> step_cap;
  double timeout_reward = -1.0;
  std::uint64_t seed = 1;

  LoadUnloadSpec domain_spec() const;
  ScheduleParams schedule() const;
  double resolved_c_max() const;
  double resolved_c_min() const;
  std::size_t resolved_step_cap() const;
  TrialLimits limits() const { return {resolved_step_cap(), timeout_reward}; }

  // Throws ConfigError listing every invalid field.
  void validate() const;
};

// Flat "key = value" text. '#' starts a comment; blank lines are ignored;
// lists are comma-separated. Unknown keys, duplicate keys and malformed
// values are errors. Keys:
//   domain locations unload_position loading_positions bad_loading_positions
//   memory_bits memory_mode memory_action_style discount_memory_actions
//   algorithm lambda beta gamma b sarsa_update sarsa_traces alpha0 c_max c_min epsilon
//   init_scale runs trials step_cap timeout_reward seed
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration in the same format, suitable for parse_config.
std::string to_config_text(const ExperimentConfig& cfg);

std::string to_string(Algorithm a);
std::string to_string(MemoryMode m);
std::string to_string(MemoryActionStyle s);
std::string to_string(SarsaUpdateMode m);
std::string to_string(TraceKind k);

}  // namespace stigmergy
