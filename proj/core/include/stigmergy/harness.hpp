#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stigmergy/config.hpp"
#include "stigmergy/env.hpp"
#include "stigmergy/policy.hpp"

namespace stigmergy {

enum class TerminalKind { Goal, BadLoad, Timeout };

std::string to_string(TerminalKind kind);

struct TrialResult {
  std::size_t run = 0;    // 0-based
  std::size_t trial = 0;  // 1-based, the schedule index
  std::size_t steps = 0;
  TerminalKind terminal = TerminalKind::Timeout;
  double reward = 0.0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

// Snapshot handed to RunOptions::on_trial_end after each trial's update.
struct TrialContext {
  std::size_t run;
  std::size_t trial;
  double alpha;
  double temperature;
  const QTable& q;
  const TrialResult& result;
};

struct RunOptions {
  std::size_t workers = 1;
  // Invoked from worker threads; must be safe to call concurrently for
  // different runs.
  std::function<void(const TrialContext&)> on_trial_end;
};

// Base load-unload environment wrapped with the configured memory bits.
std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg);

// K independent runs of N trials each. Run r draws from an engine seeded
// with split_seed(cfg.seed, r) and starts from fresh random weights. A trial
// reaching the step cap without terminating is cut there and receives
// cfg.timeout_reward on its last step. Results are ordered by (run, trial)
// and do not depend on the worker count. Throws ConfigError for an invalid
// configuration.
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

// Length of one trial under the greedy policy (ties broken through rng), or
// nullopt if it does not reach a positive-reward terminal within step_cap.
std::optional<std::size_t> greedy_trial_length(const Environment& prototype, const QTable& q,
                                               std::size_t step_cap, Rng& rng);

struct CurvePoint {
  std::size_t trial = 0;
  double mean_steps = 0.0;
  double median_steps = 0.0;
  double success_rate = 0.0;
};

struct LearningCurve {
  std::size_t runs = 0;
  std::vector<CurvePoint> points;
};

// Per-trial aggregates over runs. Timeouts count at their (capped) step
// total; success means TerminalKind::Goal. Throws std::invalid_argument for
// empty input or when trials do not all have the same number of runs.
LearningCurve summarize(std::span<const TrialResult> results);

// Mean of mean_steps over the last `window` trials of the curve.
double tail_mean_steps(const LearningCurve& curve, std::size_t window);

std::string trials_csv(std::span<const TrialResult> results);
std::string curve_csv(const LearningCurve& curve);

// Writes trials.csv and curve.csv into dir (created if missing). Throws
// std::invalid_argument on empty results and std::runtime_error naming the
// path on I/O failure.
void emit_results(std::span<const TrialResult> results, const LearningCurve& curve,
                  const std::filesystem::path& dir);

}  // namespace stigmergy
