#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stigmergy/rng.hpp"

namespace stigmergy {

struct Observation {
  std::size_t id = 0;
  friend auto operator<=>(const Observation&, const Observation&) = default;
};

struct Action {
  std::size_t id = 0;
  friend auto operator<=>(const Action&, const Action&) = default;
};

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  bool terminal = false;
  // False for steps that should not advance the discount clock (memory
  // writes with discounting disabled).
  bool discounted = true;

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

// Raised when a caller breaks an environment's usage contract, e.g. stepping
// after a terminal outcome.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TerminalStepError : public ContractViolation {
 public:
  TerminalStepError() : ContractViolation("step() called on a terminal environment") {}
};

// Episodic, partially observable environment. Instances are single-threaded
// state machines; independent instances may run concurrently.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t observation_count() const = 0;
  virtual std::size_t action_count() const = 0;

  // Samples an initial hidden state and returns its observation.
  virtual Observation reset(Rng& rng) = 0;
  // Throws TerminalStepError after a terminal outcome and std::out_of_range for
  // an invalid action.
  virtual StepOutcome step(Action action, Rng& rng) = 0;

  virtual bool terminal() const = 0;
  // Steps taken since the last reset.
  virtual std::size_t steps_taken() const = 0;

  // Deep copy including the current hidden state.
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// One (x_t, u_t, r_t) entry; r_t is the reward returned for taking u_t.
struct EpisodeStep {
  Observation observation;
  Action action;
  double reward = 0.0;

  friend bool operator==(const EpisodeStep&, const EpisodeStep&) = default;
};

// Append-only record of one trial's experience.
class EpisodePrefix {
 public:
  EpisodePrefix() = default;
  explicit EpisodePrefix(std::vector<EpisodeStep> steps) : steps_(std::move(steps)) {}

  void append(EpisodeStep step) { steps_.push_back(step); }
  void pop_back() { steps_.pop_back(); }

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const EpisodeStep& operator[](std::size_t t) const { return steps_[t]; }
  const EpisodeStep& back() const { return steps_.back(); }
  std::span<const EpisodeStep> steps() const { return steps_; }

  friend bool operator==(const EpisodePrefix&, const EpisodePrefix&) = default;

 private:
  std::vector<EpisodeStep> steps_;
};

// Prefix through step t inclusive. Throws std::out_of_range unless t < size.
EpisodePrefix truncate(const EpisodePrefix& seq, std::size_t t);

// One possible result of taking an action in a hidden state.
struct Transition {
  double probability = 0.0;
  std::size_t next_state = 0;
  double reward = 0.0;
  bool terminal = false;
  bool discounted = true;
};

// Explicit finite POMDP: hidden states, a deterministic observation per
// state, an initial distribution and per-(state, action) transition lists.
// The learners never see this; the simulator, the search routines and the
// gradient oracle do.
class PomdpModel {
 public:
  PomdpModel(std::size_t state_count, std::size_t observation_count, std::size_t action_count);

  std::size_t state_count() const { return observation_of_.size(); }
  std::size_t observation_count() const { return observation_count_; }
  std::size_t action_count() const { return action_count_; }

  void set_initial(std::vector<double> distribution);
  void set_observation(std::size_t state, Observation obs);
  void add_transition(std::size_t state, Action action, Transition t);

  std::span<const double> initial() const { return initial_; }
  Observation observation_of(std::size_t state) const { return {observation_of_[state]}; }
  std::span<const Transition> transitions(std::size_t state, Action action) const {
    return transitions_[state * action_count_ + action.id];
  }

  // Checks that every distribution sums to 1 within 1e-12, all indices are in
  // range and every (state, action) has at least one transition. Throws
  // std::invalid_argument describing the first problem found.
  void validate() const;

 private:
  std::size_t observation_count_;
  std::size_t action_count_;
  std::vector<double> initial_;
  std::vector<std::size_t> observation_of_;
  std::vector<std::vector<Transition>> transitions_;
};

// Runs a PomdpModel as an Environment.
class ModelEnvironment final : public Environment {
 public:
  explicit ModelEnvironment(std::shared_ptr<const PomdpModel> model);

  std::size_t observation_count() const override { return model_->observation_count(); }
  std::size_t action_count() const override { return model_->action_count(); }
  Observation reset(Rng& rng) override;
  StepOutcome step(Action action, Rng& rng) override;
  bool terminal() const override { return terminal_; }
  std::size_t steps_taken() const override { return steps_; }
  std::unique_ptr<Environment> clone() const override;

  std::size_t hidden_state() const { return state_; }
  const PomdpModel& model() const { return *model_; }

 private:
  std::shared_ptr<const PomdpModel> model_;
  std::size_t state_ = 0;
  std::size_t steps_ = 0;
  bool terminal_ = false;
};

// Index drawn from a discrete distribution by inverse CDF on one uniform.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

// Step cap and the reward delivered when a trial hits it.
struct TrialLimits {
  std::size_t step_cap = 0;
  double timeout_reward = -1.0;
};

}  // namespace stigmergy
