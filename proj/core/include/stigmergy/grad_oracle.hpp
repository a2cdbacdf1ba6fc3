#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stigmergy/agents.hpp"
#include "stigmergy/env.hpp"
#include "stigmergy/policy.hpp"
#include "stigmergy/table.hpp"

// Brute-force expectations over every trajectory of a small POMDP under a
// frozen Boltzmann policy. Used to check the sampled learners against exact
// gradients; exponential in the horizon.

namespace stigmergy {

class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  explicit EnumerationBudgetExceeded(std::size_t budget);
};

struct EnumerationSpec {
  std::shared_ptr<const PomdpModel> model;
  std::size_t horizon = 1;
  // When set, a trial still running after `horizon` steps is terminated and
  // the value is added to its last reward, exactly as the harness does at the
  // step cap. When unset, such trajectories are left as open prefixes.
  std::optional<double> timeout_reward = -1.0;
  std::size_t budget = 10'000'000;
};

// Hidden-side bookkeeping for one step of an atom.
struct AtomStep {
  std::size_t state = 0;
  bool discounted = true;
};

// One complete trajectory (or an open prefix cut at the horizon).
struct TrajectoryAtom {
  EpisodePrefix prefix;
  std::vector<AtomStep> hidden;
  // Observation after the last step; meaningless when terminal.
  Observation final_observation;
  double probability = 0.0;
  bool terminal = false;
};

// Depth-first enumeration in a fixed order. Throws EnumerationBudgetExceeded
// once more than spec.budget atoms would be produced.
std::vector<TrajectoryAtom> enumerate(const EnumerationSpec& spec, const QTable& q,
                                      double temperature);

double total_probability(const std::vector<TrajectoryAtom>& atoms);

// e = (1 - beta) * e_sarsa + beta * e_policy.
struct ErrorMeasure {
  double beta = 1.0;
  double gamma = 1.0;
  double b = 0.0;

  static ErrorMeasure policy(double gamma = 1.0, double b = 0.0) { return {1.0, gamma, b}; }
  static ErrorMeasure sarsa(double gamma = 1.0) { return {0.0, gamma, 0.0}; }
  static ErrorMeasure combined(double beta, double gamma = 1.0, double b = 0.0) {
    return {beta, gamma, b};
  }
};

// Error terms are indexed by prefix length t = 0..T for a trial of T steps.
//   e_policy(s_t) = b - gamma^k r_{t-1}, with k the number of discounted steps
//                   before step t-1 and e_policy(s_0) = b;
//   e_sarsa(s_t)  = 1/2 (E[r_{t-1} + gamma Q(x_t, u_t) - Q(x_{t-1}, u_{t-1})])^2,
//                   the expectation taken over x_t and u_t given the hidden
//                   state and action at t-1; e_sarsa(s_0) = 0.
// B is the probability-weighted sum of all of them.
class GradientOracle {
 public:
  explicit GradientOracle(EnumerationSpec spec);

  const EnumerationSpec& spec() const { return spec_; }

  std::vector<TrajectoryAtom> enumerate(const QTable& q, double temperature) const;

  double exact_B(const std::vector<TrajectoryAtom>& atoms, const ErrorMeasure& measure,
                 const QTable& q, double temperature) const;
  double exact_B(const ErrorMeasure& measure, const QTable& q, double temperature) const;

  // sum_t sum_s Pr(s) [de(s_t)/dw + e(s_t) sum_{j<t} d ln Pr(u_j|x_j)/dw].
  Table exact_grad_B(const std::vector<TrajectoryAtom>& atoms, const ErrorMeasure& measure,
                     const QTable& q, double temperature) const;

  // Central differences of exact_B, one weight at a time.
  Table finite_difference_grad_B(const ErrorMeasure& measure, const QTable& q,
                                 double temperature, double h = 1e-5) const;

  // Expected end-of-trial accumulated gradient of VapsLearner (single-sample
  // e_sarsa), obtained by replaying every atom through the learner.
  Table vaps_update_expectation(const std::vector<TrajectoryAtom>& atoms,
                                const ErrorMeasure& measure, const QTable& q,
                                double temperature) const;

  // Same quantity with the double-sample e_sarsa estimator: for each step the
  // second transition is enumerated independently from the same hidden state
  // and action.
  Table double_sample_expectation(const std::vector<TrajectoryAtom>& atoms,
                                  const ErrorMeasure& measure, const QTable& q,
                                  double temperature) const;

 private:
  struct Outcome {
    double probability;
    std::size_t next_state;
    double reward;
    bool terminal;
    bool discounted;
  };
  // Transitions out of (state, action) when taken as step `index` (0-based),
  // with cap termination applied.
  std::vector<Outcome> outcomes(std::size_t state, Action action, std::size_t index) const;
  // Expected TD residual of step `index` and, if grad is non-null, its
  // gradient added into *grad scaled by `scale`.
  double expected_residual(std::size_t state, Observation x, Action u, std::size_t index,
                           const QTable& q, const Table& policy, double temperature,
                           double gamma, Table* grad, double scale) const;
  std::vector<TransitionSample> replay(const TrajectoryAtom& atom) const;

  EnumerationSpec spec_;
};

// Match: passes when deviation <= tolerance. Report: informational only,
// always passes (used for the single-sample bias, which is zero on toys
// where every transition and next action is deterministic).
enum class CheckKind { Match, Report };

// Outcome of one gradcheck comparison.
struct GradientCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::Match;

  bool passed() const { return kind == CheckKind::Report || deviation <= tolerance; }
};

struct GradientCheckOptions {
  double gamma = 1.0;
  double b = 0.0;
  double beta = 0.5;
  double fd_step = 1e-5;
  double fd_tolerance = 1e-7;
  double exact_tolerance = 1e-9;
  double probability_tolerance = 1e-10;
};

// The standard battery: probability conservation at every cut, finite
// differences for each error measure, VAPS(1) and double-sample
// expectations against the exact gradient, and the single-sample bias.
// The finite-difference deviation is relative to max(|grad|_inf, 1e-3).
std::vector<GradientCheck> run_gradient_checks(const EnumerationSpec& spec, const QTable& q,
                                               double temperature,
                                               const GradientCheckOptions& options = {});

}  // namespace stigmergy
