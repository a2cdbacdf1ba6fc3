#pragma once

#include <cstddef>
#include <vector>

#include "stigmergy/env.hpp"
#include "stigmergy/policy.hpp"
#include "stigmergy/table.hpp"

namespace stigmergy {

// (x_{t-1}, u_{t-1}, r_{t-1}, x_t, u_t). r_prev is the reward returned for
// taking u_prev; u is ignored when terminal is set.
struct TransitionSample {
  Observation x_prev;
  Action u_prev;
  double r_prev = 0.0;
  Observation x;
  Action u;
  bool terminal = false;
  // Whether the step from x_prev to x advances the discount clock.
  bool discounted = true;
};

// ---------------------------------------------------------------------------
// SARSA(lambda)

enum class SarsaUpdateMode { Online, Offline };

// Accumulating traces add 1 per visit; replacing traces reset the visited
// pair's trace to 1.
enum class TraceKind { Accumulating, Replacing };

struct SarsaParams {
  double lambda = 1.0;
  double gamma = 1.0;
  SarsaUpdateMode mode = SarsaUpdateMode::Online;
  TraceKind traces = TraceKind::Replacing;

  void validate() const;
};

// Tabular SARSA(lambda) with eligibility traces.
//
// Per transition: delta = r + gamma * Q(x, u) - Q(x_prev, u_prev), with
// Q(terminal, .) = 0. The trace of (x_prev, u_prev) is bumped (or reset to 1
// for replacing traces), every pair
// moves by alpha * delta * e, then all traces decay by gamma * lambda.
// Offline mode computes delta against the Q-values frozen at trial start and
// applies the summed increments in end_trial().
class SarsaLearner {
 public:
  SarsaLearner(QTable initial, SarsaParams params);

  void begin_trial();
  void step(const TransitionSample& tr, double alpha);
  void end_trial();

  const QTable& q() const { return q_; }
  QTable& q() { return q_; }
  const Table& eligibility() const { return eligibility_; }
  const SarsaParams& params() const { return params_; }

 private:
  QTable q_;
  Table eligibility_;
  Table pending_;
  SarsaParams params_;
};

// ---------------------------------------------------------------------------
// VAPS(beta)

// b - gamma^t * r. For a trial the per-step policy errors sum to
// b * (steps + 1) minus the discounted return.
double e_policy_sample(std::size_t t, double r, double gamma, double b);

struct SarsaErrorSample {
  double error = 0.0;
  Table gradient;
};

// Single-sample estimate of the SARSA error and its weight gradient, reusing
// the one observed transition in both factors:
//   error = delta^2 / 2, gradient = delta * (gamma dQ(x,u) - dQ(x_prev,u_prev)).
// The expectation of this estimate is biased whenever the next observation or
// action is random.
SarsaErrorSample e_sarsa_sample(const TransitionSample& tr, const QTable& q, double gamma);

// Double-sample estimate. tr and second must start from the same
// (x_prev, u_prev) and be drawn independently. With delta_1 from tr and
// delta_2 from second:
//   error    = delta_1 * delta_2 / 2
//   gradient = delta_1 * (gamma dQ(x_2,u_2) - dQ(x_prev,u_prev)
//                         + delta_2 * d ln Pr(u_2|x_2))
// which is unbiased for the squared expected residual and its gradient. The
// last term differentiates the Boltzmann averaging over u_2 and needs the
// temperature. Throws std::invalid_argument if the two samples disagree on
// (x_prev, u_prev).
SarsaErrorSample e_sarsa_sample(const TransitionSample& tr, const TransitionSample& second,
                                const QTable& q, double gamma, double temperature);

enum class SarsaSampling { Single, Double };

struct VapsParams {
  double beta = 1.0;
  double gamma = 1.0;
  double b = 0.0;
  // Double sampling needs a second independent draw of each transition,
  // which an online learner cannot obtain; VapsLearner rejects it.
  SarsaSampling sampling = SarsaSampling::Single;

  void validate() const;
};

// Per-(x, u) visit counters N_{x,u} and per-x counters N_x.
class VisitCounts {
 public:
  VisitCounts() = default;
  VisitCounts(std::size_t observations, std::size_t actions);

  void record(Observation x, Action u);
  void clear();

  std::size_t state(Observation x) const { return state_[x.id]; }
  std::size_t pair(Observation x, Action u) const { return pair_[x.id * actions_ + u.id]; }
  std::size_t observations() const { return state_.size(); }
  std::size_t actions() const { return actions_; }

 private:
  std::size_t actions_ = 0;
  std::vector<std::size_t> state_;
  std::vector<std::size_t> pair_;
};

// VAPS(beta) with a look-up table and pure Boltzmann exploration. Weights
// and temperature are frozen for the duration of a trial. Each observed
// transition extends the exploration trace by d ln Pr(u_prev|x_prev) and adds
// dE/dw + E * trace to the accumulated gradient, where
// E = (1 - beta) * e_sarsa + beta * e_policy. end_trial() applies
// Q -= alpha * accumulated gradient.
class VapsLearner {
 public:
  // Throws std::invalid_argument for SarsaSampling::Double.
  VapsLearner(QTable initial, VapsParams params);

  void begin_trial(double temperature);
  void observe(const TransitionSample& tr);
  void end_trial(double alpha);

  const QTable& q() const { return q_; }
  QTable& q() { return q_; }
  const Table& trace() const { return trace_; }
  const Table& accumulated_gradient() const { return accumulated_; }
  const VisitCounts& counts() const { return counts_; }
  std::size_t time() const { return time_; }
  double temperature() const { return temperature_; }
  const VapsParams& params() const { return params_; }

 private:
  QTable q_;
  Table policy_;
  Table trace_;
  Table accumulated_;
  VisitCounts counts_;
  VapsParams params_;
  double temperature_ = 1.0;
  std::size_t time_ = 0;
  std::size_t discount_steps_ = 0;
  std::vector<double> scratch_;
};

// Closed-form exploration trace for a look-up table under fixed Boltzmann
// probabilities: T(x, u) = (N_{x,u} - N_x * Pr(u|x)) / c.
Table vaps1_counter_trace(const VisitCounts& counts, const Table& probs, double temperature);

}  // namespace stigmergy
