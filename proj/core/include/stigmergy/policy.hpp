#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stigmergy/env.hpp"
#include "stigmergy/rng.hpp"
#include "stigmergy/table.hpp"

namespace stigmergy {

// One weight per (observation, action) pair.
using QTable = Table;

// Entries uniform in [-scale, +scale].
QTable random_qtable(std::size_t observations, std::size_t actions, Rng& rng, double scale = 0.01);

inline constexpr double kMinTemperature = 1e-6;

// Boltzmann selection mixed with a uniform component:
//   Pr(u|x) = (1 - epsilon) * softmax(Q(x, .) / c)_u + epsilon / |A|.
class BoltzmannParams {
 public:
  // Throws std::invalid_argument if temperature < kMinTemperature or epsilon
  // is outside [0, 1].
  explicit BoltzmannParams(double temperature, double epsilon = 0.0);

  double temperature() const { return temperature_; }
  double epsilon() const { return epsilon_; }

 private:
  double temperature_;
  double epsilon_;
};

void action_probabilities(std::span<const double> q_row, const BoltzmannParams& params,
                          std::span<double> out);
std::vector<double> action_probabilities(const QTable& q, Observation x,
                                         const BoltzmannParams& params);

// Probability table with the same shape as q, one distribution per row.
Table policy_table(const QTable& q, const BoltzmannParams& params);

Action sample_action(std::span<const double> probs, Rng& rng);

// argmax_u Q(x, u) with exact ties broken uniformly through rng.
Action greedy_action(const QTable& q, Observation x, Rng& rng);

// d ln Pr(u|x) / d Q(x, u') for pure Boltzmann selection, written into out
// (one entry per u'). Only row x of the full gradient is nonzero:
//   u' == u : (1 - Pr(u|x)) / c
//   u' != u : -Pr(u'|x) / c
void log_prob_gradient_row(std::span<const double> probs, Action u, double temperature,
                           std::span<double> out);

// Full-table form of the same gradient.
Table log_prob_gradient(const QTable& q, Observation x, Action u, double temperature);

struct ScheduleParams {
  double alpha0 = 0.5;
  double c_max = 1.0;
  double c_min = 0.2;
  std::size_t total_trials = 1000;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// alpha0 + 1 / (10 n), n >= 1 the trial number.
double learning_rate(const ScheduleParams& s, std::size_t trial);

// c_max * ratio^(n - 1) with ratio = (c_min / c_max)^(1 / (N - 1)), so the
// temperature is c_max on the first trial and c_min on trial N.
double temperature(const ScheduleParams& s, std::size_t trial);

}  // namespace stigmergy
