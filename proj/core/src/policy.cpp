#include "stigmergy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stigmergy {

QTable random_qtable(std::size_t observations, std::size_t actions, Rng& rng, double scale) {
  QTable q(observations, actions);
  for (double& v : q.values()) v = scale * (2.0 * uniform01(rng) - 1.0);
  return q;
}

BoltzmannParams::BoltzmannParams(double temperature, double epsilon)
    : temperature_(temperature), epsilon_(epsilon) {
  if (!(temperature >= kMinTemperature) || !std::isfinite(temperature)) {
    throw std::invalid_argument("temperature must be >= 1e-6, got " + std::to_string(temperature));
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  }
}

void action_probabilities(std::span<const double> q_row, const BoltzmannParams& params,
                          std::span<double> out) {
  const double c = params.temperature();
  const double top = *std::max_element(q_row.begin(), q_row.end());
  double total = 0.0;
  for (std::size_t u = 0; u < q_row.size(); ++u) {
    out[u] = std::exp((q_row[u] - top) / c);
    total += out[u];
  }
  const double eps = params.epsilon();
  const double uniform = eps / static_cast<double>(q_row.size());
  for (double& p : out) p = (1.0 - eps) * (p / total) + uniform;
}

std::vector<double> action_probabilities(const QTable& q, Observation x,
                                         const BoltzmannParams& params) {
  std::vector<double> probs(q.cols());
  action_probabilities(q.row(x.id), params, probs);
  return probs;
}

Table policy_table(const QTable& q, const BoltzmannParams& params) {
  Table probs(q.rows(), q.cols());
  for (std::size_t x = 0; x < q.rows(); ++x) action_probabilities(q.row(x), params, probs.row(x));
  return probs;
}

Action sample_action(std::span<const double> probs, Rng& rng) {
  return {sample_index(probs, rng)};
}

Action greedy_action(const QTable& q, Observation x, Rng& rng) {
  auto row = q.row(x.id);
  const double top = *std::max_element(row.begin(), row.end());
  std::size_t ties = 0;
  for (double v : row) ties += (v == top);
  std::size_t pick = ties == 1 ? 0 : static_cast<std::size_t>(uniform01(rng) * static_cast<double>(ties));
  for (std::size_t u = 0; u < row.size(); ++u) {
    if (row[u] == top && pick-- == 0) return {u};
  }
  return {0};
}

void log_prob_gradient_row(std::span<const double> probs, Action u, double temperature,
                           std::span<double> out) {
  const double inv_c = 1.0 / temperature;
  for (std::size_t k = 0; k < probs.size(); ++k) out[k] = -probs[k] * inv_c;
  out[u.id] += inv_c;
}

Table log_prob_gradient(const QTable& q, Observation x, Action u, double temperature) {
  Table grad(q.rows(), q.cols());
  const auto probs = action_probabilities(q, x, BoltzmannParams(temperature));
  log_prob_gradient_row(probs, u, temperature, grad.row(x.id));
  return grad;
}

void ScheduleParams::validate() const {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be > 0");
  if (!(c_min >= kMinTemperature)) throw std::invalid_argument("c_min must be >= 1e-6");
  if (!(c_max >= c_min)) throw std::invalid_argument("c_max must be >= c_min");
  if (total_trials < 1) throw std::invalid_argument("trials must be >= 1");
}

double learning_rate(const ScheduleParams& s, std::size_t trial) {
  if (trial < 1) throw std::out_of_range("learning_rate: trial index starts at 1");
  return s.alpha0 + 1.0 / (10.0 * static_cast<double>(trial));
}

double temperature(const ScheduleParams& s, std::size_t trial) {
  if (trial < 1 || trial > s.total_trials) {
    throw std::out_of_range("temperature: trial " + std::to_string(trial) + " outside [1, " +
                            std::to_string(s.total_trials) + "]");
  }
  if (trial == 1 || s.total_trials == 1) return s.c_max;
  if (trial == s.total_trials) return s.c_min;
  const double ratio =
      std::pow(s.c_min / s.c_max, 1.0 / static_cast<double>(s.total_trials - 1));
  return s.c_max * std::pow(ratio, static_cast<double>(trial - 1));
}

}  // namespace stigmergy
