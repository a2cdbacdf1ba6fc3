#include "stigmergy/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace stigmergy {

namespace {

double effective_gamma(double gamma, bool discounted) { return discounted ? gamma : 1.0; }

double td_error(const TransitionSample& tr, const QTable& q, double gamma) {
  const double next = tr.terminal ? 0.0 : effective_gamma(gamma, tr.discounted) * q(tr.x.id, tr.u.id);
  return tr.r_prev + next - q(tr.x_prev.id, tr.u_prev.id);
}

void check_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

void SarsaParams::validate() const {
  check_unit_interval(lambda, "lambda");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

SarsaLearner::SarsaLearner(QTable initial, SarsaParams params)
    : q_(std::move(initial)),
      eligibility_(q_.rows(), q_.cols()),
      pending_(q_.rows(), q_.cols()),
      params_(params) {
  params_.validate();
}

void SarsaLearner::begin_trial() {
  eligibility_.fill(0.0);
  pending_.fill(0.0);
}

void SarsaLearner::step(const TransitionSample& tr, double alpha) {
  const double delta = td_error(tr, q_, params_.gamma);
  double& trace = eligibility_(tr.x_prev.id, tr.u_prev.id);
  trace = params_.traces == TraceKind::Accumulating ? trace + 1.0 : 1.0;
  Table& target = params_.mode == SarsaUpdateMode::Online ? q_ : pending_;
  if (delta != 0.0) target.add_scaled(eligibility_, alpha * delta);
  eligibility_ *= effective_gamma(params_.gamma, tr.discounted) * params_.lambda;
}

void SarsaLearner::end_trial() {
  if (params_.mode == SarsaUpdateMode::Offline) q_.add_scaled(pending_, 1.0);
  pending_.fill(0.0);
  eligibility_.fill(0.0);
}

double e_policy_sample(std::size_t t, double r, double gamma, double b) {
  return b - std::pow(gamma, static_cast<double>(t)) * r;
}

SarsaErrorSample e_sarsa_sample(const TransitionSample& tr, const QTable& q, double gamma) {
  const double delta = td_error(tr, q, gamma);
  SarsaErrorSample out{0.5 * delta * delta, Table(q.rows(), q.cols())};
  if (!tr.terminal) out.gradient(tr.x.id, tr.u.id) += delta * effective_gamma(gamma, tr.discounted);
  out.gradient(tr.x_prev.id, tr.u_prev.id) -= delta;
  return out;
}

SarsaErrorSample e_sarsa_sample(const TransitionSample& tr, const TransitionSample& second,
                                const QTable& q, double gamma, double temperature) {
  if (tr.x_prev != second.x_prev || tr.u_prev != second.u_prev) {
    throw std::invalid_argument("e_sarsa_sample: samples start from different (x_prev, u_prev)");
  }
  const double delta1 = td_error(tr, q, gamma);
  const double delta2 = td_error(second, q, gamma);
  SarsaErrorSample out{0.5 * delta1 * delta2, Table(q.rows(), q.cols())};
  out.gradient(tr.x_prev.id, tr.u_prev.id) -= delta1;
  if (!second.terminal) {
    out.gradient(second.x.id, second.u.id) += delta1 * effective_gamma(gamma, second.discounted);
    const auto probs = action_probabilities(q, second.x, BoltzmannParams(temperature));
    std::vector<double> score(q.cols());
    log_prob_gradient_row(probs, second.u, temperature, score);
    auto row = out.gradient.row(second.x.id);
    for (std::size_t k = 0; k < score.size(); ++k) row[k] += delta1 * delta2 * score[k];
  }
  return out;
}

void VapsParams::validate() const {
  check_unit_interval(beta, "beta");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (!std::isfinite(b)) throw std::invalid_argument("b must be finite");
}

VisitCounts::VisitCounts(std::size_t observations, std::size_t actions)
    : actions_(actions), state_(observations, 0), pair_(observations * actions, 0) {}

void VisitCounts::record(Observation x, Action u) {
  ++state_[x.id];
  ++pair_[x.id * actions_ + u.id];
}

void VisitCounts::clear() {
  std::fill(state_.begin(), state_.end(), 0);
  std::fill(pair_.begin(), pair_.end(), 0);
}

VapsLearner::VapsLearner(QTable initial, VapsParams params)
    : q_(std::move(initial)),
      policy_(q_.rows(), q_.cols()),
      trace_(q_.rows(), q_.cols()),
      accumulated_(q_.rows(), q_.cols()),
      counts_(q_.rows(), q_.cols()),
      params_(params),
      scratch_(q_.cols()) {
  params_.validate();
  if (params_.sampling == SarsaSampling::Double) {
    throw std::invalid_argument(
        "VapsLearner: double sampling needs a second independent transition, which is not "
        "available online");
  }
}

void VapsLearner::begin_trial(double temperature) {
  temperature_ = BoltzmannParams(temperature).temperature();
  policy_ = policy_table(q_, BoltzmannParams(temperature_));
  trace_.fill(0.0);
  accumulated_.fill(0.0);
  counts_.clear();
  time_ = 0;
  discount_steps_ = 0;
}

void VapsLearner::observe(const TransitionSample& tr) {
  log_prob_gradient_row(policy_.row(tr.x_prev.id), tr.u_prev, temperature_, scratch_);
  auto row = trace_.row(tr.x_prev.id);
  for (std::size_t k = 0; k < scratch_.size(); ++k) row[k] += scratch_[k];
  counts_.record(tr.x_prev, tr.u_prev);

  const double beta = params_.beta;
  double error = beta * e_policy_sample(discount_steps_, tr.r_prev, params_.gamma, params_.b);
  if (beta < 1.0) {
    const SarsaErrorSample s = e_sarsa_sample(tr, q_, params_.gamma);
    error += (1.0 - beta) * s.error;
    accumulated_.add_scaled(s.gradient, 1.0 - beta);
  }
  if (error != 0.0) accumulated_.add_scaled(trace_, error);

  ++time_;
  if (tr.discounted) ++discount_steps_;
}

void VapsLearner::end_trial(double alpha) {
  q_.add_scaled(accumulated_, -alpha);
  trace_.fill(0.0);
  accumulated_.fill(0.0);
  counts_.clear();
  time_ = 0;
  discount_steps_ = 0;
}

Table vaps1_counter_trace(const VisitCounts& counts, const Table& probs, double temperature) {
  Table trace(probs.rows(), probs.cols());
  const double inv_c = 1.0 / temperature;
  for (std::size_t x = 0; x < probs.rows(); ++x) {
    const double visits = static_cast<double>(counts.state({x}));
    for (std::size_t u = 0; u < probs.cols(); ++u) {
      trace(x, u) = (static_cast<double>(counts.pair({x}, {u})) - visits * probs(x, u)) * inv_c;
    }
  }
  return trace;
}

}  // namespace stigmergy
