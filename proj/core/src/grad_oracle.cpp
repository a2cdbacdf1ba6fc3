#include "stigmergy/grad_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "stigmergy/format.hpp"

namespace stigmergy {

namespace {

struct Walker {
  const EnumerationSpec& spec;
  const Table& policy;
  std::vector<TrajectoryAtom>& out;
  TrajectoryAtom current;

  void emit(Observation final_obs, bool terminal) {
    if (out.size() >= spec.budget) throw EnumerationBudgetExceeded(spec.budget);
    TrajectoryAtom atom = current;
    atom.final_observation = final_obs;
    atom.terminal = terminal;
    out.push_back(std::move(atom));
  }

  void visit(std::size_t state) {
    const PomdpModel& model = *spec.model;
    const Observation x = model.observation_of(state);
    const std::size_t index = current.prefix.size();
    const double base = current.probability;
    for (std::size_t a = 0; a < model.action_count(); ++a) {
      const Action u{a};
      const double pu = policy(x.id, a);
      for (const Transition& t : model.transitions(state, u)) {
        if (t.probability <= 0.0) continue;
        const bool capped = index + 1 == spec.horizon;
        double reward = t.reward;
        bool terminal = t.terminal;
        if (!terminal && capped && spec.timeout_reward) {
          reward += *spec.timeout_reward;
          terminal = true;
        }
        current.prefix.append({x, u, reward});
        current.hidden.push_back({state, t.discounted});
        current.probability = base * pu * t.probability;
        const Observation next = model.observation_of(t.next_state);
        if (terminal || capped) {
          emit(next, terminal);
        } else {
          visit(t.next_state);
        }
        current.hidden.pop_back();
        current.prefix.pop_back();
      }
    }
    current.probability = base;
  }
};

// Neumaier-compensated running sum; keeps finite differences of B clean.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    compensation_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

void add_score(Table& trace, const Table& policy, Observation x, Action u, double temperature) {
  const double inv_c = 1.0 / temperature;
  auto row = trace.row(x.id);
  auto probs = policy.row(x.id);
  for (std::size_t k = 0; k < row.size(); ++k) {
    row[k] += ((k == u.id ? 1.0 : 0.0) - probs[k]) * inv_c;
  }
}

// Discount exponent of each step: the number of discounted steps before it.
std::vector<std::size_t> discount_exponents(const TrajectoryAtom& atom) {
  std::vector<std::size_t> k(atom.hidden.size());
  std::size_t clock = 0;
  for (std::size_t t = 0; t < atom.hidden.size(); ++t) {
    k[t] = clock;
    if (atom.hidden[t].discounted) ++clock;
  }
  return k;
}

void require_terminal(const std::vector<TrajectoryAtom>& atoms, const char* who) {
  for (const TrajectoryAtom& atom : atoms) {
    if (!atom.terminal) {
      throw std::invalid_argument(std::string(who) +
                                  ": needs terminated trajectories (set timeout_reward)");
    }
  }
}

}  // namespace

EnumerationBudgetExceeded::EnumerationBudgetExceeded(std::size_t budget)
    : std::runtime_error("trajectory enumeration exceeds the budget of " +
                         std::to_string(budget) + " atoms") {}

std::vector<TrajectoryAtom> enumerate(const EnumerationSpec& spec, const QTable& q,
                                      double temperature) {
  if (!spec.model) throw std::invalid_argument("enumerate: no model");
  if (spec.horizon == 0) throw std::invalid_argument("enumerate: horizon must be >= 1");
  const PomdpModel& model = *spec.model;
  if (q.rows() != model.observation_count() || q.cols() != model.action_count()) {
    throw std::invalid_argument("enumerate: Q-table shape does not match the model");
  }
  const Table policy = policy_table(q, BoltzmannParams(temperature));
  std::vector<TrajectoryAtom> atoms;
  Walker walker{spec, policy, atoms, {}};
  for (std::size_t s = 0; s < model.state_count(); ++s) {
    const double p0 = model.initial()[s];
    if (p0 <= 0.0) continue;
    walker.current = TrajectoryAtom{};
    walker.current.probability = p0;
    walker.visit(s);
  }
  return atoms;
}

double total_probability(const std::vector<TrajectoryAtom>& atoms) {
  double sum = 0.0;
  for (const TrajectoryAtom& atom : atoms) sum += atom.probability;
  return sum;
}

GradientOracle::GradientOracle(EnumerationSpec spec) : spec_(std::move(spec)) {
  if (!spec_.model) throw std::invalid_argument("GradientOracle: no model");
}

std::vector<TrajectoryAtom> GradientOracle::enumerate(const QTable& q, double temperature) const {
  return stigmergy::enumerate(spec_, q, temperature);
}

std::vector<GradientOracle::Outcome> GradientOracle::outcomes(std::size_t state, Action action,
                                                              std::size_t index) const {
  std::vector<Outcome> out;
  const bool capped = index + 1 == spec_.horizon;
  for (const Transition& t : spec_.model->transitions(state, action)) {
    if (t.probability <= 0.0) continue;
    Outcome o{t.probability, t.next_state, t.reward, t.terminal, t.discounted};
    if (!o.terminal && capped && spec_.timeout_reward) {
      o.reward += *spec_.timeout_reward;
      o.terminal = true;
    }
    out.push_back(o);
  }
  return out;
}

double GradientOracle::expected_residual(std::size_t state, Observation x, Action u,
                                         std::size_t index, const QTable& q, const Table& policy,
                                         double temperature, double gamma, Table* grad,
                                         double scale) const {
  double m = -q(x.id, u.id);
  if (grad) (*grad)(x.id, u.id) -= scale;
  for (const Outcome& o : outcomes(state, u, index)) {
    m += o.probability * o.reward;
    if (o.terminal) continue;
    const Observation next = spec_.model->observation_of(o.next_state);
    const double g = o.discounted ? gamma : 1.0;
    auto probs = policy.row(next.id);
    auto qrow = q.row(next.id);
    double value = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) value += probs[k] * qrow[k];
    m += o.probability * g * value;
    if (grad) {
      // d/dQ(x', k) of sum_u Pr(u|x') Q(x', u).
      auto grow = grad->row(next.id);
      for (std::size_t k = 0; k < probs.size(); ++k) {
        grow[k] += scale * o.probability * g * probs[k] * (1.0 + (qrow[k] - value) / temperature);
      }
    }
  }
  return m;
}

double GradientOracle::exact_B(const std::vector<TrajectoryAtom>& atoms,
                               const ErrorMeasure& measure, const QTable& q,
                               double temperature) const {
  const Table policy = policy_table(q, BoltzmannParams(temperature));
  const double beta = measure.beta;
  CompensatedSum total;
  for (const TrajectoryAtom& atom : atoms) {
    const auto k = discount_exponents(atom);
    CompensatedSum sum;
    sum.add(beta * measure.b);  // e_policy(s_0)
    for (std::size_t t = 1; t <= atom.prefix.size(); ++t) {
      const EpisodeStep& step = atom.prefix[t - 1];
      if (beta != 0.0) {
        sum.add(beta * e_policy_sample(k[t - 1], step.reward, measure.gamma, measure.b));
      }
      if (beta != 1.0) {
        const double m = expected_residual(atom.hidden[t - 1].state, step.observation, step.action,
                                           t - 1, q, policy, temperature, measure.gamma, nullptr,
                                           0.0);
        sum.add((1.0 - beta) * 0.5 * m * m);
      }
    }
    total.add(atom.probability * sum.value());
  }
  return total.value();
}

double GradientOracle::exact_B(const ErrorMeasure& measure, const QTable& q,
                               double temperature) const {
  return exact_B(enumerate(q, temperature), measure, q, temperature);
}

Table GradientOracle::exact_grad_B(const std::vector<TrajectoryAtom>& atoms,
                                   const ErrorMeasure& measure, const QTable& q,
                                   double temperature) const {
  const Table policy = policy_table(q, BoltzmannParams(temperature));
  const double beta = measure.beta;
  Table grad(q.rows(), q.cols());
  Table trace(q.rows(), q.cols());
  for (const TrajectoryAtom& atom : atoms) {
    const auto k = discount_exponents(atom);
    trace.fill(0.0);
    for (std::size_t t = 1; t <= atom.prefix.size(); ++t) {
      const EpisodeStep& step = atom.prefix[t - 1];
      add_score(trace, policy, step.observation, step.action, temperature);
      double e = 0.0;
      if (beta != 0.0) e += beta * e_policy_sample(k[t - 1], step.reward, measure.gamma, measure.b);
      if (beta != 1.0) {
        const std::size_t s = atom.hidden[t - 1].state;
        const double m = expected_residual(s, step.observation, step.action, t - 1, q, policy,
                                           temperature, measure.gamma, nullptr, 0.0);
        e += (1.0 - beta) * 0.5 * m * m;
        expected_residual(s, step.observation, step.action, t - 1, q, policy, temperature,
                          measure.gamma, &grad, atom.probability * (1.0 - beta) * m);
      }
      if (e != 0.0) grad.add_scaled(trace, atom.probability * e);
    }
  }
  return grad;
}

Table GradientOracle::finite_difference_grad_B(const ErrorMeasure& measure, const QTable& q,
                                               double temperature, double h) const {
  Table grad(q.rows(), q.cols());
  QTable probe = q;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = q.values()[i];
    probe.values()[i] = w + h;
    const double up = exact_B(measure, probe, temperature);
    probe.values()[i] = w - h;
    const double down = exact_B(measure, probe, temperature);
    probe.values()[i] = w;
    grad.values()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<TransitionSample> GradientOracle::replay(const TrajectoryAtom& atom) const {
  std::vector<TransitionSample> out;
  const std::size_t n = atom.prefix.size();
  out.reserve(n);
  for (std::size_t t = 1; t <= n; ++t) {
    const EpisodeStep& step = atom.prefix[t - 1];
    TransitionSample tr;
    tr.x_prev = step.observation;
    tr.u_prev = step.action;
    tr.r_prev = step.reward;
    tr.x = t < n ? atom.prefix[t].observation : atom.final_observation;
    tr.u = t < n ? atom.prefix[t].action : Action{0};
    tr.terminal = t == n && atom.terminal;
    tr.discounted = atom.hidden[t - 1].discounted;
    out.push_back(tr);
  }
  return out;
}

Table GradientOracle::vaps_update_expectation(const std::vector<TrajectoryAtom>& atoms,
                                              const ErrorMeasure& measure, const QTable& q,
                                              double temperature) const {
  require_terminal(atoms, "vaps_update_expectation");
  Table expectation(q.rows(), q.cols());
  VapsLearner learner(q, {measure.beta, measure.gamma, measure.b, SarsaSampling::Single});
  for (const TrajectoryAtom& atom : atoms) {
    learner.begin_trial(temperature);
    for (const TransitionSample& tr : replay(atom)) learner.observe(tr);
    expectation.add_scaled(learner.accumulated_gradient(), atom.probability);
  }
  return expectation;
}

Table GradientOracle::double_sample_expectation(const std::vector<TrajectoryAtom>& atoms,
                                                const ErrorMeasure& measure, const QTable& q,
                                                double temperature) const {
  require_terminal(atoms, "double_sample_expectation");
  const Table policy = policy_table(q, BoltzmannParams(temperature));
  const double beta = measure.beta;
  Table expectation(q.rows(), q.cols());
  Table trace(q.rows(), q.cols());
  for (const TrajectoryAtom& atom : atoms) {
    const auto k = discount_exponents(atom);
    const auto samples = replay(atom);
    trace.fill(0.0);
    for (std::size_t t = 1; t <= samples.size(); ++t) {
      const TransitionSample& first = samples[t - 1];
      add_score(trace, policy, first.x_prev, first.u_prev, temperature);
      if (beta != 0.0) {
        const double e = beta * e_policy_sample(k[t - 1], first.r_prev, measure.gamma, measure.b);
        expectation.add_scaled(trace, atom.probability * e);
      }
      if (beta == 1.0) continue;
      for (const Outcome& o : outcomes(atom.hidden[t - 1].state, first.u_prev, t - 1)) {
        TransitionSample second = first;
        second.r_prev = o.reward;
        second.x = spec_.model->observation_of(o.next_state);
        second.terminal = o.terminal;
        second.discounted = o.discounted;
        auto accumulate = [&](double weight) {
          const SarsaErrorSample s = e_sarsa_sample(first, second, q, measure.gamma, temperature);
          const double w = atom.probability * weight * (1.0 - beta);
          expectation.add_scaled(s.gradient, w);
          expectation.add_scaled(trace, w * s.error);
        };
        if (o.terminal) {
          second.u = Action{0};
          accumulate(o.probability);
        } else {
          for (std::size_t a = 0; a < q.cols(); ++a) {
            second.u = Action{a};
            accumulate(o.probability * policy(second.x.id, a));
          }
        }
      }
    }
  }
  return expectation;
}

std::vector<GradientCheck> run_gradient_checks(const EnumerationSpec& spec, const QTable& q,
                                               double temperature,
                                               const GradientCheckOptions& options) {
  std::vector<GradientCheck> checks;
  const GradientOracle oracle(spec);

  double mass = 0.0;
  for (std::size_t h = 1; h <= spec.horizon; ++h) {
    EnumerationSpec cut = spec;
    cut.horizon = h;
    cut.timeout_reward.reset();
    mass = std::max(mass, std::abs(total_probability(enumerate(cut, q, temperature)) - 1.0));
  }
  const auto atoms = oracle.enumerate(q, temperature);
  mass = std::max(mass, std::abs(total_probability(atoms) - 1.0));
  checks.push_back({"probability conservation", mass, options.probability_tolerance});

  const struct {
    const char* name;
    ErrorMeasure measure;
  } measures[] = {
      {"policy", ErrorMeasure::policy(options.gamma, options.b)},
      {"sarsa", ErrorMeasure::sarsa(options.gamma)},
      {"combined", ErrorMeasure::combined(options.beta, options.gamma, options.b)},
  };
  for (const auto& [name, measure] : measures) {
    const Table exact = oracle.exact_grad_B(atoms, measure, q, temperature);
    const Table fd = oracle.finite_difference_grad_B(measure, q, temperature, options.fd_step);
    const double scale = std::max(max_abs(exact), 1e-3);
    checks.push_back({std::string("finite differences (") + name + ")",
                      max_abs_diff(exact, fd) / scale, options.fd_tolerance});
  }

  const ErrorMeasure policy = ErrorMeasure::policy(options.gamma, options.b);
  checks.push_back({"vaps(1) update expectation",
                    max_abs_diff(oracle.vaps_update_expectation(atoms, policy, q, temperature),
                                 oracle.exact_grad_B(atoms, policy, q, temperature)),
                    options.exact_tolerance});

  for (double beta : {0.0, options.beta}) {
    const ErrorMeasure m = ErrorMeasure::combined(beta, options.gamma, options.b);
    const Table exact = oracle.exact_grad_B(atoms, m, q, temperature);
    const std::string tag = "(beta=" + format_real(beta) + ")";
    checks.push_back({"double-sample expectation " + tag,
                      max_abs_diff(oracle.double_sample_expectation(atoms, m, q, temperature), exact),
                      options.exact_tolerance});
    checks.push_back({"single-sample bias " + tag,
                      max_abs_diff(oracle.vaps_update_expectation(atoms, m, q, temperature), exact),
                      0.0, CheckKind::Report});
  }
  return checks;
}

}  // namespace stigmergy
