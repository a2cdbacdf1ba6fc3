#include "stigmergy/env.hpp"

#include <cmath>
#include <string>

namespace stigmergy {

namespace {

constexpr double kRowTolerance = 1e-12;

std::string where(std::size_t state, std::size_t action) {
  return "(state " + std::to_string(state) + ", action " + std::to_string(action) + ")";
}

}  // namespace

EpisodePrefix truncate(const EpisodePrefix& seq, std::size_t t) {
  if (t >= seq.size()) {
    throw std::out_of_range("truncate: index " + std::to_string(t) + " outside prefix of length " +
                            std::to_string(seq.size()));
  }
  auto steps = seq.steps();
  return EpisodePrefix({steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(t + 1)});
}

PomdpModel::PomdpModel(std::size_t state_count, std::size_t observation_count,
                       std::size_t action_count)
    : observation_count_(observation_count),
      action_count_(action_count),
      initial_(state_count, 0.0),
      observation_of_(state_count, 0),
      transitions_(state_count * action_count) {
  if (state_count == 0 || observation_count == 0 || action_count == 0) {
    throw std::invalid_argument("PomdpModel: state, observation and action counts must be positive");
  }
}

void PomdpModel::set_initial(std::vector<double> distribution) {
  if (distribution.size() != state_count()) {
    throw std::invalid_argument("PomdpModel::set_initial: wrong length");
  }
  initial_ = std::move(distribution);
}

void PomdpModel::set_observation(std::size_t state, Observation obs) {
  if (state >= state_count() || obs.id >= observation_count_) {
    throw std::out_of_range("PomdpModel::set_observation: index out of range");
  }
  observation_of_[state] = obs.id;
}

void PomdpModel::add_transition(std::size_t state, Action action, Transition t) {
  if (state >= state_count() || action.id >= action_count_) {
    throw std::out_of_range("PomdpModel::add_transition: index out of range " +
                            where(state, action.id));
  }
  transitions_[state * action_count_ + action.id].push_back(t);
}

void PomdpModel::validate() const {
  double initial_sum = 0.0;
  for (double p : initial_) {
    if (!(p >= 0.0)) throw std::invalid_argument("PomdpModel: negative initial probability");
    initial_sum += p;
  }
  if (std::abs(initial_sum - 1.0) > kRowTolerance) {
    throw std::invalid_argument("PomdpModel: initial distribution sums to " +
                                std::to_string(initial_sum));
  }
  for (std::size_t s = 0; s < state_count(); ++s) {
    if (observation_of_[s] >= observation_count_) {
      throw std::invalid_argument("PomdpModel: observation out of range for state " +
                                  std::to_string(s));
    }
    for (std::size_t a = 0; a < action_count_; ++a) {
      const auto& row = transitions_[s * action_count_ + a];
      if (row.empty()) throw std::invalid_argument("PomdpModel: no transitions for " + where(s, a));
      double sum = 0.0;
      for (const Transition& t : row) {
        if (!(t.probability >= 0.0)) {
          throw std::invalid_argument("PomdpModel: negative probability at " + where(s, a));
        }
        if (t.next_state >= state_count()) {
          throw std::invalid_argument("PomdpModel: next state out of range at " + where(s, a));
        }
        if (!std::isfinite(t.reward)) {
          throw std::invalid_argument("PomdpModel: non-finite reward at " + where(s, a));
        }
        sum += t.probability;
      }
      if (std::abs(sum - 1.0) > kRowTolerance) {
        throw std::invalid_argument("PomdpModel: transition row " + where(s, a) + " sums to " +
                                    std::to_string(sum));
      }
    }
  }
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cumulative += probabilities[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

ModelEnvironment::ModelEnvironment(std::shared_ptr<const PomdpModel> model)
    : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("ModelEnvironment: null model");
  model_->validate();
}

Observation ModelEnvironment::reset(Rng& rng) {
  state_ = sample_index(model_->initial(), rng);
  steps_ = 0;
  terminal_ = false;
  return model_->observation_of(state_);
}

StepOutcome ModelEnvironment::step(Action action, Rng& rng) {
  if (terminal_) throw TerminalStepError();
  if (action.id >= model_->action_count()) {
    throw std::out_of_range("ModelEnvironment::step: action " + std::to_string(action.id) +
                            " out of range");
  }
  auto row = model_->transitions(state_, action);
  const Transition* chosen = &row.front();
  if (row.size() > 1) {
    std::vector<double> probs;
    probs.reserve(row.size());
    for (const Transition& t : row) probs.push_back(t.probability);
    chosen = &row[sample_index(probs, rng)];
  }
  state_ = chosen->next_state;
  ++steps_;
  terminal_ = chosen->terminal;
  return {model_->observation_of(state_), chosen->reward, chosen->terminal, chosen->discounted};
}

std::unique_ptr<Environment> ModelEnvironment::clone() const {
  return std::make_unique<ModelEnvironment>(*this);
}

}  // namespace stigmergy
