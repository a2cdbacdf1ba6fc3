#include "stigmergy/memory.hpp"

#include <stdexcept>
#include <string>

namespace stigmergy {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::size_t words(const MemoryConfig& cfg) { return std::size_t{1} << cfg.bit_count; }

std::uint32_t write_bit(std::uint32_t memory, std::size_t bit, bool value) {
  const std::uint32_t mask = std::uint32_t{1} << bit;
  return value ? (memory | mask) : (memory & ~mask);
}

// Effect of an extended action on (memory, base action to take).
struct Decoded {
  std::uint32_t memory = 0;
  bool moves_base = false;
  Action base;
};

Decoded resolve(const ExtendedAction& action, std::uint32_t memory, const MemoryConfig& cfg) {
  return std::visit(
      Overloaded{
          [&](const BaseMove& m) { return Decoded{memory, true, m.action}; },
          [&](const MemoryWrite& w) {
            if (w.bit >= cfg.bit_count) throw std::out_of_range("MemoryWrite: bit out of range");
            return Decoded{write_bit(memory, w.bit, w.value), false, {}};
          },
          [&](const MemoryFlip& f) {
            if (f.bit >= cfg.bit_count) throw std::out_of_range("MemoryFlip: bit out of range");
            return Decoded{memory ^ (std::uint32_t{1} << f.bit), false, {}};
          },
          [&](const ComposedMove& c) {
            if (c.word >= words(cfg)) throw std::out_of_range("ComposedMove: word out of range");
            return Decoded{c.word, true, c.action};
          },
      },
      action);
}

}  // namespace

void MemoryConfig::validate() const {
  if (bit_count > kMaxMemoryBits) {
    throw std::invalid_argument("memory_bits: at most " + std::to_string(kMaxMemoryBits) +
                                " supported, got " + std::to_string(bit_count));
  }
}

Observation encode(const CompositeObservation& obs, std::size_t bit_count) {
  return {(obs.base.id << bit_count) + obs.memory};
}

CompositeObservation decode(Observation obs, std::size_t bit_count) {
  const std::size_t mask = (std::size_t{1} << bit_count) - 1;
  return {{obs.id >> bit_count}, static_cast<std::uint32_t>(obs.id & mask)};
}

std::size_t extended_action_count(std::size_t base_action_count, const MemoryConfig& cfg) {
  if (cfg.mode == MemoryMode::Compose) return base_action_count * words(cfg);
  return base_action_count +
         (cfg.style == MemoryActionStyle::SetClear ? 2 * cfg.bit_count : cfg.bit_count);
}

std::size_t extended_observation_count(std::size_t base_observation_count,
                                       const MemoryConfig& cfg) {
  return base_observation_count * words(cfg);
}

ExtendedAction decode_action(Action action, std::size_t base_action_count,
                             const MemoryConfig& cfg) {
  if (action.id >= extended_action_count(base_action_count, cfg)) {
    throw std::out_of_range("extended action " + std::to_string(action.id) + " out of range");
  }
  if (cfg.mode == MemoryMode::Compose) {
    return ComposedMove{{action.id >> cfg.bit_count},
                        static_cast<std::uint32_t>(action.id & (words(cfg) - 1))};
  }
  if (action.id < base_action_count) return BaseMove{action};
  const std::size_t k = action.id - base_action_count;
  if (cfg.style == MemoryActionStyle::Flip) return MemoryFlip{k};
  return MemoryWrite{k / 2, k % 2 == 0};
}

Action encode_action(const ExtendedAction& action, std::size_t base_action_count,
                     const MemoryConfig& cfg) {
  return std::visit(
      Overloaded{
          [&](const BaseMove& m) {
            if (cfg.mode != MemoryMode::Augment) throw std::invalid_argument("BaseMove needs Augment mode");
            return m.action;
          },
          [&](const MemoryWrite& w) {
            if (cfg.mode != MemoryMode::Augment || cfg.style != MemoryActionStyle::SetClear) {
              throw std::invalid_argument("MemoryWrite needs Augment/SetClear");
            }
            return Action{base_action_count + 2 * w.bit + (w.value ? 0 : 1)};
          },
          [&](const MemoryFlip& f) {
            if (cfg.mode != MemoryMode::Augment || cfg.style != MemoryActionStyle::Flip) {
              throw std::invalid_argument("MemoryFlip needs Augment/Flip");
            }
            return Action{base_action_count + f.bit};
          },
          [&](const ComposedMove& c) {
            if (cfg.mode != MemoryMode::Compose) throw std::invalid_argument("ComposedMove needs Compose mode");
            return Action{(c.action.id << cfg.bit_count) + c.word};
          },
      },
      action);
}

MemoryAugmentedEnv::MemoryAugmentedEnv(std::unique_ptr<Environment> base, MemoryConfig cfg)
    : base_(std::move(base)), cfg_(cfg) {
  if (!base_) throw std::invalid_argument("MemoryAugmentedEnv: null base environment");
  cfg_.validate();
}

MemoryAugmentedEnv::MemoryAugmentedEnv(const MemoryAugmentedEnv& other)
    : base_(other.base_->clone()),
      cfg_(other.cfg_),
      last_base_(other.last_base_),
      memory_(other.memory_),
      steps_(other.steps_) {}

std::size_t MemoryAugmentedEnv::observation_count() const {
  return extended_observation_count(base_->observation_count(), cfg_);
}

std::size_t MemoryAugmentedEnv::action_count() const {
  return extended_action_count(base_->action_count(), cfg_);
}

Observation MemoryAugmentedEnv::current() const { return encode({last_base_, memory_}, cfg_.bit_count); }

Observation MemoryAugmentedEnv::reset(Rng& rng) {
  last_base_ = base_->reset(rng);
  memory_ = 0;
  steps_ = 0;
  return current();
}

StepOutcome MemoryAugmentedEnv::step(Action action, Rng& rng) {
  return apply_extended(decode_action(action, base_->action_count(), cfg_), rng);
}

StepOutcome MemoryAugmentedEnv::apply_extended(const ExtendedAction& action, Rng& rng) {
  if (base_->terminal()) throw TerminalStepError();
  const Decoded d = resolve(action, memory_, cfg_);
  if (!d.moves_base) {
    memory_ = d.memory;
    ++steps_;
    return {current(), 0.0, false, cfg_.discount_memory_actions};
  }
  const StepOutcome base = base_->step(d.base, rng);
  memory_ = d.memory;
  last_base_ = base.observation;
  ++steps_;
  return {current(), base.reward, base.terminal, base.discounted};
}

std::unique_ptr<Environment> MemoryAugmentedEnv::clone() const {
  return std::make_unique<MemoryAugmentedEnv>(*this);
}

std::unique_ptr<Environment> wrap(std::unique_ptr<Environment> env, const MemoryConfig& cfg) {
  return std::make_unique<MemoryAugmentedEnv>(std::move(env), cfg);
}

PomdpModel augment_model(const PomdpModel& base, const MemoryConfig& cfg) {
  cfg.validate();
  const std::size_t w = words(cfg);
  const std::size_t actions = extended_action_count(base.action_count(), cfg);
  PomdpModel out(base.state_count() * w, extended_observation_count(base.observation_count(), cfg),
                 actions);

  std::vector<double> initial(out.state_count(), 0.0);
  for (std::size_t s = 0; s < base.state_count(); ++s) initial[s * w] = base.initial()[s];
  out.set_initial(std::move(initial));

  for (std::size_t s = 0; s < base.state_count(); ++s) {
    for (std::uint32_t m = 0; m < w; ++m) {
      const std::size_t hidden = s * w + m;
      out.set_observation(hidden, encode({base.observation_of(s), m}, cfg.bit_count));
      for (std::size_t a = 0; a < actions; ++a) {
        const Decoded d = resolve(decode_action({a}, base.action_count(), cfg), m, cfg);
        if (!d.moves_base) {
          out.add_transition(hidden, {a},
                             {1.0, s * w + d.memory, 0.0, false, cfg.discount_memory_actions});
          continue;
        }
        for (const Transition& t : base.transitions(s, d.base)) {
          out.add_transition(hidden, {a},
                             {t.probability, t.next_state * w + d.memory, t.reward, t.terminal,
                              t.discounted});
        }
      }
    }
  }
  return out;
}

}  // namespace stigmergy
