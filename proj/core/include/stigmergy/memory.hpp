#pragma once

#include <cstdint>
#include <memory>
#include <variant>

#include "stigmergy/env.hpp"

namespace stigmergy {

// How memory bits enter the action space.
//   Augment: extra actions that each write memory and consume a time step.
//   Compose: every base action is paired with a full memory word, written in
//            the same step.
enum class MemoryMode { Augment, Compose };

// Augment mode only. SetClear gives two actions per bit, Flip one.
enum class MemoryActionStyle { SetClear, Flip };

inline constexpr std::size_t kMaxMemoryBits = 16;

struct MemoryConfig {
  std::size_t bit_count = 0;
  MemoryMode mode = MemoryMode::Augment;
  MemoryActionStyle style = MemoryActionStyle::SetClear;
  // When false, Augment-mode memory writes report discounted = false so
  // learners do not advance the discount clock on them.
  bool discount_memory_actions = true;

  // Throws std::invalid_argument if bit_count exceeds kMaxMemoryBits.
  void validate() const;
};

struct CompositeObservation {
  Observation base;
  std::uint32_t memory = 0;
  friend bool operator==(const CompositeObservation&, const CompositeObservation&) = default;
};

// id = base * 2^L + memory.
Observation encode(const CompositeObservation& obs, std::size_t bit_count);
CompositeObservation decode(Observation obs, std::size_t bit_count);

struct BaseMove {
  Action action;
  friend bool operator==(const BaseMove&, const BaseMove&) = default;
};
struct MemoryWrite {
  std::size_t bit = 0;
  bool value = false;
  friend bool operator==(const MemoryWrite&, const MemoryWrite&) = default;
};
struct MemoryFlip {
  std::size_t bit = 0;
  friend bool operator==(const MemoryFlip&, const MemoryFlip&) = default;
};
struct ComposedMove {
  Action action;
  std::uint32_t word = 0;
  friend bool operator==(const ComposedMove&, const ComposedMove&) = default;
};

using ExtendedAction = std::variant<BaseMove, MemoryWrite, MemoryFlip, ComposedMove>;

// Augment/SetClear: base + 2L; Augment/Flip: base + L; Compose: base * 2^L.
std::size_t extended_action_count(std::size_t base_action_count, const MemoryConfig& cfg);
std::size_t extended_observation_count(std::size_t base_observation_count, const MemoryConfig& cfg);

// Action numbering. Augment: base actions first, then per bit either
// (set, clear) or (flip). Compose: id = base * 2^L + word.
ExtendedAction decode_action(Action action, std::size_t base_action_count, const MemoryConfig& cfg);
Action encode_action(const ExtendedAction& action, std::size_t base_action_count,
                     const MemoryConfig& cfg);

// Environment decorator exposing composite observations and extended
// actions. Memory is all-zero after reset.
class MemoryAugmentedEnv final : public Environment {
 public:
  MemoryAugmentedEnv(std::unique_ptr<Environment> base, MemoryConfig cfg);
  MemoryAugmentedEnv(const MemoryAugmentedEnv& other);
  MemoryAugmentedEnv& operator=(const MemoryAugmentedEnv&) = delete;

  std::size_t observation_count() const override;
  std::size_t action_count() const override;
  Observation reset(Rng& rng) override;
  StepOutcome step(Action action, Rng& rng) override;
  bool terminal() const override { return base_->terminal(); }
  std::size_t steps_taken() const override { return steps_; }
  std::unique_ptr<Environment> clone() const override;

  StepOutcome apply_extended(const ExtendedAction& action, Rng& rng);

  std::uint32_t memory() const { return memory_; }
  Observation base_observation() const { return last_base_; }
  const Environment& base() const { return *base_; }
  const MemoryConfig& config() const { return cfg_; }

 private:
  Observation current() const;

  std::unique_ptr<Environment> base_;
  MemoryConfig cfg_;
  Observation last_base_;
  std::uint32_t memory_ = 0;
  std::size_t steps_ = 0;
};

std::unique_ptr<Environment> wrap(std::unique_ptr<Environment> env, const MemoryConfig& cfg);

// Product model over (hidden state, memory word) with the same action
// numbering and dynamics as MemoryAugmentedEnv. Hidden index is
// state * 2^L + memory; initial memory is zero.
PomdpModel augment_model(const PomdpModel& base, const MemoryConfig& cfg);

}  // namespace stigmergy
