#include <gtest/gtest.h>

#include "stigmergy/domains.hpp"
#include "stigmergy/memory.hpp"

using namespace stigmergy;

namespace {

MemoryConfig augment(std::size_t bits, MemoryActionStyle style = MemoryActionStyle::SetClear) {
  return {bits, MemoryMode::Augment, style, true};
}

}  // namespace

TEST(MemoryEncoding, CompositeObservationRoundTrip) {
  for (std::size_t base = 0; base < 5; ++base) {
    for (std::uint32_t mem = 0; mem < 4; ++mem) {
      const Observation id = encode({{base}, mem}, 2);
      EXPECT_EQ(id.id, base * 4 + mem);
      EXPECT_EQ(decode(id, 2), (CompositeObservation{{base}, mem}));
    }
  }
}

TEST(MemoryEncoding, ActionAndObservationCounts) {
  EXPECT_EQ(extended_action_count(2, augment(1)), 4u);
  EXPECT_EQ(extended_action_count(2, augment(3, MemoryActionStyle::Flip)), 5u);
  EXPECT_EQ(extended_action_count(2, {2, MemoryMode::Compose}), 8u);
  EXPECT_EQ(extended_observation_count(5, augment(1)), 10u);
  EXPECT_EQ(extended_action_count(2, augment(0)), 2u);
}

TEST(MemoryEncoding, ActionNumberingRoundTrips) {
  for (const MemoryConfig& cfg :
       {augment(2), augment(2, MemoryActionStyle::Flip), MemoryConfig{2, MemoryMode::Compose}}) {
    const std::size_t n = extended_action_count(2, cfg);
    for (std::size_t a = 0; a < n; ++a) {
      EXPECT_EQ(encode_action(decode_action({a}, 2, cfg), 2, cfg).id, a);
    }
  }
  EXPECT_EQ(decode_action({2}, 2, augment(1)), (ExtendedAction{MemoryWrite{0, true}}));
  EXPECT_EQ(decode_action({3}, 2, augment(1)), (ExtendedAction{MemoryWrite{0, false}}));
  EXPECT_EQ(decode_action({5}, 2, MemoryConfig{2, MemoryMode::Compose}),
            (ExtendedAction{ComposedMove{{1}, 1}}));
}

TEST(MemoryConfig, RejectsTooManyBits) {
  EXPECT_THROW(augment(kMaxMemoryBits + 1).validate(), std::invalid_argument);
  EXPECT_NO_THROW(augment(kMaxMemoryBits).validate());
}

TEST(MemoryAugmentedEnv, WritesChangeObservationButNotBaseState) {
  auto env = wrap(make_load_unload(load_unload_preset("load-unload-5")), augment(1));
  Rng rng(1);
  EXPECT_EQ(env->reset(rng).id, 0u);
  StepOutcome out = env->step({2}, rng);  // set bit 0
  EXPECT_EQ(out.observation.id, 1u);
  EXPECT_EQ(out.reward, 0.0);
  EXPECT_FALSE(out.terminal);
  out = env->step({2}, rng);  // setting again is a no-op write
  EXPECT_EQ(out.observation.id, 1u);
  out = env->step(kMoveRight, rng);
  EXPECT_EQ(decode(out.observation, 1), (CompositeObservation{{1}, 1}));
  EXPECT_EQ(env->steps_taken(), 3u);
}

TEST(MemoryAugmentedEnv, MemoryResetsWithEpisode) {
  MemoryAugmentedEnv env(make_load_unload(load_unload_preset("load-unload-3")), augment(1));
  Rng rng(1);
  env.reset(rng);
  env.step({2}, rng);
  EXPECT_EQ(env.memory(), 1u);
  env.reset(rng);
  EXPECT_EQ(env.memory(), 0u);
}

TEST(MemoryAugmentedEnv, UndiscountedWritesWhenRequested) {
  auto env = wrap(make_load_unload(load_unload_preset("load-unload-3")),
                  {1, MemoryMode::Augment, MemoryActionStyle::SetClear, false});
  Rng rng(1);
  env->reset(rng);
  EXPECT_FALSE(env->step({2}, rng).discounted);
  EXPECT_TRUE(env->step(kMoveRight, rng).discounted);
}

TEST(MemoryAugmentedEnv, ComposeWritesAndMovesInOneStep) {
  const MemoryConfig cfg{1, MemoryMode::Compose};
  auto env = wrap(make_load_unload(load_unload_preset("load-unload-5")), cfg);
  Rng rng(1);
  env->reset(rng);
  const StepOutcome out = env->step(encode_action(ComposedMove{kMoveRight, 1}, 2, cfg), rng);
  EXPECT_EQ(decode(out.observation, 1), (CompositeObservation{{1}, 1}));
}

// The decorator and the product model must describe the same process.
TEST(MemoryAugmentedEnv, AgreesWithProductModel) {
  const LoadUnloadSpec spec = load_unload_preset("load-unload-two-loaders");
  for (const MemoryConfig& cfg : {augment(1), augment(2), augment(2, MemoryActionStyle::Flip),
                                  MemoryConfig{1, MemoryMode::Compose}}) {
    auto wrapped = wrap(make_load_unload(spec), cfg);
    ModelEnvironment product(
        std::make_shared<const PomdpModel>(augment_model(make_load_unload_model(spec), cfg)));
    ASSERT_EQ(product.observation_count(), wrapped->observation_count());
    ASSERT_EQ(product.action_count(), wrapped->action_count());
    Rng pick(11), a(1), b(1);
    for (int episode = 0; episode < 200; ++episode) {
      ASSERT_EQ(wrapped->reset(a), product.reset(b));
      for (int t = 0; t < 40 && !wrapped->terminal(); ++t) {
        const Action u{static_cast<std::size_t>(uniform01(pick) * wrapped->action_count())};
        const StepOutcome x = wrapped->step(u, a);
        const StepOutcome y = product.step(u, b);
        ASSERT_EQ(x, y) << "episode " << episode << " step " << t;
      }
      ASSERT_EQ(wrapped->terminal(), product.terminal());
    }
  }
}
