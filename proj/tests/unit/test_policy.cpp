#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "stigmergy/policy.hpp"

using namespace stigmergy;

TEST(Boltzmann, EqualValuesGiveUniformProbabilities) {
  const QTable q(1, 4, 0.3);
  const auto p = action_probabilities(q, {0}, BoltzmannParams(0.5));
  for (double v : p) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Boltzmann, MatchesClosedFormAndSumsToOne) {
  QTable q(1, 2);
  q(0, 0) = 1.0;
  const auto p = action_probabilities(q, {0}, BoltzmannParams(1.0));
  EXPECT_NEAR(p[0], std::exp(1.0) / (std::exp(1.0) + 1.0), 1e-15);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
}

TEST(Boltzmann, LargeValuesDoNotOverflow) {
  QTable q(1, 3);
  q(0, 0) = 1000.0;
  q(0, 1) = 999.0;
  const auto p = action_probabilities(q, {0}, BoltzmannParams(1e-3));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  for (double v : p) EXPECT_TRUE(std::isfinite(v));
}

TEST(Boltzmann, EpsilonMixesInUniform) {
  QTable q(1, 2);
  q(0, 0) = 100.0;
  const auto p = action_probabilities(q, {0}, BoltzmannParams(0.1, 0.2));
  EXPECT_NEAR(p[0], 0.9, 1e-12);
  EXPECT_NEAR(p[1], 0.1, 1e-12);
}

TEST(Boltzmann, RejectsBadParameters) {
  EXPECT_THROW(BoltzmannParams(0.0), std::invalid_argument);
  EXPECT_THROW(BoltzmannParams(1.0, 1.5), std::invalid_argument);
  EXPECT_THROW(BoltzmannParams(1.0, -0.1), std::invalid_argument);
}

TEST(Boltzmann, SamplingFrequencies) {
  QTable q(1, 2);
  q(0, 0) = std::log(3.0);
  const auto p = action_probabilities(q, {0}, BoltzmannParams(1.0));
  Rng rng(5);
  int zero = 0;
  for (int i = 0; i < 40000; ++i) zero += sample_action(p, rng).id == 0;
  EXPECT_NEAR(zero / 40000.0, 0.75, 0.01);
}

TEST(Greedy, BreaksTiesUniformly) {
  const QTable q(1, 2, 0.0);
  Rng rng(3);
  int zero = 0;
  for (int i = 0; i < 4000; ++i) zero += greedy_action(q, {0}, rng).id == 0;
  EXPECT_NEAR(zero / 4000.0, 0.5, 0.03);
}

TEST(LogProbGradient, ThreeCases) {
  const QTable q(2, 2, 0.0);
  const Table g = log_prob_gradient(q, {0}, {1}, 1.0);
  EXPECT_DOUBLE_EQ(g(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(g(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(g(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(g(1, 1), 0.0);
}

TEST(LogProbGradient, RowSumsToZero) {
  Rng rng(8);
  const QTable q = random_qtable(1, 5, rng, 2.0);
  for (std::size_t u = 0; u < 5; ++u) {
    const Table g = log_prob_gradient(q, {0}, {u}, 0.37);
    const auto row = g.row(0);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 0.0, 1e-12);
  }
}

TEST(LogProbGradient, MatchesFiniteDifferences) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const double c = 0.2 + uniform01(rng);
    QTable q = random_qtable(2, 4, rng, 1.5);
    const Action u{static_cast<std::size_t>(uniform01(rng) * 4)};
    const Table g = log_prob_gradient(q, {1}, u, c);
    const double h = 1e-6;
    for (std::size_t k = 0; k < 4; ++k) {
      const double w = q(1, k);
      q(1, k) = w + h;
      const double up = std::log(action_probabilities(q, {1}, BoltzmannParams(c))[u.id]);
      q(1, k) = w - h;
      const double down = std::log(action_probabilities(q, {1}, BoltzmannParams(c))[u.id]);
      q(1, k) = w;
      EXPECT_NEAR(g(1, k), (up - down) / (2 * h), 1e-7);
    }
  }
}

TEST(RandomQTable, WithinScale) {
  Rng rng(1);
  const QTable q = random_qtable(10, 4, rng, 0.01);
  EXPECT_LE(max_abs(q), 0.01);
  EXPECT_GT(max_abs(q), 0.0);
}

TEST(Schedules, LearningRate) {
  const ScheduleParams s{0.5, 1.0, 0.2, 1000};
  EXPECT_DOUBLE_EQ(learning_rate(s, 1), 0.6);
  EXPECT_DOUBLE_EQ(learning_rate(s, 10), 0.51);
  EXPECT_NEAR(learning_rate(s, 1000), 0.5001, 1e-15);
}

TEST(Schedules, TemperatureEndpointsAndRatio) {
  const ScheduleParams s{0.5, 1.0, 0.2, 1000};
  EXPECT_DOUBLE_EQ(temperature(s, 1), 1.0);
  EXPECT_DOUBLE_EQ(temperature(s, 1000), 0.2);
  const double ratio = std::pow(0.2, 1.0 / 999.0);
  EXPECT_NEAR(temperature(s, 2) / temperature(s, 1), ratio, 1e-14);
  EXPECT_NEAR(temperature(s, 500) / temperature(s, 499), ratio, 1e-14);
  for (std::size_t n = 2; n <= 1000; ++n) ASSERT_LT(temperature(s, n), temperature(s, n - 1));
}

TEST(Schedules, SingleTrialAndRangeChecks) {
  const ScheduleParams one{0.5, 1.0, 0.2, 1};
  EXPECT_DOUBLE_EQ(temperature(one, 1), 1.0);
  const ScheduleParams s{0.5, 1.0, 0.2, 10};
  EXPECT_THROW(temperature(s, 0), std::out_of_range);
  EXPECT_THROW(temperature(s, 11), std::out_of_range);
  EXPECT_THROW(learning_rate(s, 0), std::out_of_range);
  EXPECT_THROW((ScheduleParams{0.5, 0.1, 0.2, 10}.validate()), std::invalid_argument);
}
