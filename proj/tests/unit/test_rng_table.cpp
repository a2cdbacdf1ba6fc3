#include <gtest/gtest.h>

#include <set>

#include "stigmergy/format.hpp"
#include "stigmergy/rng.hpp"
#include "stigmergy/table.hpp"

using namespace stigmergy;

TEST(Rng, Uniform01StaysInUnitInterval) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, SplitSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(split_seed(1, 7), split_seed(1, 7));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(split_seed(1, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(split_seed(1, 0), split_seed(2, 0));
}

TEST(Table, IndexingRowsAndArithmetic) {
  Table t(2, 3);
  t(1, 2) = 4.0;
  EXPECT_EQ(t.row(1)[2], 4.0);
  Table u(2, 3, 1.0);
  t.add_scaled(u, 0.5);
  EXPECT_DOUBLE_EQ(t(1, 2), 4.5);
  EXPECT_DOUBLE_EQ(t(0, 0), 0.5);
  t *= 2.0;
  EXPECT_DOUBLE_EQ(t(1, 2), 9.0);
  EXPECT_DOUBLE_EQ(max_abs(t), 9.0);
  EXPECT_DOUBLE_EQ(max_abs_diff(t, u), 8.0);
  EXPECT_FALSE(t.same_shape(Table(3, 2)));
}

TEST(Format, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, 22.5, -1.0, 1e-300, 12.679999999999996}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(0.5), "0.5");
}
