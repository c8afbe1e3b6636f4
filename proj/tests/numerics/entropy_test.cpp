#include <gtest/gtest.h>

#include "cicdor/numerics/entropy.hpp"
#include "cicdor/numerics/random.hpp"
#include "oracles.hpp"

namespace nm = cicdor::numerics;

TEST(ConditionalEntropy, DeterministicDependenceIsZero) {
  const std::vector<int> y{0, 1, 1, 0, 1};
  const std::vector<std::vector<int>> z{{-1, 1, 1, -1, 1}};
  EXPECT_DOUBLE_EQ(nm::conditional_entropy(y, z), 0.0);
}

TEST(ConditionalEntropy, BalancedIndependentTableIsOneBit) {
  const std::vector<int> y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const std::vector<std::vector<int>> z{{-1, -1, 0, 0, 1, 1, -1, -1, 0, 0, 1, 1}};
  EXPECT_DOUBLE_EQ(nm::conditional_entropy(y, z), 1.0);
}

TEST(ConditionalEntropy, MatchesJointEnumerationOracle) {
  nm::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30 + rng.index(50);
    std::vector<int> y(n);
    std::vector<std::vector<int>> z(3, std::vector<int>(n));
    for (std::size_t r = 0; r < n; ++r) {
      for (auto& col : z) col[r] = static_cast<int>(rng.index(3)) - 1;
      y[r] = (z[0][r] + (rng.uniform() < 0.3 ? 1 : 0)) > 0 ? 1 : 0;
    }
    EXPECT_NEAR(nm::conditional_entropy(y, z), oracle::conditional_entropy_bits(y, z), 1e-12);
  }
}

TEST(ConditionalEntropy, ConditioningNeverIncreasesEntropy) {
  nm::Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 60;
    std::vector<int> y(n);
    std::vector<std::vector<int>> z(2, std::vector<int>(n));
    for (std::size_t r = 0; r < n; ++r) {
      y[r] = rng.uniform() < 0.5;
      for (auto& col : z) col[r] = static_cast<int>(rng.index(3)) - 1;
    }
    const std::vector<std::vector<int>> fewer{z[0]};
    const double h_small = nm::conditional_entropy(y, fewer);
    const double h_big = nm::conditional_entropy(y, z);
    EXPECT_LE(h_big, h_small + 1e-12);
    EXPECT_GE(h_big, 0.0);
    EXPECT_LE(h_small, 1.0);
  }
}

TEST(ConditionalEntropy, EmptyInputThrows) {
  EXPECT_THROW(nm::conditional_entropy(std::vector<int>{}, {}), std::invalid_argument);
}
