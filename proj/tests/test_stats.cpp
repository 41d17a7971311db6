#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cpspace/random.hpp"
#include "cpspace/stats.hpp"

using namespace cpspace;

TEST(PairwiseSum, ExactOnSmallIntegers) {
  std::vector<double> xs(1000);
  std::iota(xs.begin(), xs.end(), 1.0);
  EXPECT_EQ(pairwise_sum(xs), 500500.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(PairwiseSum, BetterThanNaiveOnCancellation) {
  std::vector<double> xs(1 << 20, 0.1);
  const double exact = 0.1 * static_cast<double>(xs.size());
  double naive = 0.0;
  for (double x : xs) naive += x;
  EXPECT_LE(std::abs(pairwise_sum(xs) - exact), std::abs(naive - exact));
  EXPECT_NEAR(pairwise_sum(xs), exact, 1e-9);
}

TEST(EstimateMean, KnownValues) {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto e = estimate_mean(xs);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_DOUBLE_EQ(e.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(e.se, std::sqrt(5.0 / 12.0));
  EXPECT_EQ(e.n, 4u);
}

TEST(Replicate, IndependentOfThreadCount) {
  auto run = [](std::size_t threads) {
    replication_threads() = threads;
    return replicate(5000, 2, [](std::size_t i, std::span<double> out) {
      RandomStream rng(17, i);
      out[0] = rng.normal();
      out[1] = rng.uniform();
    });
  };
  const auto a = run(1), b = run(4), c = run(3);
  replication_threads() = 0;
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(estimate_mean(a[0]).mean, estimate_mean(b[0]).mean);
}

TEST(Replicate, PropagatesExceptions) {
  replication_threads() = 2;
  EXPECT_THROW(replicate(2000, 1,
                         [](std::size_t i, std::span<double>) {
                           if (i == 1234) throw NonFiniteError(i, 1, i);
                         }),
               NonFiniteError);
  replication_threads() = 0;
}
