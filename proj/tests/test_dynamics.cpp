#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace fixture;

TEST(Reflect, FoldsBackIntoWindow) {
  using cpspace::detail::reflect;
  EXPECT_DOUBLE_EQ(reflect(0.3, -1.0, 1.0), 0.3);
  EXPECT_DOUBLE_EQ(reflect(1.25, -1.0, 1.0), 0.75);
  EXPECT_DOUBLE_EQ(reflect(-1.5, -1.0, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(reflect(3.5, -1.0, 1.0), -0.5);
}

TEST(EmStep, ValidatesStep) {
  RandomStream rng(1, 0);
  TrajectoryState s{0.0, three_atoms()};
  EXPECT_THROW(em_step(s, rho(), window(), 0.0, DynamicsMode::unit, rng), std::invalid_argument);
  EXPECT_THROW(em_step(s, rho(), window(), 0.02, DynamicsMode::unit, rng), std::invalid_argument);
  EXPECT_THROW(simulate(three_atoms(), rho(), window(), 0.003, 0.01, DynamicsMode::unit, rng),
               std::invalid_argument);
}

TEST(EmStep, FreezesMarksAndStaysInside) {
  RandomStream rng(3, 0);
  auto traj = simulate(three_atoms(), rho(), window(), 0.01, 2.0, DynamicsMode::mark_weighted, rng, 10);
  ASSERT_EQ(traj.size(), 21u);
  EXPECT_NEAR(traj.back().time, 2.0, 1e-12);
  for (const auto& st : traj) {
    ASSERT_EQ(st.configuration.size(), 3u);
    std::vector<double> marks;
    for (std::size_t a = 0; a < 3; ++a) {
      EXPECT_TRUE(window().contains_closed(st.configuration.point(a)));
      marks.push_back(st.configuration.mark(a));
    }
    std::sort(marks.begin(), marks.end());
    EXPECT_EQ(marks, (std::vector<double>{1.0, 1.0, 2.0}));
  }
}

TEST(EmStep, Deterministic) {
  RandomStream a(9, 4), b(9, 4);
  const auto ta = simulate_to(three_atoms(), rho(), window(), 0.005, 0.5, DynamicsMode::unit, a);
  const auto tb = simulate(three_atoms(), rho(), window(), 0.005, 0.5, DynamicsMode::unit, b).back().configuration;
  EXPECT_EQ(ta, tb);
}

// Constant density, far walls: displacement is N(0, 2T/s) (mark-weighted) or N(0, 2T) (unit).
TEST(EmStep, FreeDiffusionVariance) {
  const auto flat = IntensityDensity::constant(1, 1.0);
  const auto wide = Window::cube(1, -50.0, 50.0);
  const auto start = MarkedConfiguration::compound(1, {0.0, 4.0});
  for (auto mode : {DynamicsMode::mark_weighted, DynamicsMode::unit}) {
    std::vector<double> d, d2;
    for (std::uint64_t r = 0; r < 4000; ++r) {
      RandomStream rng(11, r);
      const double x = simulate_to(start, flat, wide, 0.01, 0.5, mode, rng).point(0)[0];
      d.push_back(x);
      d2.push_back(x * x);
    }
    const double var = mode == DynamicsMode::mark_weighted ? 2.0 * 0.5 / 4.0 : 2.0 * 0.5;
    const auto m1 = estimate_mean(d), m2 = estimate_mean(d2);
    EXPECT_LT(std::abs(m1.mean), 4.0 * m1.se);
    EXPECT_LT(std::abs(m2.mean - var), 4.0 * m2.se) << to_string(mode);
  }
}

TEST(Generator, RichardsonCombination) {
  const auto g = generator_estimate(f_tanh(), three_atoms(), rho(), window(), DynamicsMode::unit, {2e-3, 1e-3}, 500, 5);
  ASSERT_EQ(g.per_dt.size(), 2u);
  EXPECT_NEAR(g.estimate, 2.0 * g.per_dt[1] - g.per_dt[0], 1e-12 * (1.0 + std::abs(g.estimate)));
  EXPECT_NEAR(g.se, std::sqrt(4.0 * g.per_dt_se[1] * g.per_dt_se[1] + g.per_dt_se[0] * g.per_dt_se[0]), 1e-12);
  EXPECT_THROW(generator_estimate(f_tanh(), three_atoms(), rho(), window(), DynamicsMode::unit, {1e-3}, 500, 5),
               std::invalid_argument);
}

TEST(Generator, MatchesDirichletVariant) {
  const auto w = three_atoms();
  for (auto mode : {DynamicsMode::mark_weighted, DynamicsMode::unit}) {
    const auto g = generator_estimate(f_tanh(), w, rho(), window(), mode, {2e-3, 1e-3}, 20000, 21);
    const double target = -dirichlet_apply(f_tanh(), w, rho(), matching_dirichlet(mode));
    EXPECT_LT(std::abs(g.estimate - target), 4.0 * g.se) << to_string(mode) << " " << g.estimate << " vs " << target;
  }
}

// One atom at the bump centre: the one-step quotient's bias shrinks linearly
// with dt (ratio ~4 over a factor 4 in dt), well above the Monte Carlo noise.
TEST(Generator, BiasIsFirstOrderInStep) {
  const auto w = MarkedConfiguration::compound(1, {0.0, 2.0});
  for (auto mode : {DynamicsMode::mark_weighted, DynamicsMode::unit}) {
    const auto g = generator_estimate(f_lin(), w, rho(), window(), mode, {8e-3, 4e-3, 2e-3}, 200000, 3);
    const double target = -dirichlet_apply(f_lin(), w, rho(), matching_dirichlet(mode));
    std::vector<double> err;
    for (double q : g.per_dt) err.push_back(std::abs(q - target));
    EXPECT_GT(err[0], err[1]) << to_string(mode);
    EXPECT_GT(err[1], err[2]) << to_string(mode);
    EXPECT_GT(err[0] / err[2], 2.5) << to_string(mode);
    EXPECT_LT(err[0] / err[2], 6.0) << to_string(mode);
    EXPECT_LT(std::abs(g.estimate - target), err[2]) << to_string(mode);
  }
}
