// Small-sample runs of every check on the default fixture. The acceptance
// binary repeats them at full size.
#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace fixture;

namespace {

RunSpec spec(std::size_t n, std::uint64_t base = 0) { return RunSpec{42, base, n, 4.0}; }

void expect_pass(const MCReport& r) {
  EXPECT_TRUE(r.pass) << r.name << ": estimate " << r.estimate << " target " << r.target << " se " << r.se << " z "
                      << r.z;
}

}  // namespace

TEST(Report, ZScoreAndPassRule) {
  auto r = make_report("x", "a", MCReport::Kind::one_sample, 1.2, 0.1, 1.0, 10, 1, 3.0);
  EXPECT_NEAR(r.z, 2.0, 1e-12);
  EXPECT_TRUE(r.pass);
  r = make_report("x", "a", MCReport::Kind::one_sample, 1.4, 0.1, 1.0, 10, 1, 3.0);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(make_report("x", "a", MCReport::Kind::paired, 0.0, 0.0, 0.0, 10, 1, 3.0).pass);
  EXPECT_FALSE(make_report("x", "a", MCReport::Kind::paired, 1e-3, 0.0, 0.0, 10, 1, 3.0).pass);
  EXPECT_TRUE(make_exact_report("e", "a", 1e-11, 1e-10, 5, 1).pass);
  EXPECT_FALSE(make_exact_report("e", "a", 2e-10, 1e-10, 5, 1).pass);
}

TEST(Checks, Laplace) {
  const auto m = model();
  const auto f = ScalarField::bump({0.1}, 0.6, 0.5);
  expect_pass(check_laplace_simple(m, f, spec(20000)));
  expect_pass(check_laplace_compound(m, f, spec(20000)));
  expect_pass(check_laplace_marked(m, JointFunction{f, {0.5, 1.0}}, spec(20000)));
}

TEST(Checks, Moments) {
  for (const auto& r : check_moments(model(), b0(), spec(20000))) expect_pass(r);
}

TEST(Checks, IntegrationByParts) {
  const auto m = model();
  expect_pass(check_ibp(m, f_tanh(), g_exp(), v0(), spec(20000)));
  expect_pass(check_ibp(m, f_lin(), f_poly(), vp(), spec(20000)));
}

TEST(Checks, IbpDetectsMissingLogDerivative) {
  // Dropping B_v leaves E[grad_v (F^2)] = -E[F^2 B_v], far from zero for an
  // off-centre field (a centred one is killed by the x -> -x symmetry).
  const auto m = model();
  const auto sampler = m.compound();
  std::vector<double> xs;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    RandomStream rng(42, i);
    const auto w = sampler.sample(rng);
    xs.push_back(directional_derivative(f_lin(), vp(), w) * f_lin().eval(w) * 2.0);
  }
  const auto e = estimate_mean(xs);
  EXPECT_GT(std::abs(e.mean) / e.se, 10.0);
}

TEST(Checks, SymmetryAdjudication) {
  const auto m = model();
  auto omega = check_symmetry(m, f_lin(), f_lin(), DirichletMode::omega_metric, spec(20000));
  auto gamma = check_symmetry(m, f_lin(), f_lin(), DirichletMode::gamma_metric, spec(20000));
  auto literal = check_symmetry(m, f_lin(), f_lin(), DirichletMode::paper_literal, spec(20000));
  expect_pass(omega[0]);
  expect_pass(omega[1]);
  expect_pass(gamma[1]);
  EXPECT_GT(std::abs(literal[0].z), 5.0);
  EXPECT_FALSE(gamma[0].pass);
  // Under delta_1 all three coincide.
  auto m1 = m;
  m1.tau = MarkLaw::point_mass(1.0);
  for (auto mode : {DirichletMode::omega_metric, DirichletMode::gamma_metric, DirichletMode::paper_literal}) {
    expect_pass(check_symmetry(m1, f_tanh(), g_exp(), mode, spec(20000))[0]);
  }
}

TEST(Checks, QuasiInvariance) {
  for (const auto& r : check_quasi_invariance(model(), Diffeo{v0(), 0.3}, f_tanh(), b0(), spec(20000))) expect_pass(r);
}

TEST(Checks, Reduction) {
  const auto rs = check_reduction(model(), b0(), spec(20000), 500);
  ASSERT_EQ(rs.size(), 4u);
  EXPECT_EQ(rs[0].estimate, 0.0);
  for (const auto& r : rs) expect_pass(r);
}

TEST(Checks, Commutation) {
  for (const auto& r : check_commutation(model(), v0(), vp(), f_tanh(), bm(), 20, spec(0))) expect_pass(r);
}

TEST(Checks, Directional) {
  expect_pass(check_directional(model(), {{"F", f_tanh()}, {"G", g_exp()}}, {{"v0", v0()}, {"vm", vm()}}, 10, spec(0)));
}

TEST(Checks, Stationarity) {
  for (const auto& r :
       check_stationarity(model(), f_tanh(), g_exp(), DynamicsMode::mark_weighted, 0.05, 0.005, spec(5000))) {
    expect_pass(r);
  }
}

TEST(Checks, Generator) {
  const auto m = model();
  for (auto mode : {DynamicsMode::mark_weighted, DynamicsMode::unit}) {
    expect_pass(check_generator(m, f_tanh(), three_atoms(), mode, matching_dirichlet(mode), {2e-3, 1e-3}, spec(20000)));
  }
}

TEST(Checks, NonFiniteFunctionalIsReported) {
  const auto m = model();
  const auto huge = CylinderFunction(outer::exp_of_linear({1e6}), {b0()});
  EXPECT_THROW(check_ibp(m, huge, huge, v0(), spec(1000)), NonFiniteError);
}
