#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace fixture;

namespace {

MarkedConfiguration omega() { return MarkedConfiguration::compound(1, {-0.45, 2.0, -0.1, 1.0, 0.2, 1.5, 0.6, 1.0}); }

}  // namespace

TEST(Expr, GoldenRender) {
  EXPECT_EQ(f_tanh().to_expression().render(),
            "((tanh 0 (1 0.5)) (mpair (bump (0) (0.5) 1)) (mpair (bump (0.3) (0.5) 1)))");
  EXPECT_EQ(f_poly().render(), "((poly (0 1 0.5) 0 (1 1)) (mpair (bump (-0.3) (0.5) 1)) (mpair (bump (0.3) (0.5) 1)))");
  const auto prod = Expr::marked_pair(b0()) * Expr::unmarked_pair(bp());
  EXPECT_EQ(prod.derivative(vp()).render(),
            "(+ (* (mpair (dir (field (0.8) (bump (0.3) (0.5) 1)) (bump (0) (0.5) 1))) (upair (bump (0.3) (0.5) 1))) "
            "(* (mpair (bump (0) (0.5) 1)) (upair (dir (field (0.8) (bump (0.3) (0.5) 1)) (bump (0.3) (0.5) 1)))))");
  EXPECT_EQ(lift_A(v0(), f_lin().to_expression(), rho()).render(),
            "(+ (* ((d0 (linear 0 (1))) (mpair (bump (0) (0.5) 1))) (mpair (dir (field (1) (bump (0) (0.5) 1)) "
            "(bump (0) (0.5) 1)))) (* 0.5 (upair (beta (gaussian (0) 1 1) (field (1) (bump (0) (0.5) 1)))) "
            "((linear 0 (1)) (mpair (bump (0) (0.5) 1)))))");
}

TEST(Expr, Simplification) {
  EXPECT_TRUE((Expr::constant(0.0) * Expr::marked_pair(b0())).is_zero());
  EXPECT_EQ((Expr::constant(2.0) + Expr::constant(3.0)).render(), "5");
  EXPECT_EQ((2.0 * (3.0 * Expr::marked_pair(b0()))).render(), "(* 6 (mpair (bump (0) (0.5) 1)))");
  EXPECT_TRUE(Expr::marked_pair(ScalarField::bump({0.0}, 0.5, 0.0)).is_zero());
  // Disjoint supports: the derivative of <omega, phi> along v vanishes identically.
  const auto far = CompactVectorField::scaled_bump({1.0}, ScalarField::bump({5.0}, 0.5));
  EXPECT_TRUE(Expr::marked_pair(b0()).derivative(far).is_zero());
  EXPECT_TRUE(Expr::constant(4.0).derivative(v0()).is_zero());
}

TEST(Expr, EvalMatchesPairings) {
  const auto w = omega();
  EXPECT_DOUBLE_EQ(Expr::marked_pair(b0()).eval(w), pair(w, b0()));
  EXPECT_DOUBLE_EQ(Expr::unmarked_pair(b0()).eval(w), pair(w, b0(), Weighting::unmarked));
  EXPECT_DOUBLE_EQ(f_tanh().to_expression().eval(w), f_tanh().eval(w));
  const auto e = Expr::marked_pair(b0()) * Expr::unmarked_pair(bp()) - Expr::constant(1.5);
  EXPECT_NEAR(e.eval(w), pair(w, b0()) * pair(w, bp(), Weighting::unmarked) - 1.5, 1e-15);
}

// Structural derivative against the flow central difference.
TEST(Expr, DerivativeMatchesFlow) {
  const auto w = omega();
  const std::vector<Expr> exprs = {
      f_tanh().to_expression(),
      f_poly().to_expression(),
      Expr::marked_pair(b0()) * Expr::unmarked_pair(bp()) * g_exp().to_expression(),
      lift_A(vm(), f_tanh().to_expression(), rho()),
  };
  for (const auto& e : exprs) {
    for (const auto& v : {v0(), vp(), vm()}) {
      const double a = directional_derivative(e, v, w, DerivativeMethod::analytic);
      const double n = directional_derivative(e, v, w, DerivativeMethod::flow_fd);
      EXPECT_NEAR(a, n, 1e-6 * (1.0 + std::abs(a))) << e.render();
    }
  }
}

TEST(Expr, ProductRule) {
  const auto w = omega();
  const auto a = Expr::marked_pair(b0()), b = g_exp().to_expression();
  const double lhs = (a * b).derivative(vp()).eval(w);
  const double rhs = a.derivative(vp()).eval(w) * b.eval(w) + a.eval(w) * b.derivative(vp()).eval(w);
  EXPECT_NEAR(lhs, rhs, 1e-14);
}

TEST(Expr, DerivativeBudgetIsEnforced) {
  // Bumps carry three derivatives: grad_v consumes one per application.
  auto e = Expr::marked_pair(b0());
  for (int k = 0; k < 3; ++k) e = e.derivative(v0());
  EXPECT_THROW(e.derivative(v0()).eval(omega()), DerivativeOrderError);
}
