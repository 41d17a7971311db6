#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cpspace/space.hpp"

using namespace cpspace;

namespace {

const auto kGauss = IntensityDensity::gaussian({0.0});
const auto kChi = ScalarField::bump({0.0}, 0.5);
const auto kV = CompactVectorField::scaled_bump({1.0}, kChi);

double fd(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST(Beta, ClosedForms) {
  EXPECT_NEAR(beta_eval(kGauss, std::vector{0.3})[0], -0.3, 1e-15);
  EXPECT_EQ(beta_eval(IntensityDensity::constant(2, 3.0), std::vector{0.1, 0.2}), (std::vector{0.0, 0.0}));
  EXPECT_NEAR(beta_eval(IntensityDensity::polynomial({0.0}, 1.0, 1.0), std::vector{0.5})[0], 0.8, 1e-15);
}

TEST(BetaV, VanishesOutsideSupport) { EXPECT_EQ(beta_v_eval(kGauss, kV, std::vector{0.7}), 0.0); }

TEST(BetaV, ConstantDensityGradientFieldGivesLaplacian) {
  auto chi = ScalarField::bump({0.1, -0.2}, 0.6);
  auto v = CompactVectorField::gradient_of(chi);
  std::vector<double> x{0.25, -0.1};
  EXPECT_NEAR(beta_v_eval(IntensityDensity::constant(2, 2.0), v, x), chi.laplacian(x), 1e-12);
}

TEST(BetaV, FiniteDifferenceOracleInOneDimension) {
  for (double x : {-0.4, -0.1, 0.05, 0.33}) {
    const double chi = kChi.value(std::vector{x});
    const double dchi = fd([](double t) { return kChi.value(std::vector{t}); }, x);
    const double dlogrho = fd([](double t) { return std::log(kGauss.value(std::vector{t})); }, x);
    const double oracle = dlogrho * chi + dchi;
    EXPECT_NEAR(beta_v_eval(kGauss, kV, std::vector{x}), oracle, 1e-6 * (1 + std::abs(oracle)));
  }
}

TEST(BetaV, SymbolicFieldMatchesNumeric) {
  auto f = beta_v_field(kGauss, kV);
  for (double x : {-0.45, -0.2, 0.0, 0.3, 0.7}) {
    EXPECT_NEAR(f.value(std::vector{x}), beta_v_eval(kGauss, kV, std::vector{x}), 1e-13);
  }
}

TEST(BetaV, IntegratesToZeroAgainstSigma) {
  auto v = CompactVectorField::scaled_bump({0.7}, ScalarField::bump({0.3}, 0.5));
  auto r = integrate([&](std::span<const double> x) { return beta_v_eval(kGauss, v, x) * kGauss.value(x); },
                     Window({-1.0}, {1.0}), {1e-10, 1e-14, 8, 50});
  EXPECT_NEAR(r.value, 0.0, 1e-9);
}

TEST(Flow, TrivialCases) {
  auto r = flow(kV, 0.0, std::vector{0.2});
  EXPECT_EQ(r.endpoint[0], 0.2);
  EXPECT_EQ(r.log_jacobian, 0.0);
  auto o = flow(kV, 0.8, std::vector{0.75});
  EXPECT_EQ(o.endpoint[0], 0.75);
  EXPECT_EQ(o.log_jacobian, 0.0);
}

TEST(Flow, LogJacobianMatchesInverseMapDerivative) {
  const double t = 0.1;
  for (double x : {-0.3, 0.0, 0.2}) {
    auto r = flow(kV, t, std::vector{x});
    const double y = r.endpoint[0];
    const double dinv = fd([&](double s) { return flow(kV, -t, std::vector{s}).endpoint[0]; }, y);
    EXPECT_NEAR(std::exp(r.log_jacobian), dinv, 1e-5);
  }
}

TEST(Flow, GroupLawAndInverse) {
  auto v = CompactVectorField::scaled_bump({0.8, -0.5}, ScalarField::bump({0.1, 0.0}, {0.6, 0.5}));
  std::vector<double> x{0.2, 0.1};
  for (auto [t, s] : {std::pair{0.3, 0.5}, {-0.7, 0.2}, {1.0, -1.0}}) {
    auto a = flow(v, t, flow(v, s, x).endpoint).endpoint;
    auto b = flow(v, t + s, x).endpoint;
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(a[k], b[k], 1e-8);
    auto back = flow(v, -t, flow(v, t, x).endpoint).endpoint;
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(back[k], x[k], 1e-8);
  }
}

TEST(Flow, JacobianRateIsMinusDivergence) {
  const double h = 1e-4;
  for (double x : {-0.3, 0.1, 0.4}) {
    const double rate = (flow(kV, h, std::vector{x}).log_jacobian - flow(kV, -h, std::vector{x}).log_jacobian) / (2 * h);
    EXPECT_NEAR(rate, -kV.divergence(std::vector{x}), 1e-5);
  }
}

TEST(DensityRatio, TrivialCases) {
  EXPECT_EQ(density_ratio(kGauss, kV, 0.0, std::vector{0.1}), 1.0);
  EXPECT_EQ(density_ratio(kGauss, kV, 0.4, std::vector{-0.8}), 1.0);
}

TEST(DensityRatio, ConstantDensityEqualsInverseFlowJacobian) {
  auto one = IntensityDensity::constant(1, 1.0);
  const double t = 0.05;
  for (double x : {-0.2, 0.0, 0.3}) {
    const double jac = fd([&](double s) { return flow(kV, -t, std::vector{s}).endpoint[0]; }, x, 1e-6);
    EXPECT_NEAR(density_ratio(one, kV, t, std::vector{x}) / jac, 1.0, 1e-6);
  }
}

TEST(DensityRatio, CocycleComposesThroughInverse) {
  const double t = 0.3;
  for (double x : {-0.4, -0.05, 0.25}) {
    const double back = flow(kV, -t, std::vector{x}).endpoint[0];
    const double prod = density_ratio(kGauss, kV, t, std::vector{x}) * density_ratio(kGauss, kV, -t, std::vector{back});
    EXPECT_NEAR(prod, 1.0, 1e-7);
  }
}

TEST(DensityRatio, PreservesTotalMass) {
  // integral of p dsigma = sigma(X) for a compactly supported flow; the
  // residual is dominated by the fixed RK4 step (h = 0.01), not quadrature
  Window w({-1.0}, {1.0});
  QuadratureOptions opts{1e-11, 1e-14, 16, 50};
  auto r = integrate([&](std::span<const double> x) { return (1.0 - density_ratio(kGauss, kV, 0.3, x)) * kGauss.value(x); },
                     w, opts);
  EXPECT_NEAR(r.value, 0.0, 1e-7);
}

TEST(LieBracket, Antisymmetry) {
  auto b = lie_bracket(kV, kV);
  for (double x : {-0.3, 0.1}) EXPECT_NEAR(b.value(std::vector{x})[0], 0.0, 1e-15);
  auto z = lie_bracket(kV, CompactVectorField::scaled_bump({0.0}, kChi));
  EXPECT_EQ(z.value(std::vector{0.1})[0], 0.0);
}

TEST(LieBracket, FlowCommutatorOracle) {
  auto v1 = CompactVectorField::scaled_bump({1.0, 0.5}, ScalarField::bump({0.0, 0.0}, 0.6));
  auto v2 = CompactVectorField::scaled_bump({-0.3, 1.0}, ScalarField::bump({0.2, -0.1}, 0.5));
  auto b = lie_bracket(v1, v2);
  std::vector<double> x{0.1, 0.05};
  auto expected = b.value(x);
  // Richardson over two step sizes removes the O(sqrt h) term.
  auto commutator = [&](double s) {
    auto y = flow(v1, s, x).endpoint;
    y = flow(v2, s, y).endpoint;
    y = flow(v1, -s, y).endpoint;
    y = flow(v2, -s, y).endpoint;
    return std::vector{(y[0] - x[0]) / (s * s), (y[1] - x[1]) / (s * s)};
  };
  auto c1 = commutator(0.02), c2 = commutator(0.01);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(c2[k], expected[k], 0.05 * (1 + std::abs(expected[k])));
    EXPECT_NEAR(2 * c2[k] - c1[k], expected[k], 1e-3 * (1 + std::abs(expected[k])));
  }
}

TEST(SigmaMass, ClosedForms) {
  EXPECT_NEAR(sigma_mass(IntensityDensity::constant(1, 1.0), Window({0.0}, {1.0})), 1.0, 1e-14);
  EXPECT_NEAR(sigma_mass(IntensityDensity::constant(2, 2.5), Window({0.0, -1.0}, {2.0, 0.5})), 7.5, 1e-13);
  const double exact = std::sqrt(2 * std::numbers::pi) * std::erf(1 / std::sqrt(2.0));
  EXPECT_NEAR(sigma_mass(kGauss, Window({-1.0}, {1.0})), exact, 1e-8 * exact);
  EXPECT_NEAR(exact, 1.71125, 1e-5);
}

TEST(Bump, DerivativesMatchFiniteDifferences) {
  auto b = ScalarField::bump({0.1, -0.2}, {0.5, 0.4}, 1.5);
  std::vector<double> x{0.3, -0.05};
  auto g = b.gradient(x);
  for (std::size_t k = 0; k < 2; ++k) {
    auto xp = x, xm = x;
    xp[k] += 1e-6;
    xm[k] -= 1e-6;
    EXPECT_NEAR(g[k], (b.value(xp) - b.value(xm)) / 2e-6, 1e-5 * (1 + std::abs(g[k])));
  }
  const double h = 1e-4;
  double lap = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    auto xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    lap += (b.value(xp) - 2 * b.value(x) + b.value(xm)) / (h * h);
  }
  EXPECT_NEAR(b.laplacian(x), lap, 1e-5 * (1 + std::abs(lap)));
  EXPECT_EQ(b.value(std::vector{0.7, 0.0}), 0.0);
  EXPECT_EQ(b.laplacian(std::vector{0.1, 0.3}), 0.0);
}

TEST(Density, GradientAndHessianConsistent) {
  for (const auto& rho : {IntensityDensity::gaussian({0.2, -0.1}, 1.3, 0.7), IntensityDensity::polynomial({0.0, 0.5}, 1.0, 2.0)}) {
    std::vector<double> x{0.35, 0.1};
    auto g = rho.gradient(x);
    auto hs = rho.hessian(x);
    for (std::size_t a = 0; a < 2; ++a) {
      auto xp = x, xm = x;
      xp[a] += 1e-6;
      xm[a] -= 1e-6;
      EXPECT_NEAR(g[a], (rho.value(xp) - rho.value(xm)) / 2e-6, 1e-5 * (1 + std::abs(g[a])));
      auto gp = rho.gradient(xp), gm = rho.gradient(xm);
      for (std::size_t b = 0; b < 2; ++b) {
        EXPECT_NEAR(hs[a * 2 + b], (gp[b] - gm[b]) / 2e-6, 1e-5 * (1 + std::abs(hs[a * 2 + b])));
      }
    }
  }
}

TEST(Density, SupremumBoundsProbes) {
  Window w({-1.0, 0.0}, {0.5, 2.0});
  for (const auto& rho : {IntensityDensity::gaussian({0.2, -0.1}, 1.3, 0.7), IntensityDensity::polynomial({0.0, 0.5}, 1.0, 2.0),
                          IntensityDensity::gaussian({3.0, 1.0})}) {
    const double sup = rho.supremum(w);
    for (double a = -1.0; a <= 0.5; a += 0.05) {
      for (double b = 0.0; b <= 2.0; b += 0.05) EXPECT_LE(rho.value(std::vector{a, b}), sup * (1 + 1e-14));
    }
  }
}
