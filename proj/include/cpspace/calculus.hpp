// SPDX-License-Identifier: Apache-2.0
//
// Differential calculus on compound configuration space for cylinder
// functions F(omega) = g(<omega, phi_1>, ..., <omega, phi_N>): directional
// derivatives along lifted flows, the intrinsic gradient and tangent metric,
// logarithmic derivatives B_v, divergence, the Dirichlet operator (three
// variants), Radon-Nikodym densities of diffeomorphism images, the unitary
// representation V(phi) and its real generator A(v).
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpspace/configuration.hpp"
#include "cpspace/expression.hpp"
#include "cpspace/quadrature.hpp"
#include "cpspace/sampler.hpp"
#include "cpspace/smooth.hpp"
#include "cpspace/space.hpp"

namespace cpspace {

/// Built-in outer functions g: R^N -> R, all of the form h(c0 + <a, y>).
namespace outer {

inline std::string render_affine(double c0, const std::vector<double>& a) {
  return format_double(c0) + " (" + format_list(a) + ")";
}

template <class T>
T affine(double c0, const std::vector<double>& a, std::span<const T> y) {
  T acc(c0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * y[i];
  return acc;
}

inline SmoothMap linear(std::vector<double> a, double c0 = 0.0) {
  const std::size_t n = a.size();
  return SmoothMap(n, kMaxOrder, "(linear " + render_affine(c0, a) + ")",
                   [a, c0]<class T>(std::span<const T> y) -> T { return affine(c0, a, y); });
}

inline SmoothMap tanh_of_linear(std::vector<double> a, double c0 = 0.0) {
  const std::size_t n = a.size();
  return SmoothMap(n, kMaxOrder, "(tanh " + render_affine(c0, a) + ")",
                   [a, c0]<class T>(std::span<const T> y) -> T { return tanh(affine(c0, a, y)); });
}

inline SmoothMap exp_of_linear(std::vector<double> a, double c0 = 0.0) {
  const std::size_t n = a.size();
  return SmoothMap(n, kMaxOrder, "(exp " + render_affine(c0, a) + ")",
                   [a, c0]<class T>(std::span<const T> y) -> T { return exp(affine(c0, a, y)); });
}

/// sum_k p_k u^k with u = c0 + <a, y>.
inline SmoothMap polynomial_of_linear(std::vector<double> p, std::vector<double> a, double c0 = 0.0) {
  const std::size_t n = a.size();
  return SmoothMap(n, kMaxOrder, "(poly (" + format_list(p) + ") " + render_affine(c0, a) + ")",
                   [p, a, c0]<class T>(std::span<const T> y) -> T {
                     const T u = affine(c0, a, y);
                     T acc(0.0);
                     for (std::size_t k = p.size(); k-- > 0;) acc = acc * u + p[k];
                     return acc;
                   });
}

}  // namespace outer

/// F(omega) = g(<omega, phi_1>, ..., <omega, phi_N>) with marked pairings.
class CylinderFunction {
 public:
  CylinderFunction() = default;
  CylinderFunction(SmoothMap g, std::vector<ScalarField> directions)
      : g_(std::move(g)), directions_(std::move(directions)) {
    if (directions_.empty()) throw std::invalid_argument("CylinderFunction: need at least one direction");
    if (g_.arity() != directions_.size()) throw std::invalid_argument("CylinderFunction: outer arity mismatch");
  }

  static CylinderFunction constant(double c, std::size_t dim) {
    return CylinderFunction(smooth::constant(1, c), {ScalarField::zero(dim)});
  }

  const SmoothMap& outer() const { return g_; }
  const std::vector<ScalarField>& directions() const { return directions_; }
  std::size_t size() const { return directions_.size(); }
  std::string render() const { return to_expression().render(); }

  std::vector<double> pairings(const MarkedConfiguration& omega) const {
    std::vector<double> y(size());
    for (std::size_t i = 0; i < size(); ++i) y[i] = pair(omega, directions_[i], Weighting::marked);
    return y;
  }

  double eval(const MarkedConfiguration& omega) const { return g_(pairings(omega)); }
  double operator()(const MarkedConfiguration& omega) const { return eval(omega); }

  Expr to_expression() const {
    std::vector<Expr> ch;
    for (const auto& f : directions_) ch.push_back(Expr::marked_pair(f));
    if (ch.size() == 1 && ch[0].is_zero() && g_.arity() == 1) return Expr::constant(g_(std::vector{0.0}));
    return Expr::outer(g_, std::move(ch));
  }

  /// dg/dy_i composed with the same pairings.
  CylinderFunction outer_partial(std::size_t i) const { return CylinderFunction(smooth::partial(g_, i), directions_); }

 private:
  SmoothMap g_;
  std::vector<ScalarField> directions_;
};

inline double eval(const CylinderFunction& f, const MarkedConfiguration& omega) { return f.eval(omega); }
inline double eval(const Expr& e, const MarkedConfiguration& omega) { return e.eval(omega); }

/// A section x -> V(x) in R^d of the tangent bundle over omega.
using Section = std::function<std::vector<double>(std::span<const double>)>;

inline Section constant_section(const CompactVectorField& v) {
  return [v](std::span<const double> x) { return v.value(x); };
}

/// sum_i G_i(omega) v_i(x).
class CylinderVectorField {
 public:
  struct Term {
    CylinderFunction coefficient;
    CompactVectorField field;
  };

  CylinderVectorField() = default;
  explicit CylinderVectorField(std::vector<Term> terms) : terms_(std::move(terms)) {}

  const std::vector<Term>& terms() const { return terms_; }

  Section at(const MarkedConfiguration& omega) const {
    std::vector<double> coeffs;
    for (const auto& t : terms_) coeffs.push_back(t.coefficient.eval(omega));
    return [coeffs, terms = terms_](std::span<const double> x) {
      std::vector<double> out(x.size(), 0.0);
      for (std::size_t j = 0; j < terms.size(); ++j) {
        auto vx = terms[j].field.value(x);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += coeffs[j] * vx[k];
      }
      return out;
    };
  }

 private:
  std::vector<Term> terms_;
};

enum class DerivativeMethod { analytic, flow_fd };
enum class DirichletMode { omega_metric, gamma_metric, paper_literal };

inline std::string to_string(DirichletMode m) {
  switch (m) {
    case DirichletMode::omega_metric:
      return "omega_metric";
    case DirichletMode::gamma_metric:
      return "gamma_metric";
    case DirichletMode::paper_literal:
      return "paper_literal";
  }
  return "";
}

inline constexpr double kFlowFdStep = 1e-4;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace detail

/// grad_v F(omega): sum_i dg_i * <omega, <grad phi_i, v>> (analytic), or the
/// central difference of t -> F(phi_t^v omega) with step h.
inline double directional_derivative(const CylinderFunction& f, const CompactVectorField& v,
                                     const MarkedConfiguration& omega,
                                     DerivativeMethod method = DerivativeMethod::analytic, double h = kFlowFdStep) {
  if (method == DerivativeMethod::flow_fd) {
    return (f.eval(pushforward(omega, v, h)) - f.eval(pushforward(omega, v, -h))) / (2.0 * h);
  }
  auto y = f.pairings(omega);
  auto dg = gradient(f.outer(), y);
  double acc = 0.0;
  for (std::size_t a = 0; a < omega.size(); ++a) {
    auto x = omega.point(a);
    if (v.vanishes_at(x)) continue;
    auto vx = v.value(x);
    double inner = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (dg[i] == 0.0 || f.directions()[i].support().excludes(x)) continue;
      inner += dg[i] * detail::dot(f.directions()[i].gradient(x), vx);
    }
    acc += omega.mark(a) * inner;
  }
  return acc;
}

inline double directional_derivative(const Expr& e, const CompactVectorField& v, const MarkedConfiguration& omega,
                                     DerivativeMethod method = DerivativeMethod::analytic, double h = kFlowFdStep) {
  if (method == DerivativeMethod::flow_fd) {
    return (e.eval(pushforward(omega, v, h)) - e.eval(pushforward(omega, v, -h))) / (2.0 * h);
  }
  return e.derivative(v).eval(omega);
}

/// Intrinsic gradient x -> sum_i dg_i(pairings) grad phi_i(x).
inline Section intrinsic_gradient(const CylinderFunction& f, const MarkedConfiguration& omega) {
  auto dg = gradient(f.outer(), f.pairings(omega));
  return [dg, dirs = f.directions()](std::span<const double> x) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (dg[i] == 0.0) continue;
      auto gi = dirs[i].gradient(x);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += dg[i] * gi[k];
    }
    return out;
  };
}

/// <V1, V2> in T_omega: sum over atoms of s_x <V1(x), V2(x)>.
inline double tangent_inner(const Section& v1, const Section& v2, const MarkedConfiguration& omega) {
  double acc = 0.0;
  for (std::size_t a = 0; a < omega.size(); ++a) {
    auto x = omega.point(a);
    acc += omega.mark(a) * detail::dot(v1(x), v2(x));
  }
  return acc;
}

/// B_v(omega) = sum over the ground configuration of beta_v(x); marks ignored.
inline double log_derivative_B(const IntensityDensity& rho, const CompactVectorField& v,
                               const MarkedConfiguration& omega) {
  double acc = 0.0;
  for (std::size_t a = 0; a < omega.size(); ++a) acc += beta_v_eval(rho, v, omega.point(a));
  return acc;
}

/// div V = sum_j <grad G_j, v_j>_T + B_{v_j} G_j.
inline double divergence(const CylinderVectorField& field, const MarkedConfiguration& omega,
                         const IntensityDensity& rho) {
  double acc = 0.0;
  for (const auto& t : field.terms()) {
    acc += tangent_inner(intrinsic_gradient(t.coefficient, omega), constant_section(t.field), omega);
    acc += log_derivative_B(rho, t.field, omega) * t.coefficient.eval(omega);
  }
  return acc;
}

/// The intrinsic gradient as a cylinder vector field sum_i (dg_i o pairings) grad phi_i.
inline CylinderVectorField gradient_field(const CylinderFunction& f) {
  std::vector<CylinderVectorField::Term> terms;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& phi = f.directions()[i];
    if (phi.support().is_nowhere()) continue;
    terms.push_back({f.outer_partial(i), CompactVectorField::gradient_of(phi)});
  }
  return CylinderVectorField(std::move(terms));
}

/// Dirichlet operator H applied to a cylinder function. With
/// L phi = Laplace phi + <beta, grad phi>:
///   omega_metric:  -sum d2g_ij <omega, grad phi_i . grad phi_j> - sum dg_i <gamma, L phi_i>
///   gamma_metric:  -sum d2g_ij sum_x s_x^2 grad phi_i . grad phi_j  - sum dg_i <omega, L phi_i>
///   paper_literal: -sum d2g_ij <omega, grad phi_i . grad phi_j> - sum dg_i <omega, L phi_i>
inline double dirichlet_apply(const CylinderFunction& f, const MarkedConfiguration& omega,
                              const IntensityDensity& rho, DirichletMode mode = DirichletMode::omega_metric) {
  const std::size_t n = f.size();
  auto y = f.pairings(omega);
  auto dg = gradient(f.outer(), y);
  auto d2g = hessian(f.outer(), y);
  double second = 0.0, first = 0.0;
  std::vector<std::vector<double>> grads(n);
  for (std::size_t a = 0; a < omega.size(); ++a) {
    auto x = omega.point(a);
    const double s = omega.mark(a);
    const double w2 = mode == DirichletMode::gamma_metric ? s * s : s;
    const double w1 = mode == DirichletMode::omega_metric ? 1.0 : s;
    auto beta = beta_eval(rho, x);
    for (std::size_t i = 0; i < n; ++i) grads[i] = f.directions()[i].gradient(x);
    for (std::size_t i = 0; i < n; ++i) {
      if (f.directions()[i].support().excludes(x)) continue;
      for (std::size_t j = 0; j < n; ++j) second += w2 * d2g[i * n + j] * detail::dot(grads[i], grads[j]);
      first += w1 * dg[i] * (f.directions()[i].laplacian(x) + detail::dot(beta, grads[i]));
    }
  }
  return -second - first;
}

/// carre du champ <grad F, grad G>_T.
inline double carre(const CylinderFunction& f, const CylinderFunction& g, const MarkedConfiguration& omega) {
  return tangent_inner(intrinsic_gradient(f, omega), intrinsic_gradient(g, omega), omega);
}

/// phi = phi_t^v.
struct Diffeo {
  CompactVectorField generator;
  double time = 0.0;

  Diffeo inverse() const { return {generator, -time}; }
  bool is_identity() const { return time == 0.0; }
  std::vector<double> apply(std::span<const double> x) const { return flow(generator, time, x).endpoint; }
};

/// Radon-Nikodym density of phi* pi_sigma^tau with respect to pi_sigma^tau:
/// p(omega) = prod_{x in gamma_omega} p^sigma(x) * exp(lambda_tau * integral (1 - p^sigma) dsigma).
/// The exponent is integrated once over supp v, where the integrand lives.
class RadonNikodymDensity {
 public:
  RadonNikodymDensity(Diffeo phi, IntensityDensity rho, double lambda_tau,
                      const QuadratureOptions& opts = {1e-10, 1e-13, 8, 50})
      : phi_(std::move(phi)), rho_(std::move(rho)), lambda_(lambda_tau) {
    if (phi_.is_identity()) return;
    const auto& v = phi_.generator;
    auto r = integrate(
        [&](std::span<const double> x) { return (1.0 - density_ratio(rho_, v, phi_.time, x)) * rho_.value(x); },
        v.support(), opts);
    exponent_ = lambda_ * r.value;
  }

  const Diffeo& diffeo() const { return phi_; }
  double exponent() const { return exponent_; }

  double point_density(std::span<const double> x) const {
    return phi_.is_identity() ? 1.0 : density_ratio(rho_, phi_.generator, phi_.time, x);
  }

  double operator()(const MarkedConfiguration& omega) const {
    if (phi_.is_identity()) return 1.0;
    double log_p = exponent_;
    for (std::size_t a = 0; a < omega.size(); ++a) log_p += std::log(point_density(omega.point(a)));
    return std::exp(log_p);
  }

 private:
  Diffeo phi_;
  IntensityDensity rho_;
  double lambda_;
  double exponent_ = 0.0;
};

inline double rn_density(const Diffeo& phi, const MarkedConfiguration& omega, const IntensityDensity& rho,
                         const MarkLaw& tau) {
  return RadonNikodymDensity(phi, rho, tau.total_mass())(omega);
}

/// (V(phi) F)(omega) = F(phi omega) sqrt(p_{phi^{-1}}(omega)); unitary on L^2(pi).
/// `inverse_density` must be the density for phi.inverse().
inline double rep_apply(const Diffeo& phi, const CylinderFunction& f, const MarkedConfiguration& omega,
                        const RadonNikodymDensity& inverse_density) {
  const auto moved = pushforward(omega, phi.generator, phi.time);
  return f.eval(moved) * std::sqrt(inverse_density(omega));
}

inline double rep_apply(const Diffeo& phi, const CylinderFunction& f, const MarkedConfiguration& omega,
                        const IntensityDensity& rho, const MarkLaw& tau) {
  return rep_apply(phi, f, omega, RadonNikodymDensity(phi.inverse(), rho, tau.total_mass()));
}

/// A(v) E (omega) = grad_v E + (1/2) B_v E.
inline double lift_A_apply(const CompactVectorField& v, const Expr& e, const MarkedConfiguration& omega,
                           const IntensityDensity& rho) {
  return e.derivative(v).eval(omega) + 0.5 * log_derivative_B(rho, v, omega) * e.eval(omega);
}

}  // namespace cpspace
