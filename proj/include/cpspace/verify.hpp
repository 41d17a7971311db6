// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo certification of the closed-form identities of the compound
// Poisson calculus. Every check is a pure function of (model, fixture, n,
// seed) and returns MCReport rows. Identities of the form E[difference] = 0
// use paired estimators on a single sample; identities with a closed-form
// side use quadrature targets computed far below the Monte Carlo error.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpspace/calculus.hpp"
#include "cpspace/configuration.hpp"
#include "cpspace/dynamics.hpp"
#include "cpspace/expression.hpp"
#include "cpspace/format.hpp"
#include "cpspace/quadrature.hpp"
#include "cpspace/sampler.hpp"
#include "cpspace/space.hpp"
#include "cpspace/stats.hpp"

namespace cpspace {

struct MCReport {
  enum class Kind { one_sample, two_sample, paired, exact };

  std::string name;
  std::string anchor;  // the identity under test, in words
  Kind kind = Kind::one_sample;
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;
  double z = 0.0;
  bool pass = false;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;  // exact checks only: pass iff |estimate - target| <= tolerance
};

inline std::string to_string(MCReport::Kind k) {
  switch (k) {
    case MCReport::Kind::one_sample:
      return "one_sample";
    case MCReport::Kind::two_sample:
      return "two_sample";
    case MCReport::Kind::paired:
      return "paired";
    case MCReport::Kind::exact:
      return "exact";
  }
  return "";
}

/// Statistical report: z = (estimate - target) / se; a zero se with an exact
/// match counts as z = 0.
inline MCReport make_report(std::string name, std::string anchor, MCReport::Kind kind, double estimate, double se,
                            double target, std::size_t n, std::uint64_t seed, double z_max) {
  MCReport r{std::move(name), std::move(anchor), kind, estimate, se, target, 0.0, false, n, seed, 0.0};
  const double diff = estimate - target;
  if (se > 0.0) {
    r.z = diff / se;
  } else {
    r.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  r.pass = std::abs(r.z) < z_max;
  return r;
}

/// Exact (algebraic / deterministic) report: z = residual / tolerance.
inline MCReport make_exact_report(std::string name, std::string anchor, double residual, double tolerance,
                                  std::size_t n, std::uint64_t seed) {
  MCReport r{std::move(name), std::move(anchor), MCReport::Kind::exact, residual, 0.0, 0.0, 0.0, false, n, seed,
             tolerance};
  r.z = residual / tolerance;
  r.pass = std::abs(residual) <= tolerance;
  return r;
}

inline MCReport two_sample_report(std::string name, std::string anchor, const MeanEstimate& a, const MeanEstimate& b,
                                  std::uint64_t seed, double z_max) {
  const double se = std::hypot(a.se, b.se);
  return make_report(std::move(name), std::move(anchor), MCReport::Kind::two_sample, a.mean, se, b.mean, a.n + b.n,
                     seed, z_max);
}

/// Everything the checks need about the measure.
struct Model {
  IntensityDensity rho;
  Window window;
  MarkLaw tau;
  std::optional<MarkSpaceLaw> marks;
  std::optional<double> envelope;

  std::size_t dim() const { return window.dim(); }
  CompoundPoissonSampler compound() const { return CompoundPoissonSampler(rho, tau, window, envelope); }
  CompoundPoissonSampler compound_with(const MarkLaw& t) const { return CompoundPoissonSampler(rho, t, window, envelope); }
  PoissonSampler simple(double scale = 1.0) const { return PoissonSampler(rho, window, scale, envelope); }
};

/// Seed, first stream id, sample size and threshold for one check. Replica
/// r of sub-experiment k draws from stream stream_base + k * 2^32 + r.
struct RunSpec {
  std::uint64_t seed = 42;
  std::uint64_t stream_base = 0;
  std::size_t n = 100000;
  double z_max = 3.0;

  std::uint64_t stream(std::uint64_t sub, std::uint64_t replica) const {
    return stream_base + (sub << 32) + replica;
  }
};

/// Test function on X x M for marked Laplace functionals:
/// f(x, m) = phi(x) * (a_0 + sum_k a_k m_k).
struct JointFunction {
  ScalarField phi;
  std::vector<double> mark_coeffs;

  double operator()(std::span<const double> x, std::span<const double> m) const {
    double a = mark_coeffs.empty() ? 1.0 : mark_coeffs[0];
    for (std::size_t k = 0; k + 1 < mark_coeffs.size() && k < m.size(); ++k) a += mark_coeffs[k + 1] * m[k];
    return phi.value(x) * a;
  }
  std::string render() const { return "(joint " + phi.name() + " (" + format_list(mark_coeffs) + "))"; }
};

inline constexpr QuadratureOptions kTargetQuadrature{1e-11, 1e-14, 8, 50};

namespace detail {

template <class Sampler, class Functional>
std::vector<std::vector<double>> sample_functional(const Sampler& sampler, const RunSpec& spec, std::uint64_t sub,
                                                   std::size_t width, Functional fn) {
  auto cols = replicate(spec.n, width, [&](std::size_t i, std::span<double> out) {
    RandomStream rng(spec.seed, spec.stream(sub, i));
    auto omega = sampler.sample(rng);
    fn(omega, out);
    for (double v : out) {
      if (!std::isfinite(v)) throw NonFiniteError(i, spec.seed, spec.stream(sub, i));
    }
  });
  return cols;
}

inline double sigma_integral(const Model& m, const std::function<double(std::span<const double>)>& h) {
  return integrate([&](std::span<const double> x) { return h(x) * m.rho.value(x); }, m.window, kTargetQuadrature)
      .value;
}

}  // namespace detail

/// (mean, se) of a scalar functional of the compound Poisson measure.
inline MeanEstimate mc_expect(const std::function<double(const MarkedConfiguration&)>& functional,
                              const CompoundPoissonSampler& sampler, const RunSpec& spec) {
  if (spec.n < 100) throw std::invalid_argument("mc_expect: need n >= 100");
  auto cols = detail::sample_functional(sampler, spec, 0, 1, [&](const MarkedConfiguration& w, std::span<double> out) {
    out[0] = functional(w);
  });
  return estimate_mean(cols[0]);
}

// ---------------------------------------------------------------- Laplace

inline MCReport check_laplace_simple(const Model& m, const ScalarField& f, const RunSpec& spec) {
  auto sampler = m.simple();
  const double target =
      std::exp(detail::sigma_integral(m, [&](std::span<const double> x) { return std::expm1(f.value(x)); }));
  auto cols = replicate(spec.n, 1, [&](std::size_t i, std::span<double> out) {
    RandomStream rng(spec.seed, spec.stream(0, i));
    auto g = sampler.sample(rng);
    double acc = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) acc += f.value(g.point(a));
    out[0] = std::exp(acc);
  });
  auto e = estimate_mean(cols[0]);
  return make_report("laplace.simple", "Laplace transform of the Poisson measure", MCReport::Kind::one_sample, e.mean,
                     e.se, target, e.n, spec.seed, spec.z_max);
}

inline MCReport check_laplace_compound(const Model& m, const ScalarField& f, const RunSpec& spec) {
  auto sampler = m.compound();
  const double target = std::exp(detail::sigma_integral(m, [&](std::span<const double> x) {
    const double fx = f.value(x);
    return m.tau.mark_integral([fx](double s) { return std::expm1(s * fx); }, kTargetQuadrature);
  }));
  auto cols = detail::sample_functional(sampler, spec, 0, 1, [&](const MarkedConfiguration& w, std::span<double> out) {
    out[0] = std::exp(pair(w, f));
  });
  auto e = estimate_mean(cols[0]);
  return make_report("laplace.compound", "Laplace transform of the compound Poisson measure",
                     MCReport::Kind::one_sample, e.mean, e.se, target, e.n, spec.seed, spec.z_max);
}

inline MCReport check_laplace_marked(const Model& m, const JointFunction& f, const RunSpec& spec) {
  if (!m.marks) throw std::invalid_argument("check_laplace_marked: model has no mark-space law");
  const auto& law = *m.marks;
  MarkedPoissonSampler sampler(m.rho, law, m.window, m.envelope);
  const std::size_t d = m.dim(), q = law.dim();
  double inner;
  if (law.is_uniform()) {
    std::vector<double> lo = m.window.lower(), hi = m.window.upper();
    lo.insert(lo.end(), law.box().lower().begin(), law.box().lower().end());
    hi.insert(hi.end(), law.box().upper().begin(), law.box().upper().end());
    inner = integrate(
                [&](std::span<const double> xm) {
                  return std::expm1(f(xm.first(d), xm.subspan(d))) * m.rho.value(xm.first(d));
                },
                Window(lo, hi), kTargetQuadrature)
                .value /
            law.box().volume();
  } else {
    inner = detail::sigma_integral(m, [&](std::span<const double> x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < law.atoms().size(); ++i) acc += law.weights()[i] * std::expm1(f(x, law.atoms()[i]));
      return acc;
    });
  }
  const double target = std::exp(inner);
  auto cols = detail::sample_functional(sampler, spec, 0, 1, [&](const MarkedConfiguration& w, std::span<double> out) {
    double acc = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) acc += f(w.point(a), w.marks(a));
    out[0] = std::exp(acc);
  });
  (void)q;
  auto e = estimate_mean(cols[0]);
  return make_report("laplace.marked", "Laplace transform of the marked Poisson measure", MCReport::Kind::one_sample,
                     e.mean, e.se, target, e.n, spec.seed, spec.z_max);
}

// ---------------------------------------------------------------- moments

/// First moment m_1 * int f dsigma and second moment
/// m_2 * int f^2 dsigma + m_1^2 (int f dsigma)^2 of <omega, f>.
inline std::vector<MCReport> check_moments(const Model& m, const ScalarField& f, const RunSpec& spec) {
  auto sampler = m.compound();
  const double i1 = detail::sigma_integral(m, [&](std::span<const double> x) { return f.value(x); });
  const double i2 = detail::sigma_integral(m, [&](std::span<const double> x) { return f.value(x) * f.value(x); });
  const double m1 = m.tau.moment(1), m2 = m.tau.moment(2);
  auto cols = detail::sample_functional(sampler, spec, 0, 2, [&](const MarkedConfiguration& w, std::span<double> out) {
    const double p = pair(w, f);
    out[0] = p;
    out[1] = p * p;
  });
  auto e1 = estimate_mean(cols[0]), e2 = estimate_mean(cols[1]);
  return {make_report("moments.first", "first moment of the pairing <omega, f>", MCReport::Kind::one_sample, e1.mean,
                      e1.se, m1 * i1, e1.n, spec.seed, spec.z_max),
          make_report("moments.second", "second-moment formula for <omega, f>", MCReport::Kind::one_sample, e2.mean,
                      e2.se, m2 * i2 + m1 * m1 * i1 * i1, e2.n, spec.seed, spec.z_max)};
}

// ---------------------------------------------------------------- IBP

/// E[(grad_v F) G + F (grad_v G) + F G B_v] = 0.
inline MCReport check_ibp(const Model& m, const CylinderFunction& f, const CylinderFunction& g,
                          const CompactVectorField& v, const RunSpec& spec, const std::string& label = "ibp") {
  auto sampler = m.compound();
  auto cols = detail::sample_functional(sampler, spec, 0, 1, [&](const MarkedConfiguration& w, std::span<double> out) {
    const double fv = f.eval(w), gv = g.eval(w);
    out[0] = directional_derivative(f, v, w) * gv + fv * directional_derivative(g, v, w) +
             fv * gv * log_derivative_B(m.rho, v, w);
  });
  auto e = estimate_mean(cols[0]);
  return make_report(label, "integration by parts: adjoint of grad_v is -grad_v - B_v", MCReport::Kind::paired,
                     e.mean, e.se, 0.0, e.n, spec.seed, spec.z_max);
}

// ---------------------------------------------------------------- symmetry

/// Paired residual E[carre(F, G) - (H F) G] (form = operator duality) and the
/// asymmetry E[(H F) G - F (H G)], for one Dirichlet variant.
inline std::vector<MCReport> check_symmetry(const Model& m, const CylinderFunction& f, const CylinderFunction& g,
                                            DirichletMode mode, const RunSpec& spec,
                                            const std::string& label = "symmetry") {
  auto sampler = m.compound();
  auto cols = detail::sample_functional(sampler, spec, 0, 2, [&](const MarkedConfiguration& w, std::span<double> out) {
    const double hf = dirichlet_apply(f, w, m.rho, mode);
    const double hg = dirichlet_apply(g, w, m.rho, mode);
    const double fv = f.eval(w), gv = g.eval(w);
    out[0] = carre(f, g, w) - hf * gv;
    out[1] = hf * gv - fv * hg;
  });
  auto e0 = estimate_mean(cols[0]), e1 = estimate_mean(cols[1]);
  const std::string suffix = "." + to_string(mode);
  return {make_report(label + suffix, "Dirichlet form equals (HF, G): divergence duality", MCReport::Kind::paired,
                      e0.mean, e0.se, 0.0, e0.n, spec.seed, spec.z_max),
          make_report(label + ".asymmetry" + suffix, "symmetry of H in L2: (HF, G) = (F, HG)", MCReport::Kind::paired,
                      e1.mean, e1.se, 0.0, e1.n, spec.seed, spec.z_max)};
}

// ---------------------------------------------------------------- quasi-invariance

/// E[p_phi] = 1, E[F(phi omega) - F(omega) p_phi(omega)] = 0 and the Laplace
/// transform of the image measure against the transported intensity.
inline std::vector<MCReport> check_quasi_invariance(const Model& m, const Diffeo& phi, const CylinderFunction& f,
                                                    const ScalarField& laplace_f, const RunSpec& spec) {
  auto sampler = m.compound();
  RadonNikodymDensity density(phi, m.rho, m.tau.total_mass());
  const double log_target = detail::sigma_integral(m, [&](std::span<const double> x) {
    const double fx = laplace_f.value(phi.apply(x));
    return m.tau.mark_integral([fx](double s) { return std::expm1(s * fx); }, kTargetQuadrature);
  });
  auto cols = detail::sample_functional(sampler, spec, 0, 3, [&](const MarkedConfiguration& w, std::span<double> out) {
    const double p = density(w);
    const auto moved = pushforward(w, phi.generator, phi.time);
    out[0] = p;
    out[1] = f.eval(moved) - f.eval(w) * p;
    out[2] = std::exp(pair(moved, laplace_f));
  });
  auto e0 = estimate_mean(cols[0]), e1 = estimate_mean(cols[1]), e2 = estimate_mean(cols[2]);
  return {make_report("quasi_invariance.normalization", "Radon-Nikodym density of the image measure has mean one",
                      MCReport::Kind::one_sample, e0.mean, e0.se, 1.0, e0.n, spec.seed, spec.z_max),
          make_report("quasi_invariance.change_of_variables", "E[F(phi omega)] = E[F p_phi]", MCReport::Kind::paired,
                      e1.mean, e1.se, 0.0, e1.n, spec.seed, spec.z_max),
          make_report("quasi_invariance.image_laplace",
                      "image of the compound Poisson measure has intensity phi*sigma", MCReport::Kind::one_sample,
                      e2.mean, e2.se, std::exp(log_target), e2.n, spec.seed, spec.z_max)};
}

// ---------------------------------------------------------------- reduction

/// tau = delta_1: the compound sampler reproduces the simple sampler exactly
/// on shared streams, and in law on independent streams.
inline std::vector<MCReport> check_reduction(const Model& m, const ScalarField& f, const RunSpec& spec,
                                             std::size_t constructive_n = 1000) {
  auto simple = m.simple();
  auto compound = m.compound_with(MarkLaw::point_mass(1.0));
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < constructive_n; ++i) {
    RandomStream a(spec.seed, spec.stream(0, i)), b(spec.seed, spec.stream(0, i));
    auto g = simple.sample(a);
    auto w = compound.sample(b);
    bool same = w.ground() == g;
    for (std::size_t k = 0; same && k < w.size(); ++k) same = w.mark(k) == 1.0;
    mismatches += same ? 0 : 1;
  }
  auto ca = detail::sample_functional(compound, spec, 1, 3, [&](const MarkedConfiguration& w, std::span<double> out) {
    const double p = pair(w, f);
    out[0] = p;
    out[1] = p * p;
    out[2] = std::exp(p);
  });
  auto cb = replicate(spec.n, 3, [&](std::size_t i, std::span<double> out) {
    RandomStream rng(spec.seed, spec.stream(2, i));
    auto g = simple.sample(rng);
    double p = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) p += f.value(g.point(k));
    out[0] = p;
    out[1] = p * p;
    out[2] = std::exp(p);
  });
  const char* names[] = {"reduction.first_moment", "reduction.second_moment", "reduction.laplace"};
  std::vector<MCReport> out{make_exact_report("reduction.constructive",
                                              "tau = delta_1 gives back the Poisson measure (shared streams)",
                                              static_cast<double>(mismatches), 0.5, constructive_n, spec.seed)};
  for (int c = 0; c < 3; ++c) {
    out.push_back(two_sample_report(names[c], "tau = delta_1 gives back the Poisson measure (in law)",
                                    estimate_mean(ca[c]), estimate_mean(cb[c]), spec.seed, spec.z_max));
  }
  return out;
}

// ---------------------------------------------------------------- commutation

/// Samples `count` configurations from the compound measure, skipping empty ones.
inline std::vector<MarkedConfiguration> sample_configurations(const Model& m, std::size_t count, const RunSpec& spec,
                                                              std::uint64_t sub = 0) {
  auto sampler = m.compound();
  std::vector<MarkedConfiguration> out;
  for (std::uint64_t r = 0; out.size() < count; ++r) {
    RandomStream rng(spec.seed, spec.stream(sub, r));
    auto w = sampler.sample(rng);
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

/// Real form of the representation relations on sampled configurations:
///  - [A(v), <omega, f>] F = <omega, grad_v f> F           (absolute, 1e-10)
///  - [A(v1), A(v2)] F = A([v1, v2]) F                     (relative, 1e-6)
///  - d/dt V(phi_t^v) F at 0 = A(v) F by central differences (relative, 1e-6)
inline std::vector<MCReport> check_commutation(const Model& m, const CompactVectorField& v1,
                                               const CompactVectorField& v2, const CylinderFunction& f,
                                               const ScalarField& multiplier, std::size_t configs, const RunSpec& spec,
                                               double tolerance = 1e-6) {
  const auto omegas = sample_configurations(m, configs, spec);
  const Expr e = f.to_expression();
  const Expr pf = Expr::marked_pair(multiplier);
  const Expr a_pfe = lift_A(v1, pf * e, m.rho);
  const Expr a_e = lift_A(v1, e, m.rho);
  const Expr grad_pf = Expr::marked_pair(multiplier.derivative_along(v1));
  const Expr a1a2 = lift_A(v1, lift_A(v2, e, m.rho), m.rho);
  const Expr a2a1 = lift_A(v2, lift_A(v1, e, m.rho), m.rho);
  const Expr a12 = lift_A(lie_bracket(v1, v2), e, m.rho);

  const double h = kFlowFdStep;
  const Diffeo plus{v1, h}, minus{v1, -h};
  const RadonNikodymDensity inv_plus(plus.inverse(), m.rho, m.tau.total_mass());
  const RadonNikodymDensity inv_minus(minus.inverse(), m.rho, m.tau.total_mass());

  double mult = 0.0, nested = 0.0, fd = 0.0;
  for (const auto& w : omegas) {
    const double ev = e.eval(w);
    mult = std::max(mult, std::abs(a_pfe.eval(w) - pf.eval(w) * a_e.eval(w) - grad_pf.eval(w) * ev));
    const double l1 = a1a2.eval(w), l2 = a2a1.eval(w), r = a12.eval(w);
    const double scale = std::abs(l1) + std::abs(l2) + std::abs(r);
    if (scale > 0.0) nested = std::max(nested, std::abs(l1 - l2 - r) / scale);
    const double sym = a_e.eval(w);
    const double num = (rep_apply(plus, f, w, inv_plus) - rep_apply(minus, f, w, inv_minus)) / (2.0 * h);
    fd = std::max(fd, std::abs(num - sym) / std::max(std::abs(sym), 1.0));
  }
  return {make_exact_report("commutation.multiplication", "[A(v), <omega, f>] = <omega, grad_v f>", mult, 1e-10,
                            omegas.size(), spec.seed),
          make_exact_report("commutation.nested", "[A(v1), A(v2)] = A([v1, v2])", nested, tolerance, omegas.size(),
                            spec.seed),
          make_exact_report("commutation.generator", "A(v) generates the unitary group V(phi_t^v)", fd, tolerance,
                            omegas.size(), spec.seed)};
}

// ---------------------------------------------------------------- directional derivative

struct NamedCylinder {
  std::string name;
  CylinderFunction function;
};
struct NamedField {
  std::string name;
  CompactVectorField field;
};

/// Analytic grad_v F against the flow central difference, max over fixtures
/// and sampled configurations of |a - fd| / (1 + |a|).
inline MCReport check_directional(const Model& m, const std::vector<NamedCylinder>& cylinders,
                                  const std::vector<NamedField>& fields, std::size_t configs, const RunSpec& spec,
                                  double step = 1e-5, double tolerance = 1e-6) {
  const auto omegas = sample_configurations(m, configs, spec);
  double worst = 0.0;
  for (const auto& c : cylinders) {
    for (const auto& v : fields) {
      for (const auto& w : omegas) {
        const double a = directional_derivative(c.function, v.field, w, DerivativeMethod::analytic);
        const double n = directional_derivative(c.function, v.field, w, DerivativeMethod::flow_fd, step);
        worst = std::max(worst, std::abs(a - n) / (1.0 + std::abs(a)));
      }
    }
  }
  return make_exact_report("directional", "flow derivative equals <omega, grad_v phi> chain rule", worst, tolerance,
                           omegas.size() * cylinders.size() * fields.size(), spec.seed);
}

// ---------------------------------------------------------------- dynamics

/// Equilibrium start Xi_0 ~ pi, run to T. Reports the two-sample z-test of
/// E[F(Xi_0)] against E[F(Xi_T)] on the same trajectories (conservative:
/// at equilibrium Cov(F(Xi_0), F(Xi_T)) >= 0 for a reversible diffusion),
/// the sharper paired residual F(Xi_T) - F(Xi_0), and reversibility
/// F(Xi_0) G(Xi_T) - G(Xi_0) F(Xi_T).
inline std::vector<MCReport> check_stationarity(const Model& m, const CylinderFunction& f, const CylinderFunction& g,
                                                DynamicsMode mode, double horizon, double dt, const RunSpec& spec) {
  auto sampler = m.compound();
  // Initial state of replica i from stream(0, i), its noise from stream(1, i).
  auto cols = replicate(spec.n, 4, [&](std::size_t i, std::span<double> out) {
    RandomStream rng(spec.seed, spec.stream(0, i));
    const auto w0 = sampler.sample(rng);
    RandomStream dyn(spec.seed, spec.stream(1, i));
    const auto wt = simulate_to(w0, m.rho, m.window, dt, horizon, mode, dyn);
    const double f0 = f.eval(w0), ft = f.eval(wt);
    out[0] = ft;
    out[1] = f0;
    out[2] = ft - f0;
    out[3] = f0 * g.eval(wt) - g.eval(w0) * ft;
    for (double v : out) {
      if (!std::isfinite(v)) throw NonFiniteError(i, spec.seed, spec.stream(0, i));
    }
  });
  const std::string suffix = "." + to_string(mode);
  const char* anchor = "the compound Poisson measure is invariant for the diffusion";
  auto et = estimate_mean(cols[0]), e0 = estimate_mean(cols[1]), ed = estimate_mean(cols[2]),
       er = estimate_mean(cols[3]);
  return {two_sample_report("stationarity" + suffix, anchor, et, e0, spec.seed, spec.z_max),
          make_report("stationarity.paired" + suffix, anchor, MCReport::Kind::paired, ed.mean, ed.se, 0.0, ed.n,
                      spec.seed, spec.z_max),
          make_report("reversibility" + suffix, "the diffusion is reversible at equilibrium", MCReport::Kind::paired,
                      er.mean, er.se, 0.0, er.n, spec.seed, spec.z_max)};
}

/// Generator estimate of the dynamics at a fixed configuration against
/// -H F for the given Dirichlet variant.
inline MCReport check_generator(const Model& m, const CylinderFunction& f, const MarkedConfiguration& omega,
                                DynamicsMode mode, DirichletMode against, const std::vector<double>& dt_list,
                                const RunSpec& spec) {
  auto g = generator_estimate(f, omega, m.rho, m.window, mode, dt_list, spec.n, spec.seed, spec.stream(0, 0));
  const double target = -dirichlet_apply(f, omega, m.rho, against);
  return make_report("generator." + to_string(mode) + ".vs." + to_string(against),
                     "the diffusion is generated by -H", MCReport::Kind::one_sample, g.estimate, g.se, target,
                     spec.n * dt_list.size(), spec.seed, spec.z_max);
}

}  // namespace cpspace
