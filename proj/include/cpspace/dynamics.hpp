// SPDX-License-Identifier: Apache-2.0
//
// Equilibrium diffusion of compound configurations: every atom moves as an
// independent distorted Brownian motion, marks are frozen. Two per-atom
// dynamics are offered:
//   mark_weighted: dX = beta(X)/s dt + sqrt(2/s) dW   (generator -H, omega metric)
//   unit:          dX = beta(X)   dt + sqrt(2)   dW   (generator -H, gamma metric)
// Euler-Maruyama with reflection at the window walls.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpspace/calculus.hpp"
#include "cpspace/configuration.hpp"
#include "cpspace/random.hpp"
#include "cpspace/space.hpp"
#include "cpspace/stats.hpp"

namespace cpspace {

enum class DynamicsMode { mark_weighted, unit };

inline std::string to_string(DynamicsMode m) { return m == DynamicsMode::mark_weighted ? "mark_weighted" : "unit"; }

/// The Dirichlet variant whose negative is the generator of the dynamics.
inline DirichletMode matching_dirichlet(DynamicsMode m) {
  return m == DynamicsMode::mark_weighted ? DirichletMode::omega_metric : DirichletMode::gamma_metric;
}

struct TrajectoryState {
  double time = 0.0;
  MarkedConfiguration configuration;
};

inline constexpr double kMaxTimeStep = 0.01;

namespace detail {

inline double reflect(double x, double lo, double hi) {
  const double w = hi - lo;
  double y = std::fmod(x - lo, 2.0 * w);
  if (y < 0.0) y += 2.0 * w;
  if (y > w) y = 2.0 * w - y;
  return lo + y;
}

// One Euler-Maruyama move of a single atom with a given normal vector xi.
inline void move_atom(const IntensityDensity& rho, const Window& window, double dt, DynamicsMode mode, double s,
                      std::span<double> x, std::span<const double> xi) {
  const auto beta = beta_eval(rho, x);
  const double drift_scale = mode == DynamicsMode::mark_weighted ? 1.0 / s : 1.0;
  const double noise = mode == DynamicsMode::mark_weighted ? std::sqrt(2.0 * dt / s) : std::sqrt(2.0 * dt);
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = reflect(x[k] + beta[k] * drift_scale * dt + noise * xi[k], window.lower(k), window.upper(k));
  }
}

inline MarkedConfiguration rebuild(const MarkedConfiguration& like, std::vector<double> flat) {
  return like.kind() == MarkKind::compound ? MarkedConfiguration::compound(like.dim(), std::move(flat))
                                           : MarkedConfiguration::marked(like.dim(), like.mark_dim(), std::move(flat));
}

}  // namespace detail

/// Advances every atom by one step of size dt (dt <= 0.01). Normals are
/// drawn atom by atom in storage order.
inline TrajectoryState em_step(const TrajectoryState& state, const IntensityDensity& rho, const Window& window,
                               double dt, DynamicsMode mode, RandomStream& rng) {
  if (!(dt > 0.0) || dt > kMaxTimeStep) throw std::invalid_argument("em_step: need 0 < dt <= 0.01");
  const auto& omega = state.configuration;
  std::vector<double> flat = omega.flat();
  const std::size_t d = omega.dim(), stride = omega.stride();
  std::vector<double> xi(d);
  for (std::size_t a = 0; a < omega.size(); ++a) {
    for (auto& z : xi) z = rng.normal();
    std::span<double> x(flat.data() + a * stride, d);
    detail::move_atom(rho, window, dt, mode, omega.mark(a), x, xi);
  }
  return {state.time + dt, detail::rebuild(omega, std::move(flat))};
}

/// Iterates em_step up to T = k dt; keeps every `stride`-th state plus the last.
inline std::vector<TrajectoryState> simulate(const MarkedConfiguration& omega0, const IntensityDensity& rho,
                                             const Window& window, double dt, double horizon, DynamicsMode mode,
                                             RandomStream& rng, std::size_t stride = 1) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate: horizon must be >= 0");
  const double k = std::round(horizon / dt);
  if (std::abs(k * dt - horizon) > 1e-9 * std::max(1.0, horizon)) {
    throw std::invalid_argument("simulate: horizon must be an integer multiple of dt");
  }
  const auto steps = static_cast<std::size_t>(k);
  std::vector<TrajectoryState> out{{0.0, omega0}};
  TrajectoryState cur = out.front();
  for (std::size_t i = 1; i <= steps; ++i) {
    cur = em_step(cur, rho, window, dt, mode, rng);
    cur.time = static_cast<double>(i) * dt;
    if (i % std::max<std::size_t>(stride, 1) == 0 || i == steps) out.push_back(cur);
  }
  return out;
}

/// The end state after T only (no history).
inline MarkedConfiguration simulate_to(const MarkedConfiguration& omega0, const IntensityDensity& rho,
                                       const Window& window, double dt, double horizon, DynamicsMode mode,
                                       RandomStream& rng) {
  const auto steps = static_cast<std::size_t>(std::round(horizon / dt));
  TrajectoryState cur{0.0, omega0};
  for (std::size_t i = 0; i < steps; ++i) cur = em_step(cur, rho, window, dt, mode, rng);
  return cur.configuration;
}

struct GeneratorEstimate {
  double estimate = 0.0;
  double se = 0.0;
  bool inconclusive = false;
  std::vector<double> dt_list;
  std::vector<double> per_dt;     // one-step difference quotients
  std::vector<double> per_dt_se;
};

/// Estimates (L F)(omega) = lim (E[F(Xi_dt)] - F(omega)) / dt from one EM
/// step with antithetic normals, then extrapolates the O(dt) bias away by a
/// least-squares line through (dt, quotient) (Richardson for two steps).
/// Replica r at dt index j uses stream stream_base + j * replicas + r.
inline GeneratorEstimate generator_estimate(const CylinderFunction& f, const MarkedConfiguration& omega,
                                            const IntensityDensity& rho, const Window& window, DynamicsMode mode,
                                            const std::vector<double>& dt_list, std::size_t replicas,
                                            std::uint64_t seed, std::uint64_t stream_base = 0) {
  if (dt_list.size() < 2) throw std::invalid_argument("generator_estimate: need at least two step sizes");
  if (replicas < 2) throw std::invalid_argument("generator_estimate: need at least two replicas");
  GeneratorEstimate g;
  g.dt_list = dt_list;
  const double f0 = f.eval(omega);
  const std::size_t d = omega.dim(), stride = omega.stride();
  for (std::size_t j = 0; j < dt_list.size(); ++j) {
    const double dt = dt_list[j];
    if (!(dt > 0.0) || dt > kMaxTimeStep) throw std::invalid_argument("generator_estimate: need 0 < dt <= 0.01");
    std::vector<double> q(replicas);
    parallel_indexed(replicas, [&](std::size_t r) {
      RandomStream rng(seed, stream_base + j * replicas + r);
      std::vector<double> plus = omega.flat(), minus = omega.flat();
      std::vector<double> xi(d), neg(d);
      for (std::size_t a = 0; a < omega.size(); ++a) {
        for (std::size_t k = 0; k < d; ++k) {
          xi[k] = rng.normal();
          neg[k] = -xi[k];
        }
        detail::move_atom(rho, window, dt, mode, omega.mark(a), std::span<double>(plus.data() + a * stride, d), xi);
        detail::move_atom(rho, window, dt, mode, omega.mark(a), std::span<double>(minus.data() + a * stride, d), neg);
      }
      const double fp = f.eval(detail::rebuild(omega, std::move(plus)));
      const double fm = f.eval(detail::rebuild(omega, std::move(minus)));
      q[r] = (0.5 * (fp + fm) - f0) / dt;
    });
    auto m = estimate_mean(q);
    g.per_dt.push_back(m.mean);
    g.per_dt_se.push_back(m.se);
  }
  // Intercept of the least-squares line a + b dt; a = sum_j c_j q_j.
  const double n = static_cast<double>(dt_list.size());
  double mean_dt = 0.0;
  for (double dt : dt_list) mean_dt += dt / n;
  double sxx = 0.0;
  for (double dt : dt_list) sxx += (dt - mean_dt) * (dt - mean_dt);
  double var = 0.0;
  for (std::size_t j = 0; j < dt_list.size(); ++j) {
    const double c = 1.0 / n - mean_dt * (dt_list[j] - mean_dt) / sxx;
    g.estimate += c * g.per_dt[j];
    var += c * c * g.per_dt_se[j] * g.per_dt_se[j];
  }
  g.se = std::sqrt(var);
  g.inconclusive = g.se > 0.0 && g.se > 0.25 * std::abs(g.estimate);
  return g;
}

}  // namespace cpspace
