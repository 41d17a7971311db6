// SPDX-License-Identifier: Apache-2.0
//
// Exact samplers for the Poisson measure pi_sigma, the compound Poisson
// measure pi_sigma^tau and the marked Poisson measure mu_{sigma x tau} on a
// box window, plus the finite mark laws tau they are parameterized by.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpspace/configuration.hpp"
#include "cpspace/format.hpp"
#include "cpspace/quadrature.hpp"
#include "cpspace/random.hpp"
#include "cpspace/space.hpp"
#include "cpspace/window.hpp"

namespace cpspace {

class EnvelopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite measure tau on (0, inf), stored as total mass lambda_tau and a
/// normalized law. Only families with all moments finite are offered.
class MarkLaw {
 public:
  enum class Family { point_mass, mixture, gamma, uniform };

  /// mass * delta_s.
  static MarkLaw point_mass(double s, double mass = 1.0) { return mixture({s}, {mass}); }

  /// sum_i masses_i * delta_{atoms_i}.
  static MarkLaw mixture(std::vector<double> atoms, std::vector<double> masses) {
    if (atoms.empty() || atoms.size() != masses.size()) throw std::invalid_argument("mixture: size mismatch");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(atoms[i] > 0.0)) throw std::invalid_argument("mixture: atoms must be positive");
      if (!(masses[i] > 0.0)) throw std::invalid_argument("mixture: masses must be positive");
    }
    MarkLaw m(atoms.size() == 1 ? Family::point_mass : Family::mixture);
    m.atoms_ = std::move(atoms);
    m.masses_ = std::move(masses);
    m.total_ = std::accumulate(m.masses_.begin(), m.masses_.end(), 0.0);
    double c = 0.0;
    for (double w : m.masses_) m.cumulative_.push_back(c += w / m.total_);
    m.cumulative_.back() = 1.0;
    return m;
  }

  /// mass * Gamma(shape, scale) law.
  static MarkLaw gamma(double mass, double shape, double scale) {
    if (!(mass > 0.0) || !(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma: parameters must be positive");
    MarkLaw m(Family::gamma);
    m.total_ = mass;
    m.a_ = shape;
    m.b_ = scale;
    return m;
  }

  /// mass * Uniform(a, b) law, 0 <= a < b.
  static MarkLaw uniform(double mass, double a, double b) {
    if (!(mass > 0.0) || !(a >= 0.0) || !(a < b)) throw std::invalid_argument("uniform: need mass > 0, 0 <= a < b");
    MarkLaw m(Family::uniform);
    m.total_ = mass;
    m.a_ = a;
    m.b_ = b;
    return m;
  }

  Family family() const { return family_; }
  bool discrete() const { return family_ == Family::point_mass || family_ == Family::mixture; }
  double total_mass() const { return total_; }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& masses() const { return masses_; }
  double shape() const { return a_; }
  double scale() const { return b_; }
  double lower() const { return a_; }
  double upper() const { return b_; }

  /// Draw from tau / lambda_tau. A point mass consumes no randomness.
  double sample_normalized(RandomStream& rng) const {
    switch (family_) {
      case Family::point_mass:
        return atoms_[0];
      case Family::mixture: {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
      }
      case Family::gamma: {
        double s = 0.0;
        while (!(s > 0.0)) s = b_ * gamma_variate(rng, a_);  // underflow to 0 is possible for tiny shapes
        return s;
      }
      case Family::uniform: {
        double s = rng.uniform(a_, b_);
        while (!(s > 0.0)) s = rng.uniform(a_, b_);
        return s;
      }
    }
    return 0.0;
  }

  /// m_k(tau) = integral of s^k d tau(s); moment(0) = lambda_tau.
  double moment(int k) const {
    if (k < 0) throw std::invalid_argument("moment: k must be >= 0");
    switch (family_) {
      case Family::point_mass:
      case Family::mixture: {
        double acc = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) acc += masses_[i] * std::pow(atoms_[i], k);
        return acc;
      }
      case Family::gamma: {
        double prod = 1.0;
        for (int j = 0; j < k; ++j) prod *= b_ * (a_ + j);
        return total_ * prod;
      }
      case Family::uniform:
        return total_ * (std::pow(b_, k + 1) - std::pow(a_, k + 1)) / ((k + 1) * (b_ - a_));
    }
    return 0.0;
  }

  /// integral of h(s) d tau(s): an exact finite sum for discrete laws,
  /// adaptive quadrature otherwise. Gamma tails are cut where the density
  /// falls below e^-60 of its mode scale; h must grow at most exponentially
  /// with rate well below 1/scale.
  double mark_integral(const std::function<double(double)>& h, const QuadratureOptions& opts = {}) const {
    if (discrete()) {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) acc += masses_[i] * h(atoms_[i]);
      return acc;
    }
    if (family_ == Family::uniform) {
      auto r = integrate([&](std::span<const double> s) { return h(s[0]); }, Window({a_}, {b_}), opts);
      return total_ * r.value / (b_ - a_);
    }
    // Gamma: s = scale * t with t ~ Gamma(shape, 1). Substituting t = u^(1/shape)
    // removes the t^(shape-1) singularity at the origin for shape < 1.
    const double t_max = a_ + 60.0 + 12.0 * std::sqrt(a_ + 1.0);
    const double log_norm = std::lgamma(a_);
    std::function<double(std::span<const double>)> integrand;
    Window range;
    if (a_ < 1.0) {
      range = Window({0.0}, {std::pow(t_max, a_)});
      integrand = [&](std::span<const double> u) {
        const double t = std::pow(u[0], 1.0 / a_);
        return std::exp(-t - log_norm) / a_ * h(b_ * t);
      };
    } else {
      range = Window({0.0}, {t_max});
      integrand = [&](std::span<const double> u) {
        const double t = u[0];
        if (t == 0.0) return a_ == 1.0 ? h(0.0) : 0.0;
        return std::exp((a_ - 1.0) * std::log(t) - t - log_norm) * h(b_ * t);
      };
    }
    return total_ * integrate(integrand, range, opts).value;
  }

  std::string render() const {
    switch (family_) {
      case Family::point_mass:
        return "(point_mass " + format_double(atoms_[0]) + " " + format_double(masses_[0]) + ")";
      case Family::mixture:
        return "(mixture (" + format_list(atoms_) + ") (" + format_list(masses_) + "))";
      case Family::gamma:
        return "(gamma " + format_double(total_) + " " + format_double(a_) + " " + format_double(b_) + ")";
      case Family::uniform:
        return "(uniform " + format_double(total_) + " " + format_double(a_) + " " + format_double(b_) + ")";
    }
    return "";
  }

 private:
  explicit MarkLaw(Family f) : family_(f) {}

  Family family_;
  double total_ = 0.0;
  std::vector<double> atoms_, masses_, cumulative_;
  double a_ = 0.0, b_ = 0.0;
};

/// Probability law on the mark space M = R^q for marked configurations:
/// uniform on a box, or a finite weighted set of mark vectors.
class MarkSpaceLaw {
 public:
  static MarkSpaceLaw uniform_box(Window box) {
    MarkSpaceLaw m;
    m.box_ = std::move(box);
    m.q_ = m.box_->dim();
    return m;
  }
  static MarkSpaceLaw discrete(std::vector<std::vector<double>> atoms, std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size()) throw std::invalid_argument("discrete marks: size mismatch");
    MarkSpaceLaw m;
    m.q_ = atoms[0].size();
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].size() != m.q_ || m.q_ == 0) throw std::invalid_argument("discrete marks: inconsistent dimension");
      if (!(weights[i] > 0.0)) throw std::invalid_argument("discrete marks: weights must be positive");
      total += weights[i];
    }
    double c = 0.0;
    for (auto& w : weights) {
      w /= total;
      m.cumulative_.push_back(c += w);
    }
    m.cumulative_.back() = 1.0;
    m.atoms_ = std::move(atoms);
    m.weights_ = std::move(weights);
    return m;
  }

  std::size_t dim() const { return q_; }
  bool is_uniform() const { return box_.has_value(); }
  const Window& box() const { return *box_; }
  const std::vector<std::vector<double>>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  std::vector<double> sample(RandomStream& rng) const {
    if (box_) {
      std::vector<double> m(q_);
      for (std::size_t k = 0; k < q_; ++k) m[k] = rng.uniform(box_->lower(k), box_->upper(k));
      return m;
    }
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), rng.uniform());
    return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  std::string render() const {
    if (box_) return "(uniform_box " + box_->render() + ")";
    std::string s = "(discrete";
    for (std::size_t i = 0; i < atoms_.size(); ++i) s += " ((" + format_list(atoms_[i]) + ") " + format_double(weights_[i]) + ")";
    return s + ")";
  }

 private:
  std::optional<Window> box_;
  std::size_t q_ = 0;
  std::vector<std::vector<double>> atoms_;
  std::vector<double> weights_, cumulative_;
};

/// Number of quasi-random probes used to validate a rejection envelope.
inline constexpr std::size_t kEnvelopeProbes = 10000;

/// Poisson process with intensity scale * rho on a window, sampled by a
/// Poisson count followed by rejection from the uniform law. sigma(window)
/// is computed once at construction.
class PoissonSampler {
 public:
  PoissonSampler(IntensityDensity rho, Window window, double scale = 1.0, std::optional<double> envelope = std::nullopt)
      : rho_(std::move(rho)), window_(std::move(window)), scale_(scale) {
    if (rho_.dim() != window_.dim()) throw std::invalid_argument("PoissonSampler: dimension mismatch");
    if (!(scale_ > 0.0)) throw std::invalid_argument("PoissonSampler: intensity scale must be positive");
    envelope_ = envelope.value_or(rho_.supremum(window_));
    if (!(envelope_ > 0.0) || !std::isfinite(envelope_)) throw EnvelopeError("rejection envelope must be finite and positive");
    for (std::size_t i = 1; i <= kEnvelopeProbes; ++i) {
      auto u = halton(i, window_.dim());
      for (std::size_t k = 0; k < u.size(); ++k) u[k] = window_.lower(k) + u[k] * window_.width(k);
      if (rho_.value(u) > envelope_) {
        throw EnvelopeError("rejection envelope " + format_double(envelope_) + " exceeded: rho = " +
                            format_double(rho_.value(u)) + " at probe (" + format_list(u) + ")");
      }
    }
    sigma_ = sigma_mass(rho_, window_, QuadratureOptions{1e-12, 1e-15, 8, 50});
  }

  const IntensityDensity& rho() const { return rho_; }
  const Window& window() const { return window_; }
  double scale() const { return scale_; }
  double envelope() const { return envelope_; }
  double sigma() const { return sigma_; }
  double mean_count() const { return scale_ * sigma_; }

  /// Writes the points (unsorted, in draw order) into `flat`.
  void sample_points(RandomStream& rng, std::vector<double>& flat) const {
    const std::size_t d = window_.dim();
    const std::uint64_t n = poisson(rng, mean_count());
    flat.clear();
    flat.reserve(n * d);
    std::vector<double> x(d);
    for (std::uint64_t i = 0; i < n; ++i) {
      for (;;) {
        for (std::size_t k = 0; k < d; ++k) x[k] = rng.uniform(window_.lower(k), window_.upper(k));
        const double r = rho_.value(x);
        if (r > envelope_) throw EnvelopeError("rejection envelope exceeded at (" + format_list(x) + ")");
        if (rng.uniform() * envelope_ < r) break;
      }
      flat.insert(flat.end(), x.begin(), x.end());
    }
  }

  SimpleConfiguration sample(RandomStream& rng) const {
    std::vector<double> flat;
    sample_points(rng, flat);
    return SimpleConfiguration(window_.dim(), std::move(flat));
  }

 private:
  IntensityDensity rho_;
  Window window_;
  double scale_;
  double envelope_ = 0.0;
  double sigma_ = 0.0;
};

/// Compound Poisson measure pi_sigma^tau: ground process pi_{lambda_tau sigma}
/// with i.i.d. marks from tau / lambda_tau, assembled through sigma_map.
/// Positions are drawn before marks, so with tau = delta_1 the positions are
/// bit-identical to PoissonSampler(rho, window, 1) on the same stream.
class CompoundPoissonSampler {
 public:
  CompoundPoissonSampler(IntensityDensity rho, MarkLaw tau, Window window, std::optional<double> envelope = std::nullopt)
      : ground_(std::move(rho), std::move(window), tau.total_mass(), envelope), tau_(std::move(tau)) {}

  const PoissonSampler& ground() const { return ground_; }
  const MarkLaw& tau() const { return tau_; }
  double sigma() const { return ground_.sigma(); }

  MarkedConfiguration sample(RandomStream& rng) const {
    std::vector<double> pts;
    ground_.sample_points(rng, pts);
    const std::size_t d = ground_.window().dim();
    const std::size_t n = pts.size() / d;
    std::vector<double> hat;
    hat.reserve(n * (d + 1));
    for (std::size_t i = 0; i < n; ++i) {
      hat.insert(hat.end(), pts.begin() + i * d, pts.begin() + (i + 1) * d);
      hat.push_back(tau_.sample_normalized(rng));
    }
    return sigma_map(SimpleConfiguration(d + 1, std::move(hat)));
  }

 private:
  PoissonSampler ground_;
  MarkLaw tau_;
};

/// Marked Poisson measure with probability mark law on R^q.
class MarkedPoissonSampler {
 public:
  MarkedPoissonSampler(IntensityDensity rho, MarkSpaceLaw marks, Window window,
                       std::optional<double> envelope = std::nullopt)
      : ground_(std::move(rho), std::move(window), 1.0, envelope), marks_(std::move(marks)) {}

  const PoissonSampler& ground() const { return ground_; }
  const MarkSpaceLaw& marks() const { return marks_; }
  double sigma() const { return ground_.sigma(); }

  MarkedConfiguration sample(RandomStream& rng) const {
    std::vector<double> pts;
    ground_.sample_points(rng, pts);
    const std::size_t d = ground_.window().dim();
    const std::size_t n = pts.size() / d;
    std::vector<double> flat;
    flat.reserve(n * (d + marks_.dim()));
    for (std::size_t i = 0; i < n; ++i) {
      flat.insert(flat.end(), pts.begin() + i * d, pts.begin() + (i + 1) * d);
      auto m = marks_.sample(rng);
      flat.insert(flat.end(), m.begin(), m.end());
    }
    return MarkedConfiguration::marked(d, marks_.dim(), std::move(flat));
  }

 private:
  PoissonSampler ground_;
  MarkSpaceLaw marks_;
};

// One-shot conveniences; they rebuild sigma(window) on every call, so loops
// should hold a sampler object instead.

inline SimpleConfiguration sample_simple(const IntensityDensity& rho, double intensity_scale, const Window& window,
                                         RandomStream& rng, std::optional<double> envelope = std::nullopt) {
  return PoissonSampler(rho, window, intensity_scale, envelope).sample(rng);
}

inline MarkedConfiguration sample_compound(const IntensityDensity& rho, const MarkLaw& tau, const Window& window,
                                           RandomStream& rng) {
  return CompoundPoissonSampler(rho, tau, window).sample(rng);
}

inline MarkedConfiguration sample_marked(const IntensityDensity& rho, const MarkSpaceLaw& marks, const Window& window,
                                         RandomStream& rng) {
  return MarkedPoissonSampler(rho, marks, window).sample(rng);
}

}  // namespace cpspace
