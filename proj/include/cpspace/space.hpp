// SPDX-License-Identifier: Apache-2.0
//
// The underlying space: a box in R^d with Lebesgue volume, an intensity
// density rho, test functions, compactly supported vector fields and their
// flows, and every point-level differential quantity built from them.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpspace/dual.hpp"
#include "cpspace/format.hpp"
#include "cpspace/quadrature.hpp"
#include "cpspace/smooth.hpp"
#include "cpspace/window.hpp"

namespace cpspace {

using Point = std::vector<double>;

namespace detail {

// Below this value of 1 - u^2 the bump factor exp(1 - 1/(1 - u^2)) is under
// 1e-300; returning an exact zero keeps high-order duals free of inf*0.
inline constexpr double kBumpCutoff = 1.0 / 690.0;

template <class T>
T bump_factor(const T& u) {
  const double uv = value_of(u);
  if (1.0 - uv * uv <= kBumpCutoff) return T(0.0);
  return exp(1.0 - 1.0 / (1.0 - u * u));
}

inline std::string render_point(std::span<const double> x) { return "(" + format_list(x) + ")"; }

}  // namespace detail

class CompactVectorField;

/// Smooth real function on X together with a support box outside of which
/// it vanishes identically (value, gradient, Laplacian).
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(SmoothMap map, Support support) : map_(std::move(map)), support_(std::move(support)) {}

  static ScalarField zero(std::size_t d) {
    return ScalarField(smooth::constant(d, 0.0), Support::nowhere());
  }
  static ScalarField constant(std::size_t d, double c) {
    return ScalarField(smooth::constant(d, c), c == 0.0 ? Support::nowhere() : Support::everywhere());
  }
  static ScalarField coordinate(std::size_t d, std::size_t k) {
    return ScalarField(smooth::coordinate(d, k), Support::everywhere());
  }

  /// Product bump scale * prod_k exp(1 - 1/(1 - u_k^2)), u_k = (x_k - c_k)/r_k,
  /// supported on the box |x_k - c_k| <= r_k.
  static ScalarField bump(const Point& center, const Point& radius, double scale = 1.0) {
    if (center.size() != radius.size() || center.empty()) throw std::invalid_argument("bump: dimension mismatch");
    Point lo(center.size()), hi(center.size());
    for (std::size_t k = 0; k < center.size(); ++k) {
      if (!(radius[k] > 0.0)) throw std::invalid_argument("bump: radius must be positive");
      lo[k] = center[k] - radius[k];
      hi[k] = center[k] + radius[k];
    }
    std::string name = "(bump " + detail::render_point(center) + " " + detail::render_point(radius) + " " +
                       format_double(scale) + ")";
    SmoothMap m(center.size(), kMaxOrder, std::move(name),
                [center, radius, scale]<class T>(std::span<const T> x) -> T {
                  T acc(scale);
                  for (std::size_t k = 0; k < center.size(); ++k) {
                    T f = detail::bump_factor<T>((x[k] - center[k]) / radius[k]);
                    if (value_of(f) == 0.0) return T(0.0);
                    acc = acc * f;
                  }
                  return acc;
                });
    return ScalarField(std::move(m), scale == 0.0 ? Support::nowhere() : Support::box(Window(lo, hi)));
  }
  static ScalarField bump(const Point& center, double radius, double scale = 1.0) {
    return bump(center, Point(center.size(), radius), scale);
  }

  std::size_t dim() const { return map_.arity(); }
  int order() const { return map_.order(); }
  const SmoothMap& map() const { return map_; }
  const Support& support() const { return support_; }
  const std::string& name() const { return map_.name(); }

  double value(std::span<const double> x) const { return support_.excludes(x) ? 0.0 : map_(x); }
  double operator()(std::span<const double> x) const { return value(x); }

  std::vector<double> gradient(std::span<const double> x) const {
    if (support_.excludes(x)) return std::vector<double>(x.size(), 0.0);
    return cpspace::gradient(map_, x);
  }
  std::vector<double> hessian(std::span<const double> x) const {
    if (support_.excludes(x)) return std::vector<double>(x.size() * x.size(), 0.0);
    return cpspace::hessian(map_, x);
  }
  double laplacian(std::span<const double> x) const {
    if (support_.excludes(x)) return 0.0;
    return cpspace::laplacian(map_, x);
  }

  /// x -> <grad f(x), v(x)>. Consumes one derivative order.
  ScalarField derivative_along(const CompactVectorField& v) const;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return ScalarField(smooth::sum(a.map_, b.map_), a.support_ | b.support_);
  }
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return ScalarField(smooth::difference(a.map_, b.map_), a.support_ | b.support_);
  }
  friend ScalarField operator*(double c, const ScalarField& a) {
    return ScalarField(smooth::scaled(c, a.map_), c == 0.0 ? Support::nowhere() : a.support_);
  }
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return ScalarField(smooth::product(a.map_, b.map_), a.support_ & b.support_);
  }

 private:
  SmoothMap map_;
  Support support_ = Support::nowhere();
};

/// Smooth vector field with compact support (the support box is closed and
/// the field and its Jacobian vanish outside it).
class CompactVectorField {
 public:
  CompactVectorField() = default;
  CompactVectorField(std::vector<SmoothMap> components, Window support, std::string name)
      : components_(std::move(components)), support_(std::move(support)), name_(std::move(name)) {
    if (components_.size() != support_.dim()) throw std::invalid_argument("CompactVectorField: dimension mismatch");
    for (const auto& c : components_) {
      if (c.arity() != support_.dim()) throw std::invalid_argument("CompactVectorField: component arity mismatch");
    }
  }

  /// v(x) = bump(x) * direction.
  static CompactVectorField scaled_bump(const Point& direction, const ScalarField& bump) {
    if (!bump.support().is_box()) throw std::invalid_argument("scaled_bump: bump must have bounded support");
    std::vector<SmoothMap> comps;
    for (double a : direction) comps.push_back(smooth::scaled(a, bump.map()));
    return CompactVectorField(std::move(comps), bump.support().window(),
                              "(field " + detail::render_point(direction) + " " + bump.name() + ")");
  }

  /// v = grad chi.
  static CompactVectorField gradient_of(const ScalarField& chi) {
    if (!chi.support().is_box()) throw std::invalid_argument("gradient_of: field must have bounded support");
    std::vector<SmoothMap> comps;
    for (std::size_t k = 0; k < chi.dim(); ++k) comps.push_back(smooth::partial(chi.map(), k));
    return CompactVectorField(std::move(comps), chi.support().window(), "(grad " + chi.name() + ")");
  }

  /// Components given as scalar fields; support is the bounding box of theirs.
  static CompactVectorField from_scalars(const std::vector<ScalarField>& comps) {
    if (comps.empty()) throw std::invalid_argument("from_scalars: empty");
    Support s = Support::nowhere();
    std::vector<SmoothMap> maps;
    std::string name = "(components";
    for (const auto& c : comps) {
      s = s | c.support();
      maps.push_back(c.map());
      name += " " + c.name();
    }
    if (!s.is_box()) throw std::invalid_argument("from_scalars: components must have bounded support");
    return CompactVectorField(std::move(maps), s.window(), name + ")");
  }

  std::size_t dim() const { return components_.size(); }
  int order() const {
    int o = kMaxOrder;
    for (const auto& c : components_) o = std::min(o, c.order());
    return o;
  }
  const std::vector<SmoothMap>& components() const { return components_; }
  const Window& support() const { return support_; }
  const std::string& name() const { return name_; }

  bool vanishes_at(std::span<const double> x) const { return !support_.contains_closed(x); }

  std::vector<double> value(std::span<const double> x) const {
    std::vector<double> out(dim(), 0.0);
    if (vanishes_at(x)) return out;
    for (std::size_t k = 0; k < dim(); ++k) out[k] = components_[k](x);
    return out;
  }

  /// Row-major, J[k*d + l] = d v_k / d x_l.
  std::vector<double> jacobian(std::span<const double> x) const {
    const std::size_t d = dim();
    std::vector<double> j(d * d, 0.0);
    if (vanishes_at(x)) return j;
    for (std::size_t k = 0; k < d; ++k) {
      auto g = cpspace::gradient(components_[k], x);
      for (std::size_t l = 0; l < d; ++l) j[k * d + l] = g[l];
    }
    return j;
  }

  double divergence(std::span<const double> x) const {
    std::vector<double> v(dim());
    return value_and_divergence(x, v);
  }

  /// Writes v(x) into `out` and returns div v(x), sharing one dual pass per axis.
  double value_and_divergence(std::span<const double> x, std::span<double> out) const {
    const std::size_t d = dim();
    if (vanishes_at(x)) {
      for (auto& o : out) o = 0.0;
      return 0.0;
    }
    SmallVec<D1> xs(d);
    double div = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < d; ++i) xs[i] = D1(x[i], i == k ? 1.0 : 0.0);
      D1 r = components_[k].eval<D1>(xs.span());
      out[k] = r.v;
      div += r.d;
    }
    return div;
  }

 private:
  std::vector<SmoothMap> components_;
  Window support_;
  std::string name_;
};

inline ScalarField ScalarField::derivative_along(const CompactVectorField& v) const {
  if (v.dim() != dim()) throw std::invalid_argument("derivative_along: dimension mismatch");
  if (order() < 1) throw DerivativeOrderError(name(), 1, order());
  Support s = support_ & Support::box(v.support());
  return ScalarField(smooth::directional(map_, v.components(), v.name()), s);
}

/// Density rho > 0 of the intensity measure sigma = rho * Lebesgue, drawn
/// from a small parametric family with analytic suprema on boxes.
class IntensityDensity {
 public:
  enum class Family { constant, gaussian, polynomial };

  static IntensityDensity constant(std::size_t d, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("constant density must be positive");
    IntensityDensity r(Family::constant, d, {c}, Point(d, 0.0));
    r.map_ = smooth::constant(d, c);
    return r;
  }

  /// amplitude * exp(-|x - center|^2 / (2 width^2)).
  static IntensityDensity gaussian(const Point& center, double amplitude = 1.0, double width = 1.0) {
    if (!(amplitude > 0.0) || !(width > 0.0)) throw std::invalid_argument("gaussian density: bad parameters");
    IntensityDensity r(Family::gaussian, center.size(), {amplitude, width}, center);
    const double inv = 1.0 / (2.0 * width * width);
    r.map_ = SmoothMap(center.size(), kMaxOrder,
                       "(gaussian " + detail::render_point(center) + " " + format_double(amplitude) + " " +
                           format_double(width) + ")",
                       [center, amplitude, inv]<class T>(std::span<const T> x) -> T {
                         T q(0.0);
                         for (std::size_t k = 0; k < center.size(); ++k) {
                           T u = x[k] - center[k];
                           q += u * u;
                         }
                         return amplitude * exp(-(inv * q));
                       });
    return r;
  }

  /// c0 + c2 * |x - center|^2 with c0 > 0, c2 >= 0.
  static IntensityDensity polynomial(const Point& center, double c0, double c2) {
    if (!(c0 > 0.0) || !(c2 >= 0.0)) throw std::invalid_argument("polynomial density: need c0 > 0, c2 >= 0");
    IntensityDensity r(Family::polynomial, center.size(), {c0, c2}, center);
    r.map_ = SmoothMap(center.size(), kMaxOrder,
                       "(poly " + detail::render_point(center) + " " + format_double(c0) + " " + format_double(c2) +
                           ")",
                       [center, c0, c2]<class T>(std::span<const T> x) -> T {
                         T q(0.0);
                         for (std::size_t k = 0; k < center.size(); ++k) {
                           T u = x[k] - center[k];
                           q += u * u;
                         }
                         return c0 + c2 * q;
                       });
    return r;
  }

  std::size_t dim() const { return dim_; }
  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const Point& center() const { return center_; }
  const SmoothMap& map() const { return map_; }
  const std::string& name() const { return map_.name(); }

  double value(std::span<const double> x) const { return map_(x); }
  double operator()(std::span<const double> x) const { return map_(x); }
  std::vector<double> gradient(std::span<const double> x) const { return cpspace::gradient(map_, x); }
  std::vector<double> hessian(std::span<const double> x) const { return cpspace::hessian(map_, x); }

  /// log rho as a smooth map (same derivative budget as rho).
  SmoothMap log_map() const {
    SmoothMap m = map_;
    return SmoothMap(dim_, m.order(), "(log " + m.name() + ")",
                     [m]<class T>(std::span<const T> x) -> T { return log(m.template eval<T>(x)); });
  }

  /// Exact supremum of rho over the closed box.
  double supremum(const Window& w) const {
    double dist2_near = 0.0, dist2_far = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double c = center_[k];
      const double near = c < w.lower(k) ? w.lower(k) - c : (c > w.upper(k) ? c - w.upper(k) : 0.0);
      const double far = std::max(std::abs(c - w.lower(k)), std::abs(c - w.upper(k)));
      dist2_near += near * near;
      dist2_far += far * far;
    }
    switch (family_) {
      case Family::constant:
        return params_[0];
      case Family::gaussian:
        return params_[0] * std::exp(-dist2_near / (2.0 * params_[1] * params_[1]));
      case Family::polynomial:
        return params_[0] + params_[1] * dist2_far;
    }
    return std::numeric_limits<double>::infinity();
  }

 private:
  IntensityDensity(Family f, std::size_t d, std::vector<double> params, Point center)
      : family_(f), dim_(d), params_(std::move(params)), center_(std::move(center)) {}

  Family family_;
  std::size_t dim_;
  std::vector<double> params_;
  Point center_;
  SmoothMap map_;
};

struct FlowResult {
  Point endpoint;
  double log_jacobian = 0.0;  // log of d(phi_t* m)/dm at the endpoint, i.e. -log det D phi_t(x)
};

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kFlowMaxStep = 0.01;

/// logarithmic gradient beta(x) = grad rho / rho.
inline std::vector<double> beta_eval(const IntensityDensity& rho, std::span<const double> x) {
  auto g = rho.gradient(x);
  const double r = rho.value(x);
  for (auto& gi : g) gi /= r;
  return g;
}

/// <beta(x), v(x)> + div v(x).
inline double beta_v_eval(const IntensityDensity& rho, const CompactVectorField& v, std::span<const double> x) {
  if (v.vanishes_at(x)) return 0.0;
  std::vector<double> vx(v.dim());
  double div = v.value_and_divergence(x, vx);
  auto b = beta_eval(rho, x);
  double acc = div;
  for (std::size_t k = 0; k < vx.size(); ++k) acc += b[k] * vx[k];
  return acc;
}

/// beta_v as a symbolic scalar field supported on supp v; needs one
/// derivative of log rho and of v.
inline ScalarField beta_v_field(const IntensityDensity& rho, const CompactVectorField& v) {
  if (v.order() < 1) throw DerivativeOrderError(v.name(), 1, v.order());
  std::vector<SmoothMap> terms{smooth::directional(rho.log_map(), v.components(), v.name())};
  std::vector<double> coeffs{1.0};
  for (std::size_t k = 0; k < v.dim(); ++k) {
    terms.push_back(smooth::partial(v.components()[k], k));
    coeffs.push_back(1.0);
  }
  SmoothMap m = smooth::linear_combination(coeffs, terms);
  SmoothMap named(m.arity(), m.order(), "(beta " + rho.name() + " " + v.name() + ")",
                  [m]<class T>(std::span<const T> x) -> T { return m.template eval<T>(x); });
  return ScalarField(std::move(named), Support::box(v.support()));
}

/// Integrates dy/dt = v(y), y(0) = x with classical RK4 at fixed substep
/// h = t / ceil(|t| / 0.01), carrying d(log J)/dt = -div v(y).
inline FlowResult flow(const CompactVectorField& v, double t, std::span<const double> x) {
  if (!std::isfinite(t)) throw FlowError("flow: time must be finite");
  FlowResult r{Point(x.begin(), x.end()), 0.0};
  if (t == 0.0 || v.vanishes_at(x)) return r;
  const std::size_t d = v.dim();
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / kFlowMaxStep));
  const double h = t / static_cast<double>(steps);
  Point& y = r.endpoint;
  Point k1(d), k2(d), k3(d), k4(d), tmp(d);
  for (std::size_t s = 0; s < steps; ++s) {
    const double l1 = -v.value_and_divergence(y, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const double l2 = -v.value_and_divergence(tmp, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const double l3 = -v.value_and_divergence(tmp, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
    const double l4 = -v.value_and_divergence(tmp, k4);
    for (std::size_t i = 0; i < d; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    r.log_jacobian += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  }
  for (double yi : y) {
    if (!std::isfinite(yi)) throw FlowError("flow: non-finite state; step size too coarse for field " + v.name());
  }
  if (!std::isfinite(r.log_jacobian)) throw FlowError("flow: non-finite log-Jacobian");
  return r;
}

/// Radon-Nikodym density of phi_t* sigma w.r.t. sigma at x:
/// rho(phi_{-t} x) / rho(x) * |det D phi_{-t}(x)|.
inline double density_ratio(const IntensityDensity& rho, const CompactVectorField& v, double t,
                            std::span<const double> x) {
  if (t == 0.0 || v.vanishes_at(x)) return 1.0;
  FlowResult back = flow(v, -t, x);
  return rho.value(back.endpoint) / rho.value(x) * std::exp(-back.log_jacobian);
}

/// [v1, v2] = (grad v2) v1 - (grad v1) v2.
inline CompactVectorField lie_bracket(const CompactVectorField& v1, const CompactVectorField& v2) {
  if (v1.dim() != v2.dim()) throw std::invalid_argument("lie_bracket: dimension mismatch");
  std::vector<SmoothMap> comps;
  for (std::size_t k = 0; k < v1.dim(); ++k) {
    comps.push_back(smooth::difference(smooth::directional(v2.components()[k], v1.components(), v1.name()),
                                       smooth::directional(v1.components()[k], v2.components(), v2.name())));
  }
  return CompactVectorField(std::move(comps), bounding_union(v1.support(), v2.support()),
                            "(bracket " + v1.name() + " " + v2.name() + ")");
}

/// sigma(window) = integral of rho over the window.
inline double sigma_mass(const IntensityDensity& rho, const Window& window, const QuadratureOptions& opts = {}) {
  return integrate([&](std::span<const double> x) { return rho.value(x); }, window, opts).value;
}

}  // namespace cpspace
