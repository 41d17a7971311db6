// SPDX-License-Identifier: Apache-2.0
//
// SmoothMap: a type-erased smooth function R^n -> R that can be evaluated on
// every level of the dual tower it supports. Derived maps (partials,
// directional derivatives, sums, products) consume one level per
// differentiation, so the remaining derivative budget is always known.
#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpspace/dual.hpp"
#include "cpspace/format.hpp"

namespace cpspace {

class DerivativeOrderError : public std::runtime_error {
 public:
  DerivativeOrderError(const std::string& what_name, int required, int available)
      : std::runtime_error("insufficient derivative order for " + what_name + ": requires order " +
                           std::to_string(required) + ", available " + std::to_string(available)),
        required_(required),
        available_(available) {}
  int required() const { return required_; }
  int available() const { return available_; }

 private:
  int required_;
  int available_;
};

class SmoothMap {
 public:
  SmoothMap() = default;

  /// Wraps a generic callable `f(std::span<const T>) -> T`. `order` is the
  /// highest tower level (number of nested duals) the callable may receive.
  template <class F>
  SmoothMap(std::size_t arity, int order, std::string name, F f)
      : impl_(std::make_shared<Model<F>>(std::move(f))),
        arity_(arity),
        order_(std::min(order, kMaxOrder)),
        name_(std::move(name)) {
    if (arity_ > kMaxArity) throw std::length_error("SmoothMap arity exceeds kMaxArity");
  }

  std::size_t arity() const { return arity_; }
  int order() const { return order_; }
  const std::string& name() const { return name_; }
  bool empty() const { return !impl_; }

  template <class T>
  T eval(std::span<const T> x) const {
    constexpr int level = tower_level_v<T>;
    if constexpr (level > kMaxOrder) {
      throw DerivativeOrderError(name_, level, order_);
    } else {
      if (level > order_) throw DerivativeOrderError(name_, level, order_);
      return impl_->eval(x);
    }
  }

  double operator()(std::span<const double> x) const { return eval<double>(x); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual D0 eval(std::span<const D0> x) const = 0;
    virtual D1 eval(std::span<const D1> x) const = 0;
    virtual D2 eval(std::span<const D2> x) const = 0;
    virtual D3 eval(std::span<const D3> x) const = 0;
  };
  template <class F>
  struct Model final : Concept {
    explicit Model(F fn) : f(std::move(fn)) {}
    D0 eval(std::span<const D0> x) const override { return f(x); }
    D1 eval(std::span<const D1> x) const override { return f(x); }
    D2 eval(std::span<const D2> x) const override { return f(x); }
    D3 eval(std::span<const D3> x) const override { return f(x); }
    F f;
  };

  std::shared_ptr<const Concept> impl_;
  std::size_t arity_ = 0;
  int order_ = 0;
  std::string name_;
};

namespace smooth {

inline SmoothMap constant(std::size_t arity, double c) {
  return SmoothMap(arity, kMaxOrder, "(const " + format_double(c) + ")",
                   [c]<class T>(std::span<const T>) -> T { return T(c); });
}

inline SmoothMap coordinate(std::size_t arity, std::size_t k) {
  if (k >= arity) throw std::out_of_range("coordinate index out of range");
  return SmoothMap(arity, kMaxOrder, "(x " + std::to_string(k) + ")",
                   [k]<class T>(std::span<const T> x) -> T { return x[k]; });
}

/// Partial derivative along axis k. Consumes one derivative level.
inline SmoothMap partial(const SmoothMap& f, std::size_t k) {
  if (f.order() < 1) throw DerivativeOrderError(f.name(), 1, f.order());
  if (k >= f.arity()) throw std::out_of_range("partial: axis out of range");
  return SmoothMap(f.arity(), f.order() - 1, "(d" + std::to_string(k) + " " + f.name() + ")",
                   [f, k]<class T>(std::span<const T> x) -> T {
                     using DT = Dual<T>;
                     SmallVec<DT> xs(x.size());
                     for (std::size_t i = 0; i < x.size(); ++i) xs[i] = DT(x[i], T(i == k ? 1.0 : 0.0));
                     return f.template eval<DT>(xs.span()).d;
                   });
}

/// Derivative of f along the (position-dependent) direction u(x).
inline SmoothMap directional(const SmoothMap& f, const std::vector<SmoothMap>& u, const std::string& u_name) {
  if (u.size() != f.arity()) throw std::invalid_argument("directional: direction dimension mismatch");
  if (f.order() < 1) throw DerivativeOrderError(f.name(), 1, f.order());
  int order = f.order() - 1;
  for (const auto& c : u) order = std::min(order, c.order());
  return SmoothMap(f.arity(), order, "(dir " + u_name + " " + f.name() + ")",
                   [f, u]<class T>(std::span<const T> x) -> T {
                     using DT = Dual<T>;
                     SmallVec<DT> xs(x.size());
                     for (std::size_t i = 0; i < x.size(); ++i) xs[i] = DT(x[i], u[i].template eval<T>(x));
                     return f.template eval<DT>(xs.span()).d;
                   });
}

inline SmoothMap linear_combination(const std::vector<double>& coeffs, const std::vector<SmoothMap>& fs) {
  if (coeffs.size() != fs.size() || fs.empty()) throw std::invalid_argument("linear_combination: size mismatch");
  int order = kMaxOrder;
  std::ostringstream name;
  name << "(sum";
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].arity() != fs[0].arity()) throw std::invalid_argument("linear_combination: arity mismatch");
    order = std::min(order, fs[i].order());
    name << " (* " << format_double(coeffs[i]) << " " << fs[i].name() << ")";
  }
  name << ")";
  return SmoothMap(fs[0].arity(), order, name.str(), [coeffs, fs]<class T>(std::span<const T> x) -> T {
    T acc(0.0);
    for (std::size_t i = 0; i < fs.size(); ++i) acc += coeffs[i] * fs[i].template eval<T>(x);
    return acc;
  });
}

inline SmoothMap sum(const SmoothMap& a, const SmoothMap& b) { return linear_combination({1.0, 1.0}, {a, b}); }
inline SmoothMap difference(const SmoothMap& a, const SmoothMap& b) {
  return linear_combination({1.0, -1.0}, {a, b});
}
inline SmoothMap scaled(double c, const SmoothMap& a) { return linear_combination({c}, {a}); }

inline SmoothMap product(const SmoothMap& a, const SmoothMap& b) {
  if (a.arity() != b.arity()) throw std::invalid_argument("product: arity mismatch");
  return SmoothMap(a.arity(), std::min(a.order(), b.order()), "(* " + a.name() + " " + b.name() + ")",
                   [a, b]<class T>(std::span<const T> x) -> T {
                     return a.template eval<T>(x) * b.template eval<T>(x);
                   });
}

}  // namespace smooth

// Numeric derivative extraction at a double point.

inline double derivative_along(const SmoothMap& f, std::span<const double> x, std::span<const double> u) {
  SmallVec<D1> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = D1(x[i], u[i]);
  return f.eval<D1>(xs.span()).d;
}

inline std::vector<double> gradient(const SmoothMap& f, std::span<const double> x) {
  std::vector<double> g(x.size());
  SmallVec<D1> xs(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = D1(x[i], i == k ? 1.0 : 0.0);
    g[k] = f.eval<D1>(xs.span()).d;
  }
  return g;
}

/// Row-major n x n Hessian.
inline std::vector<double> hessian(const SmoothMap& f, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> h(n * n);
  SmallVec<D2> xs(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = D2(D1(x[i], i == b ? 1.0 : 0.0), D1(i == a ? 1.0 : 0.0, 0.0));
      }
      h[a * n + b] = h[b * n + a] = f.eval<D2>(xs.span()).d.d;
    }
  }
  return h;
}

inline double laplacian(const SmoothMap& f, std::span<const double> x) {
  const std::size_t n = x.size();
  SmallVec<D2> xs(n);
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < n; ++i) xs[i] = D2(D1(x[i], i == a ? 1.0 : 0.0), D1(i == a ? 1.0 : 0.0, 0.0));
    acc += f.eval<D2>(xs.span()).d.d;
  }
  return acc;
}

}  // namespace cpspace
