// SPDX-License-Identifier: Apache-2.0
//
// Forward-mode dual numbers, nestable to obtain exact higher derivatives.
//
// Dual<T> carries a value and a single tangent. Nesting Dual<Dual<double>>
// yields second derivatives, and so on. The library works with the fixed
// tower D0 = double, D1, D2, D3; every smooth object records how many levels
// of the tower it can still accept (its derivative order).
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace cpspace {

template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c), d(0.0) {}  // NOLINT: implicit lift of constants
  constexpr Dual(T value, T tangent) : v(value), d(tangent) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    *this = *this / o;
    return *this;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

  friend Dual operator+(const Dual& a, double b) { return {a.v + b, a.d}; }
  friend Dual operator+(double a, const Dual& b) { return {a + b.v, b.d}; }
  friend Dual operator-(const Dual& a, double b) { return {a.v - b, a.d}; }
  friend Dual operator-(double a, const Dual& b) { return {a - b.v, -b.d}; }
  friend Dual operator*(const Dual& a, double b) { return {a.v * b, a.d * b}; }
  friend Dual operator*(double a, const Dual& b) { return {a * b.v, a * b.d}; }
  friend Dual operator/(const Dual& a, double b) { return {a.v / b, a.d / b}; }
  friend Dual operator/(double a, const Dual& b) { return Dual(a) / b; }
};

using D0 = double;
using D1 = Dual<D0>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

inline constexpr int kMaxOrder = 3;

template <class T>
struct tower_level : std::integral_constant<int, 0> {};
template <class T>
struct tower_level<Dual<T>> : std::integral_constant<int, 1 + tower_level<T>::value> {};
template <class T>
inline constexpr int tower_level_v = tower_level<T>::value;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

// Elementary functions. Overloads for double forward to <cmath> so that
// generic code can call them unqualified inside this namespace.
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }

template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return {t, a.d * (1.0 - t * t)};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.v), -(a.d * sin(a.v))};
}

template <class T>
T ipow(const T& x, int n) {
  T r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

// Fixed-capacity argument buffer used when seeding tangents; avoids heap
// traffic in the hot evaluation paths.
inline constexpr std::size_t kMaxArity = 16;

template <class T>
class SmallVec {
 public:
  explicit SmallVec(std::size_t n) : n_(n) {
    if (n > kMaxArity) throw std::length_error("argument count " + std::to_string(n) + " exceeds kMaxArity");
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  std::size_t size() const { return n_; }
  std::span<const T> span() const { return {data_.data(), n_}; }

 private:
  std::array<T, kMaxArity> data_{};
  std::size_t n_;
};

}  // namespace cpspace
