// SPDX-License-Identifier: Apache-2.0
//
// Tensorized adaptive Simpson quadrature on boxes. Each axis is refined
// independently: the integrand along axis k is itself an adaptive integral
// over the remaining axes.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpspace/format.hpp"
#include "cpspace/window.hpp"

namespace cpspace {

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int initial_panels = 8;
  int max_depth = 40;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double estimate, double error)
      : std::runtime_error("quadrature tolerance not reached; estimate " + format_double(estimate) + " +/- " +
                           format_double(error)),
        estimate_(estimate),
        error_(error) {}
  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

namespace detail {

class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const std::function<double(double)>& g, const QuadratureOptions& opts) : g_(g), opts_(opts) {}

  QuadratureResult run(double a, double b) {
    const int panels = std::max(1, opts_.initial_panels);
    const double h = (b - a) / panels;
    std::vector<double> xs(2 * panels + 1), fs(2 * panels + 1);
    for (int i = 0; i <= 2 * panels; ++i) {
      xs[i] = (i == 2 * panels) ? b : a + 0.5 * h * i;
      fs[i] = eval(xs[i]);
    }
    std::vector<double> whole(panels);
    double scale = 0.0;
    for (int p = 0; p < panels; ++p) {
      whole[p] = (xs[2 * p + 2] - xs[2 * p]) / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
      scale += std::abs(whole[p]);
    }
    span_ = b - a;
    const double eps = std::max(opts_.rel_tol * scale, opts_.abs_tol);
    QuadratureResult r;
    for (int p = 0; p < panels; ++p) {
      const double w = xs[2 * p + 2] - xs[2 * p];
      r.value += refine(xs[2 * p], xs[2 * p + 2], fs[2 * p], fs[2 * p + 1], fs[2 * p + 2], whole[p],
                        eps * w / (b - a), 0);
    }
    r.error = error_;
    r.evaluations = evals_;
    return r;
  }

  bool failed() const { return failed_; }

 private:
  double eval(double t) {
    ++evals_;
    return g_(t);
  }

  double refine(double a, double b, double fa, double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps || (b - a) < 1e-12 * span_) {
      error_ += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth >= opts_.max_depth) {
      failed_ = true;
      error_ += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
  }

  const std::function<double(double)>& g_;
  QuadratureOptions opts_;
  double span_ = 1.0;
  double error_ = 0.0;
  std::size_t evals_ = 0;
  bool failed_ = false;
};

inline QuadratureResult integrate_axis(const std::function<double(std::span<const double>)>& f, const Window& box,
                                       std::size_t axis, std::vector<double>& x, const QuadratureOptions& opts,
                                       bool& failed) {
  std::function<double(double)> g;
  QuadratureOptions inner = opts;
  inner.rel_tol *= 0.1;
  inner.abs_tol *= 0.1;
  std::size_t inner_evals = 0;
  if (axis + 1 == box.dim()) {
    g = [&](double t) {
      x[axis] = t;
      return f(x);
    };
  } else {
    g = [&](double t) {
      x[axis] = t;
      auto r = integrate_axis(f, box, axis + 1, x, inner, failed);
      inner_evals += r.evaluations;
      return r.value;
    };
  }
  AdaptiveSimpson simpson(g, opts);
  auto r = simpson.run(box.lower(axis), box.upper(axis));
  if (simpson.failed()) failed = true;
  if (inner_evals) r.evaluations = inner_evals;
  return r;
}

}  // namespace detail

/// Integrates f over the box. Throws QuadratureError (carrying the achieved
/// estimate) when some panel cannot meet the tolerance within max_depth.
inline QuadratureResult integrate(const std::function<double(std::span<const double>)>& f, const Window& box,
                                  const QuadratureOptions& opts = {}) {
  std::vector<double> x(box.dim());
  bool failed = false;
  auto r = detail::integrate_axis(f, box, 0, x, opts, failed);
  if (failed) throw QuadratureError(r.value, r.error);
  return r;
}

}  // namespace cpspace
