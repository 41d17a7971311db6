// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpspace/format.hpp"

namespace cpspace {

/// Axis-aligned box prod_k [lower_k, upper_k). Membership is half-open so
/// that boxes sharing a face partition space exactly.
class Window {
 public:
  Window() = default;
  Window(std::vector<double> lower, std::vector<double> upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size()) throw std::invalid_argument("Window: bad dimensions");
    for (std::size_t k = 0; k < lower_.size(); ++k) {
      if (!(lower_[k] < upper_[k])) {
        throw std::invalid_argument("Window: lower must be < upper on axis " + std::to_string(k));
      }
    }
  }
  static Window cube(std::size_t d, double lo, double hi) {
    return Window(std::vector<double>(d, lo), std::vector<double>(d, hi));
  }

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double lower(std::size_t k) const { return lower_[k]; }
  double upper(std::size_t k) const { return upper_[k]; }
  double width(std::size_t k) const { return upper_[k] - lower_[k]; }

  double volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < dim(); ++k) v *= width(k);
    return v;
  }

  bool contains(std::span<const double> x) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (!(x[k] >= lower_[k] && x[k] < upper_[k])) return false;
    }
    return true;
  }

  /// Closed-box test, used for support checks.
  bool contains_closed(std::span<const double> x) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (x[k] < lower_[k] || x[k] > upper_[k]) return false;
    }
    return true;
  }

  bool inside(const Window& outer) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (lower_[k] < outer.lower_[k] || upper_[k] > outer.upper_[k]) return false;
    }
    return true;
  }

  bool strictly_inside(const Window& outer) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (!(lower_[k] > outer.lower_[k] && upper_[k] < outer.upper_[k])) return false;
    }
    return true;
  }

  /// Distance from the box to the complement of `outer` (minimum wall gap).
  double clearance(const Window& outer) const {
    double c = 1e300;
    for (std::size_t k = 0; k < dim(); ++k) {
      c = std::min({c, lower_[k] - outer.lower_[k], outer.upper_[k] - upper_[k]});
    }
    return c;
  }

  bool operator==(const Window&) const = default;

  std::string render() const {
    return "(box (" + format_list(lower_) + ") (" + format_list(upper_) + "))";
  }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

inline std::optional<Window> intersect(const Window& a, const Window& b) {
  std::vector<double> lo(a.dim()), hi(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    lo[k] = std::max(a.lower(k), b.lower(k));
    hi[k] = std::min(a.upper(k), b.upper(k));
    if (!(lo[k] < hi[k])) return std::nullopt;
  }
  return Window(lo, hi);
}

inline Window bounding_union(const Window& a, const Window& b) {
  std::vector<double> lo(a.dim()), hi(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    lo[k] = std::min(a.lower(k), b.lower(k));
    hi[k] = std::max(a.upper(k), b.upper(k));
  }
  return Window(lo, hi);
}

/// Where a function may be nonzero: everywhere, nowhere, or inside a box.
class Support {
 public:
  static Support everywhere() { return Support(Kind::everywhere, {}); }
  static Support nowhere() { return Support(Kind::nowhere, {}); }
  static Support box(Window w) { return Support(Kind::box, std::move(w)); }

  bool is_everywhere() const { return kind_ == Kind::everywhere; }
  bool is_nowhere() const { return kind_ == Kind::nowhere; }
  bool is_box() const { return kind_ == Kind::box; }
  const Window& window() const {
    if (!is_box()) throw std::logic_error("Support: not a bounded box");
    return box_;
  }
  /// True when x lies outside the closed support box (so every value vanishes).
  bool excludes(std::span<const double> x) const {
    if (is_nowhere()) return true;
    if (is_everywhere()) return false;
    return !box_.contains_closed(x);
  }

  friend Support operator&(const Support& a, const Support& b) {
    if (a.is_nowhere() || b.is_nowhere()) return nowhere();
    if (a.is_everywhere()) return b;
    if (b.is_everywhere()) return a;
    auto w = intersect(a.box_, b.box_);
    return w ? box(*w) : nowhere();
  }
  friend Support operator|(const Support& a, const Support& b) {
    if (a.is_everywhere() || b.is_everywhere()) return everywhere();
    if (a.is_nowhere()) return b;
    if (b.is_nowhere()) return a;
    return box(bounding_union(a.box_, b.box_));
  }
  bool operator==(const Support&) const = default;

  std::string render() const {
    if (is_everywhere()) return "everywhere";
    if (is_nowhere()) return "nowhere";
    return box_.render();
  }

 private:
  enum class Kind { everywhere, nowhere, box };
  Support(Kind k, Window w) : kind_(k), box_(std::move(w)) {}
  Kind kind_;
  Window box_;
};

}  // namespace cpspace
