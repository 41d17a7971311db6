// SPDX-License-Identifier: Apache-2.0
//
// Finite configurations: simple point sets and marked/compound point sets,
// their pairings with test functions, the isomorphism between configurations
// on X x R_+ and compound configurations, pushforward under flows,
// restriction and counting.
#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpspace/format.hpp"
#include "cpspace/space.hpp"
#include "cpspace/window.hpp"

namespace cpspace {

class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class MarkKind { compound, marked };
enum class Weighting { marked, unmarked };

namespace detail {

// Sorts fixed-stride records lexicographically and reports whether two
// records share the same leading `key` coordinates.
inline bool sort_records(std::vector<double>& flat, std::size_t stride, std::size_t key) {
  const std::size_t n = stride == 0 ? 0 : flat.size() / stride;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(flat.begin() + a * stride, flat.begin() + (a + 1) * stride,
                                        flat.begin() + b * stride, flat.begin() + (b + 1) * stride);
  };
  std::sort(idx.begin(), idx.end(), less);
  std::vector<double> out;
  out.reserve(flat.size());
  for (auto i : idx) out.insert(out.end(), flat.begin() + i * stride, flat.begin() + (i + 1) * stride);
  flat.swap(out);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::equal(flat.begin() + (i - 1) * stride, flat.begin() + (i - 1) * stride + key, flat.begin() + i * stride)) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Finite simple configuration: pairwise distinct points, stored sorted.
class SimpleConfiguration {
 public:
  explicit SimpleConfiguration(std::size_t dim, std::vector<double> flat = {}) : dim_(dim), flat_(std::move(flat)) {
    if (dim_ == 0 || flat_.size() % dim_ != 0) throw ConfigurationError("SimpleConfiguration: bad flat size");
    if (detail::sort_records(flat_, dim_, dim_)) throw ConfigurationError("SimpleConfiguration: duplicate point");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return flat_.size() / dim_; }
  bool empty() const { return flat_.empty(); }
  std::span<const double> point(std::size_t i) const { return {flat_.data() + i * dim_, dim_}; }
  const std::vector<double>& flat() const { return flat_; }
  bool operator==(const SimpleConfiguration&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> flat_;
};

/// Finite configuration of (point, mark) atoms. Compound mode carries one
/// strictly positive real mark per atom; marked mode carries a q-vector.
/// Atoms are kept sorted lexicographically and equality is bitwise.
class MarkedConfiguration {
 public:
  MarkedConfiguration() = default;

  static MarkedConfiguration compound(std::size_t dim, std::vector<double> flat = {}) {
    return MarkedConfiguration(MarkKind::compound, dim, 1, std::move(flat));
  }
  static MarkedConfiguration marked(std::size_t dim, std::size_t mark_dim, std::vector<double> flat = {}) {
    return MarkedConfiguration(MarkKind::marked, dim, mark_dim, std::move(flat));
  }

  MarkKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t mark_dim() const { return mark_dim_; }
  std::size_t stride() const { return dim_ + mark_dim_; }
  std::size_t size() const { return stride() == 0 ? 0 : flat_.size() / stride(); }
  bool empty() const { return flat_.empty(); }

  std::span<const double> point(std::size_t i) const { return {flat_.data() + i * stride(), dim_}; }
  std::span<const double> marks(std::size_t i) const { return {flat_.data() + i * stride() + dim_, mark_dim_}; }
  std::span<const double> atom(std::size_t i) const { return {flat_.data() + i * stride(), stride()}; }
  /// Scalar mark s_x; defined for compound mode and one-dimensional marks.
  double mark(std::size_t i) const {
    if (mark_dim_ != 1) throw ConfigurationError("mark(): marks are not scalar");
    return flat_[i * stride() + dim_];
  }
  const std::vector<double>& flat() const { return flat_; }

  SimpleConfiguration ground() const {
    std::vector<double> pts;
    pts.reserve(size() * dim_);
    for (std::size_t i = 0; i < size(); ++i) pts.insert(pts.end(), point(i).begin(), point(i).end());
    return SimpleConfiguration(dim_, std::move(pts));
  }

  bool inside(const Window& w) const {
    for (std::size_t i = 0; i < size(); ++i) {
      if (!w.contains(point(i))) return false;
    }
    return true;
  }

  bool operator==(const MarkedConfiguration&) const = default;

 private:
  MarkedConfiguration(MarkKind kind, std::size_t dim, std::size_t mark_dim, std::vector<double> flat)
      : kind_(kind), dim_(dim), mark_dim_(mark_dim), flat_(std::move(flat)) {
    if (dim_ == 0 || mark_dim_ == 0) throw ConfigurationError("MarkedConfiguration: dimensions must be positive");
    if (flat_.size() % stride() != 0) throw ConfigurationError("MarkedConfiguration: bad flat size");
    if (kind_ == MarkKind::compound) {
      for (std::size_t i = 0; i < size(); ++i) {
        const double s = flat_[i * stride() + dim_];
        if (!(s > 0.0)) throw ConfigurationError("compound marks must be strictly positive");
      }
    }
    if (detail::sort_records(flat_, stride(), dim_)) throw ConfigurationError("MarkedConfiguration: duplicate point");
  }

  MarkKind kind_ = MarkKind::compound;
  std::size_t dim_ = 1;
  std::size_t mark_dim_ = 1;
  std::vector<double> flat_;
};

/// <omega, f>: sum s_x f(x) (marked weighting) or sum f(x) (unmarked).
inline double pair(const MarkedConfiguration& omega, const ScalarField& f, Weighting w = Weighting::marked) {
  double acc = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double fx = f.value(omega.point(i));
    acc += (w == Weighting::marked) ? omega.mark(i) * fx : fx;
  }
  return acc;
}

/// sum over atoms of g(x, m) for g defined on X x M.
inline double pair_joint(const MarkedConfiguration& omega, const SmoothMap& g) {
  if (g.arity() != omega.stride()) throw ConfigurationError("pair_joint: arity must equal dim + mark_dim");
  double acc = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) acc += g(omega.atom(i));
  return acc;
}

/// Configuration on X x R_+ (last coordinate = mark) -> compound configuration.
inline MarkedConfiguration sigma_map(const SimpleConfiguration& gamma_hat) {
  if (gamma_hat.dim() < 2) throw ConfigurationError("sigma_map: need X x R_+ with dim(X) >= 1");
  // The compound constructor rejects coinciding X-parts and non-positive marks.
  return MarkedConfiguration::compound(gamma_hat.dim() - 1, gamma_hat.flat());
}

inline SimpleConfiguration sigma_map_inverse(const MarkedConfiguration& omega) {
  if (omega.kind() != MarkKind::compound) throw ConfigurationError("sigma_map_inverse: compound configuration required");
  return SimpleConfiguration(omega.stride(), omega.flat());
}

/// phi_t^v * omega: moves every point along the flow; marks ride along.
inline MarkedConfiguration pushforward(const MarkedConfiguration& omega, const CompactVectorField& v, double t) {
  if (t == 0.0) return omega;
  std::vector<double> flat = omega.flat();
  const std::size_t stride = omega.stride();
  for (std::size_t i = 0; i < omega.size(); ++i) {
    auto r = flow(v, t, omega.point(i));
    std::copy(r.endpoint.begin(), r.endpoint.end(), flat.begin() + i * stride);
  }
  return omega.kind() == MarkKind::compound ? MarkedConfiguration::compound(omega.dim(), std::move(flat))
                                            : MarkedConfiguration::marked(omega.dim(), omega.mark_dim(), std::move(flat));
}

inline MarkedConfiguration restrict_to(const MarkedConfiguration& omega, const Window& window) {
  std::vector<double> flat;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (window.contains(omega.point(i))) flat.insert(flat.end(), omega.atom(i).begin(), omega.atom(i).end());
  }
  return omega.kind() == MarkKind::compound ? MarkedConfiguration::compound(omega.dim(), std::move(flat))
                                            : MarkedConfiguration::marked(omega.dim(), omega.mark_dim(), std::move(flat));
}

inline std::size_t count(const MarkedConfiguration& omega, const Window& window) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) n += window.contains(omega.point(i)) ? 1 : 0;
  return n;
}

inline std::size_t count(const SimpleConfiguration& gamma, const Window& window) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < gamma.size(); ++i) n += window.contains(gamma.point(i)) ? 1 : 0;
  return n;
}

// Serialization: {"atoms":[[x_1..x_d, s],...]} with shortest round-trip floats.

inline std::string to_jsonl(const MarkedConfiguration& omega) {
  std::string out = "{\"atoms\":[";
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (i) out += ',';
    out += '[';
    out += format_list(omega.atom(i), ',');
    out += ']';
  }
  out += "]}";
  return out;
}

inline MarkedConfiguration from_jsonl(const std::string& line, std::size_t dim, MarkKind kind = MarkKind::compound,
                                      std::size_t mark_dim = 1) {
  auto j = nlohmann::json::parse(line);
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array()) {
    throw ConfigurationError("configuration line must be an object with an \"atoms\" array");
  }
  std::vector<double> flat;
  for (const auto& atom : j["atoms"]) {
    if (!atom.is_array() || atom.size() != dim + mark_dim) {
      throw ConfigurationError("atom must be an array of " + std::to_string(dim + mark_dim) + " numbers");
    }
    for (const auto& c : atom) flat.push_back(c.get<double>());
  }
  return kind == MarkKind::compound ? MarkedConfiguration::compound(dim, std::move(flat))
                                    : MarkedConfiguration::marked(dim, mark_dim, std::move(flat));
}

inline std::string to_csv(const MarkedConfiguration& omega) {
  std::string out;
  for (std::size_t k = 0; k < omega.dim(); ++k) out += "x_" + std::to_string(k + 1) + ",";
  if (omega.mark_dim() == 1) {
    out += "mark\n";
  } else {
    for (std::size_t k = 0; k < omega.mark_dim(); ++k) {
      out += "mark_" + std::to_string(k + 1) + (k + 1 < omega.mark_dim() ? "," : "\n");
    }
  }
  for (std::size_t i = 0; i < omega.size(); ++i) out += format_list(omega.atom(i), ',') + "\n";
  return out;
}

}  // namespace cpspace
