// SPDX-License-Identifier: Apache-2.0
//
// Extended cylinder expressions: trees over marked pairings <omega, f>,
// unmarked pairings <gamma_omega, f>, smooth outer compositions, sums,
// products and constants. Directional derivatives along vector fields act
// structurally, so the class is closed under the lifted operators
// grad_v and A(v) = grad_v + B_v / 2 as long as derivative budget remains.
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpspace/configuration.hpp"
#include "cpspace/format.hpp"
#include "cpspace/smooth.hpp"
#include "cpspace/space.hpp"

namespace cpspace {

class Expr {
 public:
  enum class Kind { constant, marked_pair, unmarked_pair, outer, sum, product };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->c = c;
    return Expr(std::move(n));
  }
  static Expr marked_pair(ScalarField f) { return pairing(Kind::marked_pair, std::move(f)); }
  static Expr unmarked_pair(ScalarField f) { return pairing(Kind::unmarked_pair, std::move(f)); }

  /// g(children...), g of arity children.size().
  static Expr outer(SmoothMap g, std::vector<Expr> children) {
    if (g.arity() != children.size() || children.empty()) throw std::invalid_argument("outer: arity mismatch");
    auto n = std::make_shared<Node>();
    n->kind = Kind::outer;
    n->g = std::move(g);
    n->children = std::move(children);
    return Expr(std::move(n));
  }

  static Expr sum(std::vector<Expr> terms) {
    std::vector<Expr> kept;
    double c = 0.0;
    for (auto& t : terms) {
      if (t.kind() == Kind::constant) {
        c += t.constant_value();
      } else if (t.kind() == Kind::sum) {
        for (const auto& c2 : t.node_->children) {
          if (c2.kind() == Kind::constant) {
            c += c2.constant_value();
          } else {
            kept.push_back(c2);
          }
        }
      } else {
        kept.push_back(std::move(t));
      }
    }
    if (c != 0.0) kept.push_back(constant(c));
    if (kept.empty()) return constant(0.0);
    if (kept.size() == 1) return kept.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::sum;
    n->children = std::move(kept);
    return Expr(std::move(n));
  }

  static Expr product(std::vector<Expr> factors) {
    std::vector<Expr> kept;
    double c = 1.0;
    for (auto& f : factors) {
      if (f.kind() == Kind::constant) {
        c *= f.constant_value();
      } else if (f.kind() == Kind::product) {
        for (const auto& c2 : f.node_->children) {
          if (c2.kind() == Kind::constant) {
            c *= c2.constant_value();
          } else {
            kept.push_back(c2);
          }
        }
      } else {
        kept.push_back(std::move(f));
      }
    }
    if (c == 0.0 || kept.empty()) return constant(c);
    if (c != 1.0) kept.insert(kept.begin(), constant(c));
    if (kept.size() == 1) return kept.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::product;
    n->children = std::move(kept);
    return Expr(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  bool is_zero() const { return kind() == Kind::constant && node_->c == 0.0; }
  double constant_value() const { return node_->c; }
  const std::vector<Expr>& children() const { return node_->children; }

  double eval(const MarkedConfiguration& omega) const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::constant:
        return n.c;
      case Kind::marked_pair:
        return pair(omega, n.field, Weighting::marked);
      case Kind::unmarked_pair:
        return pair(omega, n.field, Weighting::unmarked);
      case Kind::outer: {
        SmallVec<double> y(n.children.size());
        for (std::size_t i = 0; i < n.children.size(); ++i) y[i] = n.children[i].eval(omega);
        return n.g(y.span());
      }
      case Kind::sum: {
        double acc = 0.0;
        for (const auto& c : n.children) acc += c.eval(omega);
        return acc;
      }
      case Kind::product: {
        double acc = 1.0;
        for (const auto& c : n.children) acc *= c.eval(omega);
        return acc;
      }
    }
    return 0.0;
  }

  /// grad_v of the expression: pairings differentiate their test function,
  /// outer compositions by the chain rule, products by Leibniz.
  Expr derivative(const CompactVectorField& v) const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::constant:
        return constant(0.0);
      case Kind::marked_pair:
      case Kind::unmarked_pair: {
        if (n.field.support().is_nowhere()) return constant(0.0);
        ScalarField d = n.field.derivative_along(v);
        if (d.support().is_nowhere()) return constant(0.0);
        return pairing(n.kind, std::move(d));
      }
      case Kind::outer: {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          Expr dc = n.children[i].derivative(v);
          if (dc.is_zero()) continue;
          terms.push_back(product({outer(smooth::partial(n.g, i), n.children), std::move(dc)}));
        }
        return sum(std::move(terms));
      }
      case Kind::sum: {
        std::vector<Expr> terms;
        for (const auto& c : n.children) terms.push_back(c.derivative(v));
        return sum(std::move(terms));
      }
      case Kind::product: {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          Expr dc = n.children[i].derivative(v);
          if (dc.is_zero()) continue;
          std::vector<Expr> factors = n.children;
          factors[i] = std::move(dc);
          terms.push_back(product(std::move(factors)));
        }
        return sum(std::move(terms));
      }
    }
    return constant(0.0);
  }

  /// Canonical s-expression.
  std::string render() const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::constant:
        return format_double(n.c);
      case Kind::marked_pair:
        return "(mpair " + n.field.name() + ")";
      case Kind::unmarked_pair:
        return "(upair " + n.field.name() + ")";
      case Kind::outer:
        return "(" + n.g.name() + render_children(n.children) + ")";
      case Kind::sum:
        return "(+" + render_children(n.children) + ")";
      case Kind::product:
        return "(*" + render_children(n.children) + ")";
    }
    return "";
  }

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b) { return sum({a, product({constant(-1.0), b})}); }
  friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
  friend Expr operator*(double c, const Expr& a) { return product({constant(c), a}); }

 private:
  struct Node {
    Kind kind = Kind::constant;
    double c = 0.0;
    ScalarField field;
    SmoothMap g;
    std::vector<Expr> children;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Expr pairing(Kind k, ScalarField f) {
    if (f.support().is_nowhere()) return constant(0.0);
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->field = std::move(f);
    return Expr(std::move(n));
  }

  static std::string render_children(const std::vector<Expr>& cs) {
    std::string s;
    for (const auto& c : cs) s += " " + c.render();
    return s;
  }

  std::shared_ptr<const Node> node_;
};

/// A(v) E = grad_v E + (1/2) <gamma_omega, beta_v> E as an expression.
inline Expr lift_A(const CompactVectorField& v, const Expr& e, const IntensityDensity& rho) {
  return Expr::sum({e.derivative(v), Expr::product({Expr::constant(0.5), Expr::unmarked_pair(beta_v_field(rho, v)), e})});
}

}  // namespace cpspace
