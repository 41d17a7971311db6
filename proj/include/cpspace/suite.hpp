// SPDX-License-Identifier: Apache-2.0
//
// Turns a RunConfig into live objects and runs named checks with disjoint
// random stream ranges: check k owns stream ids [(k+1) << 48, (k+2) << 48),
// sub-experiment p inside it owns [.. + (p << 40), ..). Reports serialize to
// JSON (byte-stable: no timestamps) and CSV.
#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpspace/run_config.hpp"
#include "cpspace/verify.hpp"

namespace cpspace {

struct Suite {
  RunConfig config;
  Model model;
  std::map<std::string, ScalarField> bumps;
  std::map<std::string, CompactVectorField> fields;
  std::map<std::string, CylinderFunction> cylinders;
  std::map<std::string, JointFunction> joints;
};

inline IntensityDensity build_density(const RunConfig& c) {
  const auto& d = c.density;
  if (d.family == "constant") return IntensityDensity::constant(c.dimension, d.value);
  if (d.family == "gaussian") return IntensityDensity::gaussian(d.center, d.amplitude, d.width);
  return IntensityDensity::polynomial(d.center, d.c0, d.c2);
}

inline MarkLaw build_tau(const TauSpec& t) {
  if (t.law == "point_mass") return MarkLaw::point_mass(t.atoms[0], t.masses[0]);
  if (t.law == "mixture") return MarkLaw::mixture(t.atoms, t.masses);
  if (t.law == "gamma") return MarkLaw::gamma(t.mass, t.shape, t.scale);
  return MarkLaw::uniform(t.mass, t.lower, t.upper);
}

inline Suite build_suite(const RunConfig& c) {
  std::optional<MarkSpaceLaw> marks;
  if (c.marks.law == "uniform_box") marks = MarkSpaceLaw::uniform_box(Window(c.marks.lower, c.marks.upper));
  if (c.marks.law == "discrete") marks = MarkSpaceLaw::discrete(c.marks.atoms, c.marks.weights);
  Suite s{c, Model{build_density(c), Window(c.lower, c.upper), build_tau(c.tau), marks, c.envelope}, {}, {}, {}, {}};
  for (const auto& b : c.bumps) {
    s.bumps.emplace(b.name, b.radius.size() == 1 ? ScalarField::bump(b.center, b.radius[0], b.scale)
                                                 : ScalarField::bump(b.center, b.radius, b.scale));
  }
  for (const auto& f : c.fields) {
    const auto& b = s.bumps.at(f.bump);
    s.fields.emplace(f.name, f.kind == "gradient" ? CompactVectorField::gradient_of(b)
                                                  : CompactVectorField::scaled_bump(f.direction, b));
  }
  for (const auto& cy : c.cylinders) {
    SmoothMap g = cy.family == "linear" ? outer::linear(cy.weights, cy.offset)
                  : cy.family == "tanh" ? outer::tanh_of_linear(cy.weights, cy.offset)
                  : cy.family == "exp"  ? outer::exp_of_linear(cy.weights, cy.offset)
                                        : outer::polynomial_of_linear(cy.coeffs, cy.weights, cy.offset);
    std::vector<ScalarField> dirs;
    for (const auto& d : cy.dirs) dirs.push_back(s.bumps.at(d));
    s.cylinders.emplace(cy.name, CylinderFunction(std::move(g), std::move(dirs)));
  }
  for (const auto& j : c.joints) s.joints.emplace(j.name, JointFunction{s.bumps.at(j.bump), j.coeffs});
  return s;
}

inline constexpr std::size_t kDefaultSampleSize = 100000;

inline std::size_t check_index(const std::string& check) {
  const auto& names = check_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == check) return i;
  }
  if (check == "adjudicate") return names.size();
  if (check == "sample") return names.size() + 1;
  if (check == "simulate") return names.size() + 2;
  throw std::invalid_argument("unknown check '" + check + "'");
}

/// First stream id of sub-experiment `part` of a check.
inline std::uint64_t stream_base(const std::string& check, std::uint64_t part = 0) {
  return ((static_cast<std::uint64_t>(check_index(check)) + 1) << 48) + (part << 40);
}

inline std::size_t sample_size(const RunConfig& c, const std::string& check, std::optional<std::size_t> override_n) {
  if (override_n) return *override_n;
  auto it = c.job.n.find(check);
  return it == c.job.n.end() ? kDefaultSampleSize : it->second;
}

namespace detail {

template <class Map>
const auto& fixture(const Map& m, const std::string& name, const std::string& what) {
  if (name.empty()) throw std::invalid_argument("check needs suite key '" + what + "'");
  return m.at(name);
}

inline DynamicsMode parse_mode(const std::string& s) {
  return s == "unit" ? DynamicsMode::unit : DynamicsMode::mark_weighted;
}

}  // namespace detail

/// Runs one named check of the suite.
inline std::vector<MCReport> run_check(const Suite& s, const std::string& check,
                                       std::optional<std::size_t> override_n = std::nullopt) {
  const auto& c = s.config;
  const auto& st = c.suite;
  const auto& m = s.model;
  auto spec = [&](std::uint64_t part = 0) {
    return RunSpec{c.job.seed, stream_base(check, part), sample_size(c, check, override_n), c.job.z_max};
  };
  std::vector<MCReport> out;
  auto append = [&](std::vector<MCReport> rs) { out.insert(out.end(), rs.begin(), rs.end()); };
  using detail::fixture;

  if (check == "laplace") {
    const auto& f = fixture(s.bumps, st.laplace_f, "laplace.f");
    out.push_back(check_laplace_simple(m, f, spec(0)));
    out.push_back(check_laplace_compound(m, f, spec(1)));
    if (m.marks && !st.laplace_joint.empty()) {
      out.push_back(check_laplace_marked(m, s.joints.at(st.laplace_joint), spec(2)));
    }
  } else if (check == "moments") {
    append(check_moments(m, fixture(s.bumps, st.moments_f, "moments.f"), spec()));
  } else if (check == "ibp") {
    if (st.ibp.empty()) throw std::invalid_argument("check needs suite keys 'ibp.*'");
    for (std::size_t k = 0; k < st.ibp.size(); ++k) {
      const auto& i = st.ibp[k];
      out.push_back(check_ibp(m, s.cylinders.at(i.f), s.cylinders.at(i.g), s.fields.at(i.v), spec(k), "ibp." + i.label));
    }
  } else if (check == "symmetry") {
    append(check_symmetry(m, fixture(s.cylinders, st.symmetry_f, "symmetry"), s.cylinders.at(st.symmetry_g),
                          DirichletMode::omega_metric, spec()));
  } else if (check == "quasi_invariance") {
    const Diffeo phi{fixture(s.fields, st.quasi_field, "quasi.field"), st.quasi_t};
    append(check_quasi_invariance(m, phi, fixture(s.cylinders, st.quasi_f, "quasi.F"),
                                  fixture(s.bumps, st.quasi_laplace, "quasi.f"), spec()));
  } else if (check == "reduction") {
    append(check_reduction(m, fixture(s.bumps, st.reduction_f, "reduction.f"), spec()));
  } else if (check == "commutation") {
    append(check_commutation(m, fixture(s.fields, st.commutation_v1, "commutation"), s.fields.at(st.commutation_v2),
                             s.cylinders.at(st.commutation_f), s.bumps.at(st.commutation_multiplier),
                             st.commutation_configs, spec()));
  } else if (check == "directional") {
    std::vector<NamedCylinder> cs;
    std::vector<NamedField> fs;
    for (const auto& [n, f] : s.cylinders) cs.push_back({n, f});
    for (const auto& [n, v] : s.fields) fs.push_back({n, v});
    out.push_back(check_directional(m, cs, fs, st.directional_configs, spec(), st.directional_h));
  } else if (check == "stationarity") {
    const auto& f = fixture(s.cylinders, st.stationarity_f, "stationarity");
    const auto& g = s.cylinders.at(st.stationarity_g);
    for (std::size_t k = 0; k < st.stationarity_modes.size(); ++k) {
      append(check_stationarity(m, f, g, detail::parse_mode(st.stationarity_modes[k]), st.stationarity_T,
                                st.stationarity_dt, spec(k)));
    }
  } else if (check == "generator") {
    const auto& f = fixture(s.cylinders, st.generator_f, "generator");
    if (st.generator_omega.empty()) throw std::invalid_argument("check needs suite key 'generator.omega'");
    const auto omega = MarkedConfiguration::compound(c.dimension, st.generator_omega);
    std::uint64_t part = 0;
    for (auto mode : {DynamicsMode::mark_weighted, DynamicsMode::unit}) {
      out.push_back(check_generator(m, f, omega, mode, matching_dirichlet(mode), st.generator_dt, spec(part++)));
    }
  } else {
    throw std::invalid_argument("unknown check '" + check + "'");
  }
  return out;
}

inline std::vector<MCReport> run_suite(const Suite& s, const std::string& which = "all",
                                       std::optional<std::size_t> override_n = std::nullopt) {
  if (which != "all") return run_check(s, which, override_n);
  std::vector<MCReport> out;
  for (const auto& c : check_names()) {
    auto rs = run_check(s, c, override_n);
    out.insert(out.end(), rs.begin(), rs.end());
  }
  return out;
}

/// Mode discrimination for the Dirichlet operator: each variant's form
/// residual under the configured mark law and under tau = delta_1, plus each
/// dynamics generator against each variant.
struct Adjudication {
  std::vector<MCReport> reports;
  std::vector<std::string> consistent_modes;  // pass under both mark laws
  bool conclusive = false;  // omega_metric consistent, paper_literal rejected at |z| > 5
};

inline Adjudication run_adjudication(const Suite& s, std::optional<std::size_t> override_n = std::nullopt) {
  const auto& c = s.config;
  const auto& st = c.suite;
  const auto& f = detail::fixture(s.cylinders, st.adjudicate_f, "adjudicate");
  const auto& g = s.cylinders.at(st.adjudicate_g);
  Model unit = s.model;
  unit.tau = MarkLaw::point_mass(1.0, s.model.tau.total_mass());
  const std::size_t n = sample_size(c, "adjudicate", override_n);
  Adjudication a;
  std::uint64_t part = 0;
  bool omega_ok = true, literal_rejected = false;
  for (auto mode : {DirichletMode::omega_metric, DirichletMode::gamma_metric, DirichletMode::paper_literal}) {
    bool ok = true;
    for (int regime = 0; regime < 2; ++regime) {
      const RunSpec spec{c.job.seed, stream_base("adjudicate", part++), n, c.job.z_max};
      auto r = check_symmetry(regime == 0 ? s.model : unit, f, g, mode, spec)[0];
      r.name = "adjudicate." + std::string(regime == 0 ? "mixed" : "delta1") + "." + to_string(mode);
      ok = ok && r.pass;
      if (mode == DirichletMode::paper_literal && regime == 0 && std::abs(r.z) > 5.0) literal_rejected = true;
      a.reports.push_back(r);
    }
    if (ok) a.consistent_modes.push_back(to_string(mode));
    if (mode == DirichletMode::omega_metric) omega_ok = ok;
  }
  if (!st.generator_f.empty() && !st.generator_omega.empty()) {
    const auto omega = MarkedConfiguration::compound(c.dimension, st.generator_omega);
    const std::size_t ng = sample_size(c, "generator", override_n);
    for (auto dyn : {DynamicsMode::mark_weighted, DynamicsMode::unit}) {
      for (auto mode : {DirichletMode::omega_metric, DirichletMode::gamma_metric, DirichletMode::paper_literal}) {
        const RunSpec spec{c.job.seed, stream_base("adjudicate", 8 + static_cast<std::uint64_t>(dyn)), ng,
                           c.job.z_max};
        auto r = check_generator(s.model, s.cylinders.at(st.generator_f), omega, dyn, mode, st.generator_dt, spec);
        r.name = "adjudicate." + r.name;
        a.reports.push_back(r);
      }
    }
  }
  a.conclusive = omega_ok && literal_rejected;
  return a;
}

// ---------------------------------------------------------------- output

inline nlohmann::ordered_json report_json(const MCReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["anchor"] = r.anchor;
  j["kind"] = to_string(r.kind);
  j["estimate"] = r.estimate;
  j["stderr"] = r.se;
  j["target"] = r.target;
  if (std::isfinite(r.z)) {
    j["z"] = r.z;
  } else {
    j["z"] = r.z > 0 ? "inf" : "-inf";
  }
  j["pass"] = r.pass;
  j["n_samples"] = r.n_samples;
  j["seed"] = r.seed;
  if (r.kind == MCReport::Kind::exact) j["tolerance"] = r.tolerance;
  return j;
}

/// JSON array of reports; deterministic for deterministic inputs.
inline std::string reports_to_json(const std::vector<MCReport>& rs) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rs) arr.push_back(report_json(r));
  return arr.dump(2) + "\n";
}

inline std::string reports_to_csv(const std::vector<MCReport>& rs) {
  std::string s = "name,kind,estimate,stderr,target,z,pass,n_samples,seed\n";
  for (const auto& r : rs) {
    s += r.name + "," + to_string(r.kind) + "," + format_double(r.estimate) + "," + format_double(r.se) + "," +
         format_double(r.target) + "," + format_double(r.z) + "," + (r.pass ? "true" : "false") + "," +
         std::to_string(r.n_samples) + "," + std::to_string(r.seed) + "\n";
  }
  return s;
}

/// One-line human summary of a report.
inline std::string summary_line(const MCReport& r) {
  char buf[256];
  if (r.kind == MCReport::Kind::exact) {
    std::snprintf(buf, sizeof buf, "%-4s %-44s residual %.3e (tolerance %.1e)", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.estimate, r.tolerance);
  } else {
    std::snprintf(buf, sizeof buf, "%-4s %-44s estimate %.6g target %.6g se %.3g z %+.2f", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.estimate, r.target, r.se, r.z);
  }
  return buf;
}

}  // namespace cpspace
