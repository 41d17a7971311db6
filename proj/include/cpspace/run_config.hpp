// SPDX-License-Identifier: Apache-2.0
//
// Sectioned key = value run configuration. Fixtures are compositions of the
// built-in families only (bumps, scaled-bump / gradient fields, cylinder
// functions with an affine-argument outer function, joint mark functions).
// parse_config validates everything it can without building objects;
// render_config emits a canonical text that parses back to an equal value.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpspace/format.hpp"

namespace cpspace {

struct ConfigIssue {
  int line = 0;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues) : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<ConfigIssue>& issues) {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += "\n";
      s += (i.line > 0 ? "line " + std::to_string(i.line) + ": " : std::string()) + i.message;
    }
    return s;
  }
  std::vector<ConfigIssue> issues_;
};

struct DensitySpec {
  std::string family = "constant";  // constant | gaussian | polynomial
  std::vector<double> center;
  double value = 1.0;      // constant
  double amplitude = 1.0;  // gaussian
  double width = 1.0;
  double c0 = 1.0;  // polynomial
  double c2 = 0.0;
  bool operator==(const DensitySpec&) const = default;
};

struct TauSpec {
  std::string law = "point_mass";  // point_mass | mixture | gamma | uniform
  std::vector<double> atoms{1.0};
  std::vector<double> masses{1.0};
  double mass = 1.0;
  double shape = 1.0;
  double scale = 1.0;
  double lower = 0.0;
  double upper = 1.0;
  bool operator==(const TauSpec&) const = default;
};

struct MarkSpaceSpec {
  std::string law = "none";  // none | uniform_box | discrete
  std::vector<double> lower, upper;
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  bool operator==(const MarkSpaceSpec&) const = default;
};

struct BumpSpec {
  std::string name;
  std::vector<double> center, radius;
  double scale = 1.0;
  bool operator==(const BumpSpec&) const = default;
};

struct FieldSpec {
  std::string name;
  std::string kind = "scaled";  // scaled | gradient
  std::vector<double> direction;
  std::string bump;
  bool operator==(const FieldSpec&) const = default;
};

struct CylinderSpec {
  std::string name;
  std::string family = "linear";  // linear | tanh | exp | poly
  std::vector<double> coeffs;     // poly only
  std::vector<double> weights;
  double offset = 0.0;
  std::vector<std::string> dirs;
  bool operator==(const CylinderSpec&) const = default;
};

struct JointSpec {
  std::string name;
  std::string bump;
  std::vector<double> coeffs;
  bool operator==(const JointSpec&) const = default;
};

struct IbpSpec {
  std::string label, f, g, v;
  bool operator==(const IbpSpec&) const = default;
};

/// Which fixtures each check uses. Empty strings mean "not configured".
struct SuiteSpec {
  std::string laplace_f, laplace_joint, moments_f;
  std::vector<IbpSpec> ibp;
  std::string symmetry_f, symmetry_g;
  std::string adjudicate_f, adjudicate_g;
  std::string quasi_field, quasi_f, quasi_laplace;
  double quasi_t = 0.3;
  std::string reduction_f;
  std::string commutation_v1, commutation_v2, commutation_f, commutation_multiplier;
  std::size_t commutation_configs = 20;
  std::size_t directional_configs = 20;
  double directional_h = 1e-5;  // flow step of the finite-difference oracle
  std::string stationarity_f, stationarity_g;
  double stationarity_T = 0.25;
  double stationarity_dt = 1e-3;
  std::vector<std::string> stationarity_modes{"mark_weighted"};
  std::string generator_f;
  std::vector<double> generator_omega;
  std::vector<double> generator_dt{2e-3, 1e-3};
  bool operator==(const SuiteSpec&) const = default;
};

struct JobSpec {
  std::string command = "verify";  // sample | verify | simulate | adjudicate
  std::string check = "all";
  std::uint64_t seed = 42;
  double z_max = 3.0;
  std::size_t threads = 0;
  std::map<std::string, std::size_t> n;  // per-check sample sizes
  std::string measure = "compound";      // sample job: simple | compound | marked
  double dt = 1e-3;                      // simulate job
  double T = 0.25;
  std::string mode = "mark_weighted";
  std::size_t stride = 10;
  bool operator==(const JobSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  bool csv = false;
  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  std::size_t dimension = 1;
  std::vector<double> lower{0.0}, upper{1.0};
  DensitySpec density{};
  std::optional<double> envelope;
  TauSpec tau{};
  MarkSpaceSpec marks{};
  std::vector<BumpSpec> bumps;
  std::vector<FieldSpec> fields;
  std::vector<CylinderSpec> cylinders;
  std::vector<JointSpec> joints;
  SuiteSpec suite{};
  JobSpec job{};
  OutputSpec output{};

  /// Source line of every key, for error messages of later stages. Not part
  /// of the value.
  struct Lines {
    std::map<std::string, int> of;
    bool operator==(const Lines&) const { return true; }
  } lines;

  bool operator==(const RunConfig&) const = default;

  int line_of(const std::string& key) const {
    auto it = lines.of.find(key);
    return it == lines.of.end() ? 0 : it->second;
  }
};

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"laplace",     "moments",      "ibp",        "symmetry",
                                                 "quasi_invariance", "reduction", "commutation", "directional",
                                                 "stationarity", "generator"};
  return names;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

class Parser {
 public:
  std::vector<ConfigIssue> issues;

  void error(int line, std::string msg) { issues.push_back({line, std::move(msg)}); }

  bool number(int line, const std::string& key, const std::string& text, double& out) {
    try {
      out = parse_double(text);
      return true;
    } catch (const std::exception&) {
      error(line, key + ": not a number: '" + text + "'");
      return false;
    }
  }
  bool numbers(int line, const std::string& key, const std::vector<std::string>& toks, std::vector<double>& out) {
    out.clear();
    bool ok = true;
    for (const auto& t : toks) {
      double v;
      ok = number(line, key, t, v) && ok;
      out.push_back(v);
    }
    return ok;
  }
  bool count(int line, const std::string& key, const std::string& text, std::size_t& out) {
    double v;
    if (!number(line, key, text, v)) return false;
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
      error(line, key + ": expected a non-negative integer");
      return false;
    }
    out = static_cast<std::size_t>(v);
    return true;
  }
  bool seed(int line, const std::string& key, const std::string& text, std::uint64_t& out) {
    try {
      std::size_t pos = 0;
      out = std::stoull(text, &pos);
      if (pos != text.size() || text.front() == '-') throw std::invalid_argument("");
      return true;
    } catch (const std::exception&) {
      error(line, key + ": expected an unsigned 64-bit integer");
      return false;
    }
  }
  bool flag(int line, const std::string& key, const std::string& text, bool& out) {
    if (text == "true" || text == "1" || text == "yes") {
      out = true;
    } else if (text == "false" || text == "0" || text == "no") {
      out = false;
    } else {
      error(line, key + ": expected true or false");
      return false;
    }
    return true;
  }
  bool one_of(int line, const std::string& key, const std::string& text, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
      if (text == a) return true;
    }
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    error(line, key + ": '" + text + "' is not one of " + list);
    return false;
  }
};

// Keyword-structured fixture value: "kw v v v kw v ..." -> {kw: [v...]}.
inline std::map<std::string, std::vector<std::string>> keyword_groups(const std::vector<std::string>& toks,
                                                                      const std::set<std::string>& keywords,
                                                                      std::string& bad) {
  std::map<std::string, std::vector<std::string>> out;
  std::string cur;
  for (const auto& t : toks) {
    if (keywords.count(t)) {
      if (out.count(t)) bad = "repeated keyword '" + t + "'";
      cur = t;
      out[cur];
    } else if (cur.empty()) {
      bad = "expected a keyword before '" + t + "'";
    } else {
      out[cur].push_back(t);
    }
  }
  return out;
}

}  // namespace detail

/// Parses and validates a run configuration; throws ConfigError listing
/// every problem with its line number.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  detail::Parser p;
  std::set<std::string> seen_sections;
  std::map<std::string, int> seen_keys;
  std::string section;
  bool have_density = false;
  std::map<std::string, std::pair<int, std::string>> density_keys, tau_keys, mark_keys;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto c = s.find_first_of("#;"); c != std::string::npos) s = s.substr(0, c);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        p.error(line, "malformed section header");
        continue;
      }
      section = detail::trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> known{"space", "tau", "marks", "fixtures", "suite", "job", "output"};
      if (!known.count(section)) p.error(line, "unknown section [" + section + "]");
      if (!seen_sections.insert(section).second) p.error(line, "duplicate section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      p.error(line, "expected key = value");
      continue;
    }
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    const auto toks = detail::split_ws(value);
    if (section.empty()) {
      p.error(line, "key '" + key + "' outside of any section");
      continue;
    }
    const std::string full = section + "." + key;
    if (seen_keys.count(full)) {
      p.error(line, "duplicate key '" + key + "' (first on line " + std::to_string(seen_keys[full]) + ")");
      continue;
    }
    seen_keys[full] = line;
    cfg.lines.of[full] = line;
    if (toks.empty()) {
      p.error(line, key + ": missing value");
      continue;
    }
    auto unknown = [&] { p.error(line, "unknown key '" + key + "' in [" + section + "]"); };
    auto single = [&]() -> bool {
      if (toks.size() != 1) {
        p.error(line, key + ": expected a single value");
        return false;
      }
      return true;
    };

    if (section == "space") {
      if (key == "dimension") {
        if (single() && p.count(line, key, toks[0], cfg.dimension) && (cfg.dimension < 1 || cfg.dimension > 8)) {
          p.error(line, "dimension must be in 1..8");
        }
      } else if (key == "lower") {
        p.numbers(line, key, toks, cfg.lower);
      } else if (key == "upper") {
        p.numbers(line, key, toks, cfg.upper);
      } else if (key == "density") {
        if (single() && p.one_of(line, key, toks[0], {"constant", "gaussian", "polynomial"})) cfg.density.family = toks[0];
        have_density = true;
      } else if (key.rfind("density.", 0) == 0) {
        density_keys[key.substr(8)] = {line, value};
      } else if (key == "envelope") {
        double v;
        if (single() && p.number(line, key, toks[0], v)) {
          if (!(v > 0.0)) p.error(line, "envelope must be positive");
          cfg.envelope = v;
        }
      } else {
        unknown();
      }
    } else if (section == "tau") {
      if (key == "law") {
        if (single() && p.one_of(line, key, toks[0], {"point_mass", "mixture", "gamma", "uniform"})) cfg.tau.law = toks[0];
      } else {
        tau_keys[key] = {line, value};
      }
    } else if (section == "marks") {
      if (key == "law") {
        if (single() && p.one_of(line, key, toks[0], {"none", "uniform_box", "discrete"})) cfg.marks.law = toks[0];
      } else {
        mark_keys[key] = {line, value};
      }
    } else if (section == "fixtures") {
      const auto dot = key.find('.');
      const std::string kind = key.substr(0, dot);
      const std::string name = dot == std::string::npos ? std::string() : key.substr(dot + 1);
      if (!detail::is_identifier(name)) {
        p.error(line, "fixture key must look like KIND.NAME with an alphanumeric NAME");
        continue;
      }
      std::string bad;
      if (kind == "bump") {
        auto g = detail::keyword_groups(toks, {"center", "radius", "scale"}, bad);
        BumpSpec b{name, {}, {}, 1.0};
        if (!g.count("center") || !g.count("radius")) bad = "bump needs 'center' and 'radius'";
        p.numbers(line, key, g["center"], b.center);
        p.numbers(line, key, g["radius"], b.radius);
        if (g.count("scale")) {
          if (g["scale"].size() != 1) bad = "scale takes one number";
          else p.number(line, key, g["scale"][0], b.scale);
        }
        for (double r : b.radius) {
          if (!(r > 0.0)) bad = "radius must be positive";
        }
        cfg.bumps.push_back(b);
      } else if (kind == "field") {
        FieldSpec f{name, "scaled", {}, {}};
        if (!toks.empty() && toks[0] == "gradient") {
          f.kind = "gradient";
          if (toks.size() != 2) bad = "expected 'gradient BUMP'";
          else f.bump = toks[1];
        } else {
          auto g = detail::keyword_groups(toks, {"direction", "bump"}, bad);
          if (!g.count("direction") || g["bump"].size() != 1) bad = "expected 'direction v.. bump NAME' or 'gradient NAME'";
          else f.bump = g["bump"][0];
          p.numbers(line, key, g["direction"], f.direction);
        }
        cfg.fields.push_back(f);
      } else if (kind == "cylinder") {
        CylinderSpec c{name, toks.empty() ? "" : toks[0], {}, {}, 0.0, {}};
        if (!p.one_of(line, key, c.family, {"linear", "tanh", "exp", "poly"})) continue;
        auto g = detail::keyword_groups({toks.begin() + 1, toks.end()}, {"coeffs", "weights", "offset", "dirs"}, bad);
        if (!g.count("weights") || !g.count("dirs")) bad = "cylinder needs 'weights' and 'dirs'";
        if ((c.family == "poly") != (g.count("coeffs") > 0)) bad = "'coeffs' is required for poly and only for poly";
        p.numbers(line, key, g["coeffs"], c.coeffs);
        p.numbers(line, key, g["weights"], c.weights);
        if (g.count("offset")) {
          if (g["offset"].size() != 1) bad = "offset takes one number";
          else p.number(line, key, g["offset"][0], c.offset);
        }
        c.dirs = g["dirs"];
        if (c.dirs.size() != c.weights.size()) bad = "weights and dirs must have the same length";
        if (c.dirs.empty()) bad = "cylinder needs at least one direction";
        if (c.family != "poly") c.coeffs.clear();
        cfg.cylinders.push_back(c);
      } else if (kind == "joint") {
        auto g = detail::keyword_groups(toks, {"bump", "coeffs"}, bad);
        JointSpec j{name, {}, {}};
        if (g["bump"].size() != 1 || !g.count("coeffs")) bad = "expected 'bump NAME coeffs a0 a1 ..'";
        else j.bump = g["bump"][0];
        p.numbers(line, key, g["coeffs"], j.coeffs);
        cfg.joints.push_back(j);
      } else {
        p.error(line, "unknown fixture kind '" + kind + "'");
        continue;
      }
      if (!bad.empty()) p.error(line, key + ": " + bad);
    } else if (section == "suite") {
      auto& st = cfg.suite;
      auto names = [&](std::size_t k, std::initializer_list<std::string*> outs) {
        if (toks.size() != k) {
          p.error(line, key + ": expected " + std::to_string(k) + " name(s)");
          return;
        }
        std::size_t i = 0;
        for (auto* o : outs) *o = toks[i++];
      };
      if (key == "laplace.f") {
        names(1, {&st.laplace_f});
      } else if (key == "laplace.joint") {
        names(1, {&st.laplace_joint});
      } else if (key == "moments.f") {
        names(1, {&st.moments_f});
      } else if (key.rfind("ibp.", 0) == 0 && detail::is_identifier(key.substr(4))) {
        IbpSpec s{key.substr(4), {}, {}, {}};
        names(3, {&s.f, &s.g, &s.v});
        st.ibp.push_back(s);
      } else if (key == "symmetry") {
        names(2, {&st.symmetry_f, &st.symmetry_g});
      } else if (key == "adjudicate") {
        names(2, {&st.adjudicate_f, &st.adjudicate_g});
      } else if (key == "quasi.field") {
        names(1, {&st.quasi_field});
      } else if (key == "quasi.F") {
        names(1, {&st.quasi_f});
      } else if (key == "quasi.f") {
        names(1, {&st.quasi_laplace});
      } else if (key == "quasi.t") {
        if (single()) p.number(line, key, toks[0], st.quasi_t);
      } else if (key == "reduction.f") {
        names(1, {&st.reduction_f});
      } else if (key == "commutation") {
        names(4, {&st.commutation_v1, &st.commutation_v2, &st.commutation_f, &st.commutation_multiplier});
      } else if (key == "commutation.configs") {
        if (single() && p.count(line, key, toks[0], st.commutation_configs) && st.commutation_configs < 1) {
          p.error(line, key + ": must be >= 1");
        }
      } else if (key == "directional.configs") {
        if (single() && p.count(line, key, toks[0], st.directional_configs) && st.directional_configs < 1) {
          p.error(line, key + ": must be >= 1");
        }
      } else if (key == "directional.h") {
        if (single() && p.number(line, key, toks[0], st.directional_h) && !(st.directional_h > 0.0)) {
          p.error(line, key + ": must be > 0");
        }
      } else if (key == "stationarity") {
        names(2, {&st.stationarity_f, &st.stationarity_g});
      } else if (key == "stationarity.T") {
        if (single() && p.number(line, key, toks[0], st.stationarity_T) &&
            !(st.stationarity_T >= 0.0 && st.stationarity_T <= 0.5)) {
          p.error(line, "stationarity.T must be in [0, 0.5]");
        }
      } else if (key == "stationarity.dt") {
        if (single() && p.number(line, key, toks[0], st.stationarity_dt) &&
            !(st.stationarity_dt > 0.0 && st.stationarity_dt <= 0.01)) {
          p.error(line, "stationarity.dt must be in (0, 0.01]");
        }
      } else if (key == "stationarity.modes") {
        st.stationarity_modes = toks;
        for (const auto& m : toks) p.one_of(line, key, m, {"mark_weighted", "unit"});
      } else if (key == "generator") {
        names(1, {&st.generator_f});
      } else if (key == "generator.omega") {
        p.numbers(line, key, toks, st.generator_omega);
      } else if (key == "generator.dt") {
        if (p.numbers(line, key, toks, st.generator_dt)) {
          if (st.generator_dt.size() < 2) p.error(line, "generator.dt needs at least two step sizes");
          for (double dt : st.generator_dt) {
            if (!(dt > 0.0 && dt <= 0.01)) p.error(line, "generator.dt values must be in (0, 0.01]");
          }
        }
      } else {
        unknown();
      }
    } else if (section == "job") {
      auto& j = cfg.job;
      if (key == "command") {
        if (single()) {
          std::string cmd = toks[0];
          if (auto d = cmd.find('.'); d != std::string::npos) {
            j.check = cmd.substr(d + 1);
            cmd = cmd.substr(0, d);
          }
          if (p.one_of(line, key, cmd, {"sample", "verify", "simulate", "adjudicate"})) j.command = cmd;
        }
      } else if (key == "check") {
        if (single()) j.check = toks[0];
      } else if (key == "seed") {
        if (single()) p.seed(line, key, toks[0], j.seed);
      } else if (key == "z_max") {
        if (single() && p.number(line, key, toks[0], j.z_max) && !(j.z_max > 0.0)) p.error(line, "z_max must be > 0");
      } else if (key == "threads") {
        if (single()) p.count(line, key, toks[0], j.threads);
      } else if (key.rfind("n.", 0) == 0) {
        const std::string what = key.substr(2);
        const auto& cn = check_names();
        if (what != "sample" && what != "adjudicate" && std::find(cn.begin(), cn.end(), what) == cn.end()) {
          unknown();
        } else if (single()) {
          std::size_t n = 0;
          if (p.count(line, key, toks[0], n)) {
            if (n < 1) p.error(line, key + ": must be >= 1");
            j.n[what] = n;
          }
        }
      } else if (key == "measure") {
        if (single() && p.one_of(line, key, toks[0], {"simple", "compound", "marked"})) j.measure = toks[0];
      } else if (key == "dt") {
        if (single() && p.number(line, key, toks[0], j.dt) && !(j.dt > 0.0 && j.dt <= 0.01)) {
          p.error(line, "dt must be in (0, 0.01]");
        }
      } else if (key == "T") {
        if (single() && p.number(line, key, toks[0], j.T) && !(j.T >= 0.0)) p.error(line, "T must be >= 0");
      } else if (key == "mode") {
        if (single() && p.one_of(line, key, toks[0], {"mark_weighted", "unit"})) j.mode = toks[0];
      } else if (key == "stride") {
        if (single() && p.count(line, key, toks[0], j.stride) && j.stride < 1) p.error(line, "stride must be >= 1");
      } else {
        unknown();
      }
    } else if (section == "output") {
      if (key == "dir") {
        cfg.output.dir = value;
      } else if (key == "csv") {
        if (single()) p.flag(line, key, toks[0], cfg.output.csv);
      } else {
        unknown();
      }
    }
  }

  // ---- family-dependent keys
  const std::size_t d = cfg.dimension;
  auto take = [&](std::map<std::string, std::pair<int, std::string>>& keys, const std::string& k, double& out,
                  const std::string& prefix) {
    auto it = keys.find(k);
    if (it == keys.end()) return false;
    const auto toks = detail::split_ws(it->second.second);
    if (toks.size() != 1) p.error(it->second.first, prefix + k + ": expected a single value");
    else p.number(it->second.first, prefix + k, toks[0], out);
    keys.erase(it);
    return true;
  };
  auto take_list = [&](std::map<std::string, std::pair<int, std::string>>& keys, const std::string& k,
                       std::vector<double>& out, const std::string& prefix) {
    auto it = keys.find(k);
    if (it == keys.end()) return false;
    p.numbers(it->second.first, prefix + k, detail::split_ws(it->second.second), out);
    keys.erase(it);
    return true;
  };
  auto leftovers = [&](const std::map<std::string, std::pair<int, std::string>>& keys, const std::string& what,
                       const std::string& prefix) {
    for (const auto& [k, v] : keys) p.error(v.first, "key '" + prefix + k + "' is not valid for " + what);
  };

  {
    auto& ds = cfg.density;
    const std::string pre = "density.";
    if (!have_density && !density_keys.empty()) p.error(density_keys.begin()->second.first, "density family missing");
    if (ds.family == "constant") {
      take(density_keys, "value", ds.value, pre);
      if (!(ds.value > 0.0)) p.error(cfg.line_of("space.density.value"), "density.value must be positive");
    } else {
      if (!take_list(density_keys, "center", ds.center, pre)) ds.center.assign(d, 0.0);
      if (ds.center.size() != d) p.error(cfg.line_of("space.density.center"), "density.center needs d numbers");
      if (ds.family == "gaussian") {
        take(density_keys, "amplitude", ds.amplitude, pre);
        take(density_keys, "width", ds.width, pre);
        if (!(ds.amplitude > 0.0) || !(ds.width > 0.0)) {
          p.error(cfg.line_of("space.density"), "gaussian amplitude and width must be positive");
        }
      } else {
        take(density_keys, "c0", ds.c0, pre);
        take(density_keys, "c2", ds.c2, pre);
        if (!(ds.c0 > 0.0) || !(ds.c2 >= 0.0)) p.error(cfg.line_of("space.density"), "polynomial needs c0 > 0, c2 >= 0");
      }
    }
    leftovers(density_keys, "density family " + ds.family, pre);
  }
  if (cfg.lower.size() != d || cfg.upper.size() != d) {
    p.error(cfg.line_of("space.lower"), "lower and upper need one number per dimension");
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      if (!(cfg.lower[k] < cfg.upper[k])) p.error(cfg.line_of("space.lower"), "window needs lower < upper");
    }
  }

  {
    auto& t = cfg.tau;
    const int lline = cfg.line_of("tau.law");
    if (t.law == "point_mass") {
      std::vector<double> at{1.0};
      if (take_list(tau_keys, "value", at, "")) {
        if (at.size() != 1) p.error(cfg.line_of("tau.value"), "value takes one number");
      }
      double mass = 1.0;
      take(tau_keys, "mass", mass, "");
      t.atoms = {at.empty() ? 1.0 : at[0]};
      t.masses = {mass};
    } else if (t.law == "mixture") {
      if (!take_list(tau_keys, "atoms", t.atoms, "") || !take_list(tau_keys, "masses", t.masses, "")) {
        p.error(lline, "mixture needs atoms and masses");
      }
      if (t.atoms.size() != t.masses.size()) p.error(cfg.line_of("tau.masses"), "atoms and masses differ in length");
    } else if (t.law == "gamma") {
      take(tau_keys, "mass", t.mass, "");
      take(tau_keys, "shape", t.shape, "");
      take(tau_keys, "scale", t.scale, "");
      if (!(t.shape > 0.0) || !(t.scale > 0.0)) p.error(lline, "gamma needs shape > 0 and scale > 0");
    } else {
      take(tau_keys, "mass", t.mass, "");
      take(tau_keys, "lower", t.lower, "");
      take(tau_keys, "upper", t.upper, "");
      if (!(t.lower > 0.0 && t.lower < t.upper)) p.error(lline, "uniform needs 0 < lower < upper");
    }
    if (t.law == "point_mass" || t.law == "mixture") {
      for (double a : t.atoms) {
        if (!(a > 0.0)) p.error(lline, "mark atoms must be positive");
      }
      for (double m : t.masses) {
        if (!(m > 0.0)) p.error(lline, "mark masses must be positive");
      }
      t.mass = 1.0;
      t.shape = t.scale = 1.0;
      t.lower = 0.0;
      t.upper = 1.0;
    } else {
      t.atoms = {1.0};
      t.masses = {1.0};
      if (!(t.mass > 0.0)) p.error(lline, "mass must be positive");
      if (t.law == "gamma") {
        t.lower = 0.0;
        t.upper = 1.0;
      } else {
        t.shape = t.scale = 1.0;
      }
    }
    leftovers(tau_keys, "law " + t.law, "");
  }

  {
    auto& m = cfg.marks;
    if (m.law == "uniform_box") {
      if (!take_list(mark_keys, "lower", m.lower, "") || !take_list(mark_keys, "upper", m.upper, "") ||
          m.lower.size() != m.upper.size() || m.lower.empty()) {
        p.error(cfg.line_of("marks.law"), "uniform_box needs lower and upper of equal length");
      }
      for (std::size_t k = 0; k < std::min(m.lower.size(), m.upper.size()); ++k) {
        if (!(m.lower[k] < m.upper[k])) p.error(cfg.line_of("marks.lower"), "mark box needs lower < upper");
      }
    } else if (m.law == "discrete") {
      auto it = mark_keys.find("atoms");
      if (it == mark_keys.end()) {
        p.error(cfg.line_of("marks.law"), "discrete mark law needs atoms");
      } else {
        std::string chunk;
        std::istringstream as(it->second.second);
        while (std::getline(as, chunk, '|')) {
          std::vector<double> a;
          p.numbers(it->second.first, "atoms", detail::split_ws(chunk), a);
          m.atoms.push_back(a);
        }
        for (const auto& a : m.atoms) {
          if (a.size() != m.atoms.front().size() || a.empty()) p.error(it->second.first, "mark atoms differ in length");
        }
        mark_keys.erase(it);
      }
      if (!take_list(mark_keys, "weights", m.weights, "") || m.weights.size() != m.atoms.size()) {
        p.error(cfg.line_of("marks.law"), "discrete mark law needs one weight per atom");
      }
      for (double w : m.weights) {
        if (!(w > 0.0)) p.error(cfg.line_of("marks.weights"), "mark weights must be positive");
      }
    }
    leftovers(mark_keys, "mark law " + m.law, "");
  }

  // ---- references
  std::set<std::string> bumps, fields, cylinders, joints;
  auto declare = [&](std::set<std::string>& set, const std::string& kind, const std::string& name) {
    if (!set.insert(name).second) p.error(cfg.line_of("fixtures." + kind + "." + name), "duplicate " + kind + " " + name);
  };
  for (const auto& b : cfg.bumps) {
    declare(bumps, "bump", b.name);
    const int l = cfg.line_of("fixtures.bump." + b.name);
    if (b.center.size() != d) p.error(l, "bump " + b.name + ": center needs d numbers");
    if (b.radius.size() != 1 && b.radius.size() != d) p.error(l, "bump " + b.name + ": radius needs 1 or d numbers");
  }
  for (const auto& f : cfg.fields) {
    declare(fields, "field", f.name);
    const int l = cfg.line_of("fixtures.field." + f.name);
    if (!bumps.count(f.bump)) p.error(l, "field " + f.name + ": undefined bump '" + f.bump + "'");
    if (f.kind == "scaled" && f.direction.size() != d) p.error(l, "field " + f.name + ": direction needs d numbers");
  }
  for (const auto& c : cfg.cylinders) {
    declare(cylinders, "cylinder", c.name);
    for (const auto& dn : c.dirs) {
      if (!bumps.count(dn)) p.error(cfg.line_of("fixtures.cylinder." + c.name), "cylinder " + c.name + ": undefined bump '" + dn + "'");
    }
  }
  for (const auto& j : cfg.joints) {
    declare(joints, "joint", j.name);
    if (!bumps.count(j.bump)) p.error(cfg.line_of("fixtures.joint." + j.name), "joint " + j.name + ": undefined bump '" + j.bump + "'");
  }
  auto ref = [&](const std::string& key, const std::string& name, const std::set<std::string>& set,
                 const char* kind) {
    if (!name.empty() && !set.count(name)) {
      p.error(cfg.line_of("suite." + key), key + ": undefined " + std::string(kind) + " '" + name + "'");
    }
  };
  const auto& st = cfg.suite;
  ref("laplace.f", st.laplace_f, bumps, "bump");
  ref("laplace.joint", st.laplace_joint, joints, "joint");
  ref("moments.f", st.moments_f, bumps, "bump");
  for (const auto& i : st.ibp) {
    ref("ibp." + i.label, i.f, cylinders, "cylinder");
    ref("ibp." + i.label, i.g, cylinders, "cylinder");
    ref("ibp." + i.label, i.v, fields, "field");
  }
  ref("symmetry", st.symmetry_f, cylinders, "cylinder");
  ref("symmetry", st.symmetry_g, cylinders, "cylinder");
  ref("adjudicate", st.adjudicate_f, cylinders, "cylinder");
  ref("adjudicate", st.adjudicate_g, cylinders, "cylinder");
  ref("quasi.field", st.quasi_field, fields, "field");
  ref("quasi.F", st.quasi_f, cylinders, "cylinder");
  ref("quasi.f", st.quasi_laplace, bumps, "bump");
  ref("reduction.f", st.reduction_f, bumps, "bump");
  ref("commutation", st.commutation_v1, fields, "field");
  ref("commutation", st.commutation_v2, fields, "field");
  ref("commutation", st.commutation_f, cylinders, "cylinder");
  ref("commutation", st.commutation_multiplier, bumps, "bump");
  ref("stationarity", st.stationarity_f, cylinders, "cylinder");
  ref("stationarity", st.stationarity_g, cylinders, "cylinder");
  ref("generator", st.generator_f, cylinders, "cylinder");
  if (!st.generator_omega.empty() && st.generator_omega.size() % (d + 1) != 0) {
    p.error(cfg.line_of("suite.generator.omega"), "generator.omega must list (x_1..x_d, mark) per atom");
  }
  if (cfg.job.check != "all") {
    const auto& cn = check_names();
    if (std::find(cn.begin(), cn.end(), cfg.job.check) == cn.end()) {
      p.error(cfg.line_of("job.check") ? cfg.line_of("job.check") : cfg.line_of("job.command"),
              "unknown check '" + cfg.job.check + "'");
    }
  }

  if (!p.issues.empty()) {
    std::stable_sort(p.issues.begin(), p.issues.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
    throw ConfigError(std::move(p.issues));
  }
  return cfg;
}

/// Canonical text form; parse_config(render_config(c)) == c.
inline std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  auto list = [](const std::vector<double>& v) { return format_list(v); };
  auto words = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& w : v) s += (s.empty() ? "" : " ") + w;
    return s;
  };
  o << "[space]\n";
  o << "dimension = " << c.dimension << "\n";
  o << "lower = " << list(c.lower) << "\n";
  o << "upper = " << list(c.upper) << "\n";
  o << "density = " << c.density.family << "\n";
  if (c.density.family == "constant") {
    o << "density.value = " << format_double(c.density.value) << "\n";
  } else {
    o << "density.center = " << list(c.density.center) << "\n";
    if (c.density.family == "gaussian") {
      o << "density.amplitude = " << format_double(c.density.amplitude) << "\n";
      o << "density.width = " << format_double(c.density.width) << "\n";
    } else {
      o << "density.c0 = " << format_double(c.density.c0) << "\n";
      o << "density.c2 = " << format_double(c.density.c2) << "\n";
    }
  }
  if (c.envelope) o << "envelope = " << format_double(*c.envelope) << "\n";

  o << "\n[tau]\nlaw = " << c.tau.law << "\n";
  if (c.tau.law == "point_mass") {
    o << "value = " << format_double(c.tau.atoms[0]) << "\nmass = " << format_double(c.tau.masses[0]) << "\n";
  } else if (c.tau.law == "mixture") {
    o << "atoms = " << list(c.tau.atoms) << "\nmasses = " << list(c.tau.masses) << "\n";
  } else if (c.tau.law == "gamma") {
    o << "mass = " << format_double(c.tau.mass) << "\nshape = " << format_double(c.tau.shape)
      << "\nscale = " << format_double(c.tau.scale) << "\n";
  } else {
    o << "mass = " << format_double(c.tau.mass) << "\nlower = " << format_double(c.tau.lower)
      << "\nupper = " << format_double(c.tau.upper) << "\n";
  }

  o << "\n[marks]\nlaw = " << c.marks.law << "\n";
  if (c.marks.law == "uniform_box") {
    o << "lower = " << list(c.marks.lower) << "\nupper = " << list(c.marks.upper) << "\n";
  } else if (c.marks.law == "discrete") {
    o << "atoms = ";
    for (std::size_t i = 0; i < c.marks.atoms.size(); ++i) o << (i ? " | " : "") << list(c.marks.atoms[i]);
    o << "\nweights = " << list(c.marks.weights) << "\n";
  }

  o << "\n[fixtures]\n";
  for (const auto& b : c.bumps) {
    o << "bump." << b.name << " = center " << list(b.center) << " radius " << list(b.radius) << " scale "
      << format_double(b.scale) << "\n";
  }
  for (const auto& f : c.fields) {
    if (f.kind == "gradient") {
      o << "field." << f.name << " = gradient " << f.bump << "\n";
    } else {
      o << "field." << f.name << " = direction " << list(f.direction) << " bump " << f.bump << "\n";
    }
  }
  for (const auto& cy : c.cylinders) {
    o << "cylinder." << cy.name << " = " << cy.family;
    if (cy.family == "poly") o << " coeffs " << list(cy.coeffs);
    o << " weights " << list(cy.weights) << " offset " << format_double(cy.offset) << " dirs " << words(cy.dirs)
      << "\n";
  }
  for (const auto& j : c.joints) o << "joint." << j.name << " = bump " << j.bump << " coeffs " << list(j.coeffs) << "\n";

  const auto& s = c.suite;
  o << "\n[suite]\n";
  auto opt = [&](const char* key, const std::string& v) {
    if (!v.empty()) o << key << " = " << v << "\n";
  };
  opt("laplace.f", s.laplace_f);
  opt("laplace.joint", s.laplace_joint);
  opt("moments.f", s.moments_f);
  for (const auto& i : s.ibp) o << "ibp." << i.label << " = " << i.f << " " << i.g << " " << i.v << "\n";
  if (!s.symmetry_f.empty()) o << "symmetry = " << s.symmetry_f << " " << s.symmetry_g << "\n";
  if (!s.adjudicate_f.empty()) o << "adjudicate = " << s.adjudicate_f << " " << s.adjudicate_g << "\n";
  opt("quasi.field", s.quasi_field);
  opt("quasi.F", s.quasi_f);
  opt("quasi.f", s.quasi_laplace);
  o << "quasi.t = " << format_double(s.quasi_t) << "\n";
  opt("reduction.f", s.reduction_f);
  if (!s.commutation_v1.empty()) {
    o << "commutation = " << s.commutation_v1 << " " << s.commutation_v2 << " " << s.commutation_f << " "
      << s.commutation_multiplier << "\n";
  }
  o << "commutation.configs = " << s.commutation_configs << "\n";
  o << "directional.configs = " << s.directional_configs << "\n";
  o << "directional.h = " << format_double(s.directional_h) << "\n";
  if (!s.stationarity_f.empty()) o << "stationarity = " << s.stationarity_f << " " << s.stationarity_g << "\n";
  o << "stationarity.T = " << format_double(s.stationarity_T) << "\n";
  o << "stationarity.dt = " << format_double(s.stationarity_dt) << "\n";
  o << "stationarity.modes = " << words(s.stationarity_modes) << "\n";
  opt("generator", s.generator_f);
  if (!s.generator_omega.empty()) o << "generator.omega = " << list(s.generator_omega) << "\n";
  o << "generator.dt = " << list(s.generator_dt) << "\n";

  const auto& j = c.job;
  o << "\n[job]\ncommand = " << j.command << "\ncheck = " << j.check << "\nseed = " << j.seed
    << "\nz_max = " << format_double(j.z_max) << "\nthreads = " << j.threads << "\n";
  for (const auto& [k, v] : j.n) o << "n." << k << " = " << v << "\n";
  o << "measure = " << j.measure << "\ndt = " << format_double(j.dt) << "\nT = " << format_double(j.T)
    << "\nmode = " << j.mode << "\nstride = " << j.stride << "\n";

  o << "\n[output]\ndir = " << c.output.dir << "\ncsv = " << (c.output.csv ? "true" : "false") << "\n";
  return o.str();
}

/// The default fixture: d = 1, window (-1, 1), rho = exp(-x^2/2),
/// tau = (delta_1 + delta_2)/2, bumps of radius 0.5 at 0 and +-0.3, master seed 42.
inline constexpr const char* kDefaultConfig = R"([space]
dimension = 1
lower = -1
upper = 1
density = gaussian
density.center = 0
density.amplitude = 1
density.width = 1

[tau]
law = mixture
atoms = 1 2
masses = 0.5 0.5

[marks]
law = uniform_box
lower = 0
upper = 1

[fixtures]
bump.b0 = center 0 radius 0.5 scale 1
bump.bp = center 0.3 radius 0.5 scale 1
bump.bm = center -0.3 radius 0.5 scale 1
bump.bl = center 0 radius 0.5 scale 0.5
field.v0 = direction 1 bump b0
field.vp = direction 0.8 bump bp
field.vm = direction -0.6 bump bm
cylinder.F = tanh weights 1 0.5 offset 0 dirs b0 bp
cylinder.G = exp weights -0.5 offset 0 dirs bm
cylinder.L = linear weights 1 offset 0 dirs b0
cylinder.P = poly coeffs 0 1 0.5 weights 1 1 offset 0 dirs bm bp
joint.J = bump bl coeffs 0.5 1

[suite]
laplace.f = bl
laplace.joint = J
moments.f = b0
ibp.1 = F G v0
ibp.2 = L P vp
ibp.3 = P F vm
symmetry = F G
# linear functionals: the mark-weighting of the drift term is isolated
adjudicate = L L
quasi.field = v0
quasi.F = F
quasi.f = bl
quasi.t = 0.3
reduction.f = b0
commutation = v0 vp F bm
commutation.configs = 20
directional.configs = 20
directional.h = 1e-05
stationarity = F G
stationarity.T = 0.25
stationarity.dt = 0.001
stationarity.modes = mark_weighted unit
generator = G
generator.omega = -0.3 1 -0.2 2 -0.1 1
generator.dt = 0.002 0.001

[job]
command = verify
check = all
seed = 42
z_max = 3
n.laplace = 200000
n.moments = 200000
n.ibp = 200000
n.symmetry = 400000
n.adjudicate = 400000
n.quasi_invariance = 200000
n.reduction = 100000
n.stationarity = 50000
n.generator = 100000
n.sample = 10
dt = 0.001
T = 0.25
mode = mark_weighted
stride = 10

[output]
dir = out
csv = false
)";

inline RunConfig default_config() { return parse_config(kDefaultConfig); }

}  // namespace cpspace
