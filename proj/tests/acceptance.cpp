// Acceptance run: criteria 1-10 on the default fixture at full sample sizes.
// Prints one PASS/FAIL line per criterion (with the rows that decided it)
// and exits non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cpspace/cpspace.hpp"

using namespace cpspace;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

const MCReport& find(const std::vector<MCReport>& rs, const std::string& name) {
  for (const auto& r : rs) {
    if (r.name == name) return r;
  }
  throw std::runtime_error("missing report " + name);
}

std::string describe(const MCReport& r) {
  char buf[200];
  if (r.kind == MCReport::Kind::exact) {
    std::snprintf(buf, sizeof buf, "%s residual %.3e <= %.1e", r.name.c_str(), r.estimate, r.tolerance);
  } else {
    std::snprintf(buf, sizeof buf, "%s z %+.2f (n = %zu)", r.name.c_str(), r.z, r.n_samples);
  }
  return buf;
}

// |z| < 3 at exactly the stated sample size.
void require_mc(Outcome& o, const MCReport& r, std::size_t n) {
  o.require(r.pass && std::abs(r.z) < 3.0 && r.n_samples == n, describe(r));
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

int main() {
  const auto cfg = default_config();
  const Suite suite = build_suite(cfg);
  std::map<std::string, std::vector<MCReport>> by_check;
  std::map<std::string, double> runtime;
  std::vector<MCReport> first_run;
  for (const auto& c : check_names()) {
    const auto t0 = Clock::now();
    by_check[c] = run_check(suite, c);
    runtime[c] = seconds_since(t0);
    first_run.insert(first_run.end(), by_check[c].begin(), by_check[c].end());
  }

  std::vector<std::pair<std::string, Outcome>> results;
  auto criterion = [&](const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    try {
      body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    results.emplace_back(title, o);
  };

  criterion("1 Laplace functionals (simple, compound, marked)", [&](Outcome& o) {
    const auto& rs = by_check["laplace"];
    for (const char* n : {"laplace.simple", "laplace.compound", "laplace.marked"}) require_mc(o, find(rs, n), 200000);
    o.require(runtime["laplace"] < 60.0, "runtime " + format_double(runtime["laplace"]) + " s for all three < 60 s");
  });

  criterion("2 Moment formula", [&](Outcome& o) {
    const auto& rs = by_check["moments"];
    o.require(suite.model.tau.moment(1) == 1.5 && suite.model.tau.moment(2) == 2.5, "mark moments m1 = 1.5, m2 = 2.5");
    require_mc(o, find(rs, "moments.first"), 200000);
    require_mc(o, find(rs, "moments.second"), 200000);
  });

  criterion("3 Integration by parts, three fixtures", [&](Outcome& o) {
    const auto& rs = by_check["ibp"];
    o.require(rs.size() == 3, "three independent (F, G, v) fixtures");
    for (const auto& r : rs) require_mc(o, r, 200000);
  });

  criterion("4 Divergence / form-operator duality and adjudication", [&](Outcome& o) {
    require_mc(o, find(by_check["symmetry"], "symmetry.omega_metric"), 400000);
    const auto a = run_adjudication(suite);
    const auto& lit = find(a.reports, "adjudicate.mixed.paper_literal");
    o.require(!lit.pass && std::abs(lit.z) > 5.0, describe(lit) + " rejected with |z| > 5");
    for (const char* m : {"omega_metric", "gamma_metric", "paper_literal"}) {
      require_mc(o, find(a.reports, std::string("adjudicate.delta1.") + m), 400000);
    }
  });

  criterion("5 Quasi-invariance (bump flow, t = 0.3)", [&](Outcome& o) {
    o.require(cfg.suite.quasi_t == 0.3, "diffeo time t = 0.3");
    const auto& rs = by_check["quasi_invariance"];
    require_mc(o, find(rs, "quasi_invariance.normalization"), 200000);
    require_mc(o, find(rs, "quasi_invariance.change_of_variables"), 200000);
  });

  criterion("6 Reduction to the simple measure at tau = delta_1", [&](Outcome& o) {
    const auto& rs = by_check["reduction"];
    const auto& c = find(rs, "reduction.constructive");
    o.require(c.pass && c.estimate == 0.0, "constructive: bit-identical positions (" + describe(c) + ")");
    for (const auto& r : rs) {
      if (r.kind == MCReport::Kind::two_sample) o.require(r.pass && std::abs(r.z) < 3.0, describe(r));
    }
  });

  criterion("7 Lie-algebra representation", [&](Outcome& o) {
    const auto& rs = by_check["commutation"];
    const auto& mult = find(rs, "commutation.multiplication");
    o.require(mult.pass && mult.estimate <= 1e-10, describe(mult));
    const auto& nested = find(rs, "commutation.nested");
    o.require(nested.pass && nested.estimate < 1e-6 && nested.n_samples >= 20,
              describe(nested) + " over " + std::to_string(nested.n_samples) + " configurations");
    const auto& gen = find(rs, "commutation.generator");
    o.require(gen.pass && gen.estimate <= 1e-6, describe(gen));
  });

  criterion("8 Directional derivative: analytic vs flow finite difference", [&](Outcome& o) {
    const auto& r = find(by_check["directional"], "directional");
    o.require(r.pass && r.estimate < 1e-6, describe(r) + " over " + std::to_string(r.n_samples) + " evaluations");
  });

  criterion("9 Dynamics: generator and stationarity", [&](Outcome& o) {
    o.require(cfg.suite.generator_dt == std::vector<double>{2e-3, 1e-3} && cfg.suite.generator_omega.size() == 6,
              "dt in {2e-3, 1e-3}, 3-atom configuration");
    // n_samples counts every draw: 1e5 replicas at each of the two steps.
    for (const auto& r : by_check["generator"]) require_mc(o, r, 2 * 100000);
    o.require(cfg.suite.stationarity_T == 0.25, "horizon T = 0.25");
    for (const auto& r : by_check["stationarity"]) {
      // Two-sample rows: F at time 0 and at T on the same 5e4 trajectories.
      if (r.name.rfind("stationarity.", 0) == 0 && r.kind == MCReport::Kind::two_sample) require_mc(o, r, 2 * 50000);
    }
    const double t = runtime["generator"] + runtime["stationarity"];
    o.require(t < 300.0, "runtime " + format_double(t) + " s < 5 min");
  });

  criterion("10 Determinism of report.json", [&](Outcome& o) {
    const auto saved = replication_threads();
    replication_threads() = saved == 1 ? 4 : 1;
    const auto second = run_suite(suite);
    replication_threads() = saved;
    const auto a = reports_to_json(first_run), b = reports_to_json(second);
    o.require(a == b, "rerun with a different worker count: " + std::to_string(a.size()) + " bytes, " +
                          (a == b ? "identical" : "differ"));
  });

  bool all = true;
  for (const auto& [title, o] : results) {
    std::cout << (o.pass ? "PASS " : "FAIL ") << title << "\n";
    for (const auto& n : o.notes) std::cout << n << "\n";
    all = all && o.pass;
  }
  std::cout << (all ? "all acceptance criteria passed" : "some acceptance criteria FAILED") << "\n";
  return all ? 0 : 1;
}
