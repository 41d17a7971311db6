// cpspace: sample, verify, simulate and adjudicate from a run configuration.
//
// Exit status: 0 all checks pass, 1 a check failed (or adjudication was
// inconclusive), 2 bad configuration or usage, 3 runtime error.
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cpspace/cpspace.hpp"

namespace fs = std::filesystem;
using namespace cpspace;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::string> out;
  bool csv = false;
  std::optional<double> z_max;
  std::optional<std::size_t> threads;
  std::string check;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Run metadata lives apart from report.json so reports stay byte-comparable.
void write_metadata(const fs::path& dir, const RunConfig& cfg, const std::string& command) {
  nlohmann::ordered_json j;
  j["timestamp"] = utc_timestamp();
  j["command"] = command;
  j["seed"] = cfg.job.seed;
  j["config_hash"] = hex64(fnv1a64(render_config(cfg)));
  j["version"] = "0.1.0";
  write_file(dir / "metadata.json", j.dump(2) + "\n");
}

int finish_reports(const std::vector<MCReport>& reports, const RunConfig& cfg, const fs::path& dir, bool csv) {
  bool all = true;
  for (const auto& r : reports) {
    std::cout << summary_line(r) << "\n";
    all = all && r.pass;
  }
  write_file(dir / "report.json", reports_to_json(reports));
  if (csv) write_file(dir / "report.csv", reports_to_csv(reports));
  std::size_t passed = 0;
  for (const auto& r : reports) passed += r.pass ? 1 : 0;
  std::cout << passed << "/" << reports.size() << " checks passed; report in " << (dir / "report.json").string()
            << "\n";
  (void)cfg;
  return all ? 0 : 1;
}

int run_sample(const Suite& s, const fs::path& dir, const Options& opt) {
  const auto& cfg = s.config;
  const std::size_t n = sample_size(cfg, "sample", opt.n);
  const std::uint64_t base = stream_base("sample");
  std::ostringstream out;
  nlohmann::ordered_json header;
  header["seed"] = cfg.job.seed;
  header["streams"] = n;
  header["stream_base"] = base;
  header["measure"] = cfg.job.measure;
  header["param_hash"] = hex64(fnv1a64(render_config(cfg)));
  out << nlohmann::ordered_json{{"header", header}}.dump() << "\n";
  std::ostringstream csv_out;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(cfg.job.seed, base + i);
    MarkedConfiguration w;
    if (cfg.job.measure == "compound") {
      w = s.model.compound().sample(rng);
    } else if (cfg.job.measure == "simple") {
      // Unit marks: the simple configuration seen as a compound one.
      const auto g = s.model.simple().sample(rng);
      std::vector<double> flat;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.point(k);
        flat.insert(flat.end(), x.begin(), x.end());
        flat.push_back(1.0);
      }
      w = MarkedConfiguration::compound(g.dim(), std::move(flat));
    } else {
      if (!s.model.marks) throw std::invalid_argument("measure = marked needs a [marks] law");
      w = MarkedPoissonSampler(s.model.rho, *s.model.marks, s.model.window, s.model.envelope).sample(rng);
    }
    out << to_jsonl(w) << "\n";
    if (opt.csv || cfg.output.csv) {
      std::istringstream rows(to_csv(w));
      std::string row;
      bool first = true;
      while (std::getline(rows, row)) {
        if (first) {
          if (i == 0) csv_out << "replica," << row << "\n";
          first = false;
          continue;
        }
        csv_out << i << "," << row << "\n";
      }
    }
  }
  write_file(dir / "data.jsonl", out.str());
  if (opt.csv || cfg.output.csv) write_file(dir / "data.csv", csv_out.str());
  std::cout << "wrote " << n << " configurations to " << (dir / "data.jsonl").string() << "\n";
  return 0;
}

int run_simulate(const Suite& s, const fs::path& dir) {
  const auto& cfg = s.config;
  const auto mode = cfg.job.mode == "unit" ? DynamicsMode::unit : DynamicsMode::mark_weighted;
  RandomStream init(cfg.job.seed, stream_base("simulate", 0));
  const auto omega0 = s.model.compound().sample(init);
  RandomStream rng(cfg.job.seed, stream_base("simulate", 1));
  const auto traj = simulate(omega0, s.model.rho, s.model.window, cfg.job.dt, cfg.job.T, mode, rng, cfg.job.stride);
  std::ostringstream out;
  for (const auto& st : traj) {
    out << "{\"time\":" << format_double(st.time) << "," << to_jsonl(st.configuration).substr(1) << "\n";
  }
  write_file(dir / "trajectory.jsonl", out.str());
  std::cout << "wrote " << traj.size() << " snapshots (" << omega0.size() << " atoms, mode " << to_string(mode)
            << ") to " << (dir / "trajectory.jsonl").string() << "\n";
  return 0;
}

int run_adjudicate(const Suite& s, const fs::path& dir, const Options& opt) {
  const auto a = run_adjudication(s, opt.n);
  for (const auto& r : a.reports) std::cout << summary_line(r) << "\n";
  write_file(dir / "report.json", reports_to_json(a.reports));
  if (opt.csv || s.config.output.csv) write_file(dir / "report.csv", reports_to_csv(a.reports));
  std::cout << "Dirichlet variants consistent under both mark laws:";
  for (const auto& m : a.consistent_modes) std::cout << " " << m;
  std::cout << "\nverdict: " << (a.conclusive ? "conclusive" : "inconclusive")
            << " (omega_metric must pass everywhere and paper_literal fail with |z| > 5 under mixed marks)\n";
  return a.conclusive ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampler, calculus and Monte Carlo verification for compound Poisson configuration spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "Run configuration file (default: built-in fixture)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", opt.seed, "Master seed (overrides config)");
  app.add_option("--n", opt.n, "Sample size for every check (overrides config)")->check(CLI::PositiveNumber);
  app.add_option("--out", opt.out, "Output directory (overrides config)");
  app.add_flag("--csv", opt.csv, "Also write CSV rows");
  app.add_option("--z-max", opt.z_max, "Pass threshold on |z| (overrides config)")->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "Worker threads, 0 = all cores (overrides config)");

  auto* sample = app.add_subcommand("sample", "Draw configurations and write data.jsonl");
  auto* verify = app.add_subcommand("verify", "Run one check or the whole suite and write report.json");
  verify->add_option("check", opt.check, "Check name or 'all' (default: from config)");
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the equilibrium diffusion; write trajectory.jsonl");
  auto* adjudicate = app.add_subcommand("adjudicate", "Discriminate the Dirichlet-operator variants");
  auto* show = app.add_subcommand("config", "Print the canonical form of the configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // --help exits 0, usage errors 2
  }

  RunConfig cfg;
  try {
    if (opt.config_path.empty()) {
      cfg = default_config();
    } else {
      std::ifstream in(opt.config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = parse_config(ss.str());
    }
  } catch (const ConfigError& e) {
    std::cerr << (opt.config_path.empty() ? std::string("built-in config") : opt.config_path) << ":\n"
              << e.what() << "\n";
    return 2;
  }
  if (opt.seed) cfg.job.seed = *opt.seed;
  if (opt.z_max) cfg.job.z_max = *opt.z_max;
  if (opt.threads) cfg.job.threads = *opt.threads;
  if (opt.out) cfg.output.dir = *opt.out;
  if (!opt.check.empty()) {
    const auto& names = check_names();
    if (opt.check != "all" && std::find(names.begin(), names.end(), opt.check) == names.end()) {
      std::cerr << "unknown check '" << opt.check << "'; expected all or one of:";
      for (const auto& n : names) std::cerr << " " << n;
      std::cerr << "\n";
      return 2;
    }
    cfg.job.check = opt.check;
  }
  if (*show) {
    std::cout << render_config(cfg);
    return 0;
  }
  replication_threads() = cfg.job.threads;

  try {
    const fs::path dir = cfg.output.dir;
    fs::create_directories(dir);
    const Suite suite = build_suite(cfg);
    std::string command = sample->parsed()         ? "sample"
                          : verify->parsed()       ? "verify " + cfg.job.check
                          : simulate_cmd->parsed() ? "simulate"
                                                   : "adjudicate";
    write_metadata(dir, cfg, command);
    if (*sample) return run_sample(suite, dir, opt);
    if (*simulate_cmd) return run_simulate(suite, dir);
    if (*adjudicate) return run_adjudicate(suite, dir, opt);
    const bool csv = opt.csv || cfg.output.csv;
    return finish_reports(run_suite(suite, cfg.job.check, opt.n), cfg, dir, csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
