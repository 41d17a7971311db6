#include <gtest/gtest.h>

#include <random>
#include <string>

#include "cpspace/run_config.hpp"

using namespace cpspace;

namespace {

int first_issue_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.issues().empty() ? -1 : e.issues().front().line;
  }
  return 0;
}

std::string first_issue(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

constexpr const char* kMinimal = R"([space]
dimension = 1
lower = 0
upper = 2
)";

}  // namespace

TEST(RunConfig, MinimalConfigTakesDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.dimension, 1u);
  EXPECT_EQ(c.upper, std::vector<double>{2.0});
  EXPECT_EQ(c.density.family, "constant");
  EXPECT_EQ(c.tau.law, "point_mass");
  EXPECT_EQ(c.job.seed, 42u);
  EXPECT_EQ(c.job.check, "all");
}

TEST(RunConfig, CommentsAndBlankLinesAreIgnored) {
  const auto a = parse_config(kMinimal);
  const auto b = parse_config(std::string("# leading comment\n\n") + kMinimal + "\n# trailing\n");
  EXPECT_EQ(a, b);
}

TEST(RunConfig, UndefinedBumpNamesTheLine) {
  const std::string text = std::string(kMinimal) +
                           "\n[fixtures]\n"
                           "bump.a = center 1 radius 0.5\n"
                           "field.v = direction 1 bump nope\n";
  EXPECT_EQ(first_issue_line(text), 8);
  EXPECT_NE(first_issue(text).find("undefined bump 'nope'"), std::string::npos);
  EXPECT_NE(first_issue(text).find("line 8"), std::string::npos);
}

TEST(RunConfig, UndefinedSuiteReferenceNamesTheLine) {
  const std::string text = std::string(kMinimal) + "[suite]\nsymmetry = F G\n";
  EXPECT_EQ(first_issue_line(text), 6);
}

TEST(RunConfig, UnknownKeysAndSectionsAreRejected) {
  EXPECT_NE(first_issue(std::string(kMinimal) + "colour = red\n").find("unknown key 'colour'"), std::string::npos);
  EXPECT_EQ(first_issue_line(std::string(kMinimal) + "[extras]\n"), 5);
  EXPECT_EQ(first_issue_line("dimension = 1\n"), 1);
}

TEST(RunConfig, DuplicateKeyReportsBothLines) {
  const auto msg = first_issue(std::string(kMinimal) + "upper = 3\n");
  EXPECT_NE(msg.find("line 5"), std::string::npos);
  EXPECT_NE(msg.find("first on line 4"), std::string::npos);
}

TEST(RunConfig, RangeChecks) {
  EXPECT_EQ(first_issue_line("[space]\ndimension = 1\nlower = 1\nupper = 0\n"), 3);
  EXPECT_GT(first_issue_line(std::string(kMinimal) + "[tau]\nlaw = gamma\nshape = -1\n"), 0);
  EXPECT_GT(first_issue_line(std::string(kMinimal) + "[job]\ndt = 0.5\n"), 0);
  EXPECT_GT(first_issue_line(std::string(kMinimal) + "[job]\nseed = minus\n"), 0);
  EXPECT_GT(first_issue_line(std::string(kMinimal) + "[job]\ncheck = nosuch\n"), 0);
}

TEST(RunConfig, AllIssuesAreCollected) {
  try {
    parse_config(std::string(kMinimal) + "a = 1\nb = 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.issues().size(), 2u);
  }
}

TEST(RunConfig, CommandShorthandSelectsCheck) {
  const auto c = parse_config(std::string(kMinimal) + "[job]\ncommand = verify.laplace\n");
  EXPECT_EQ(c.job.command, "verify");
  EXPECT_EQ(c.job.check, "laplace");
}

TEST(RunConfig, DefaultConfigRoundTrips) {
  const auto c = default_config();
  const auto text = render_config(c);
  const auto again = parse_config(text);
  EXPECT_EQ(again, c);
  EXPECT_EQ(render_config(again), text);
  EXPECT_EQ(c.suite.ibp.size(), 3u);
  EXPECT_EQ(c.job.n.at("symmetry"), 400000u);
}

// Random perturbations of the default: every rendered config parses back to
// the same value and renders to the same bytes.
TEST(RunConfig, RoundTripProperty) {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pos = [&] { return 0.05 + 3.0 * u(gen); };
  auto sym = [&] { return -2.0 + 4.0 * u(gen); };
  const std::vector<std::string> families{"linear", "tanh", "exp", "poly"};
  for (int trial = 0; trial < 200; ++trial) {
    auto c = default_config();
    c.job.seed = gen();
    c.job.z_max = pos();
    c.job.threads = gen() % 9;
    c.job.n["ibp"] = 1 + gen() % 1000000;
    c.suite.quasi_t = sym();
    c.suite.stationarity_T = 0.5 * u(gen);
    switch (trial % 4) {
      case 0:
        c.tau = TauSpec{"mixture", {pos(), pos(), pos()}, {pos(), pos(), pos()}};
        break;
      case 1:
        c.tau = TauSpec{};
        c.tau.law = "gamma";
        c.tau.mass = pos();
        c.tau.shape = pos();
        c.tau.scale = pos();
        break;
      case 2:
        c.tau = TauSpec{};
        c.tau.law = "uniform";
        c.tau.lower = 0.1 * pos();
        c.tau.upper = c.tau.lower + pos();
        break;
      default:
        c.tau = TauSpec{};
        c.tau.law = "point_mass";
        c.tau.atoms = {pos()};
        c.tau.mass = pos();
    }
    for (auto& b : c.bumps) {
      b.center = {sym()};
      b.radius = {pos()};
      b.scale = sym();
    }
    const int extra = static_cast<int>(gen() % 4);
    for (int k = 0; k < extra; ++k) {
      const std::string name = "x" + std::to_string(k);
      c.bumps.push_back({name, {sym()}, {pos()}, sym()});
      c.fields.push_back({"w" + std::to_string(k), "gradient", {}, name});
      CylinderSpec cyl{"C" + std::to_string(k), families[gen() % families.size()], {}, {sym(), sym()}, sym(),
                       {name, c.bumps.front().name}};
      if (cyl.family == "poly") cyl.coeffs = {sym(), sym(), sym()};
      c.cylinders.push_back(cyl);
    }

    const auto text = render_config(c);
    RunConfig back;
    ASSERT_NO_THROW(back = parse_config(text)) << text;
    EXPECT_EQ(render_config(back), text) << "trial " << trial;
    EXPECT_EQ(parse_config(render_config(back)), back) << "trial " << trial;
    EXPECT_EQ(back.job.seed, c.job.seed);
    EXPECT_EQ(back.bumps, c.bumps);
    EXPECT_EQ(back.cylinders, c.cylinders);
  }
}
