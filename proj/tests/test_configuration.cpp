#include <gtest/gtest.h>

#include <vector>

#include "cpspace/configuration.hpp"
#include "cpspace/random.hpp"

using namespace cpspace;

namespace {

MarkedConfiguration random_config(RandomStream& rng, std::size_t n) {
  std::vector<double> flat;
  for (std::size_t i = 0; i < n; ++i) {
    flat.push_back(rng.uniform(-1.0, 1.0));
    flat.push_back(rng.uniform(0.1, 3.0));
  }
  return MarkedConfiguration::compound(1, flat);
}

}  // namespace

TEST(Pair, ArithmeticExamples) {
  // f(x1) = 1, f(x2) = 4 via f = 1 + 3 * coordinate on x1 = 0, x2 = 1
  auto f = ScalarField::constant(1, 1.0) + 3.0 * ScalarField::coordinate(1, 0);
  auto omega = MarkedConfiguration::compound(1, {0.0, 2.0, 1.0, 0.5});
  EXPECT_DOUBLE_EQ(pair(omega, f, Weighting::marked), 4.0);
  EXPECT_DOUBLE_EQ(pair(omega, f, Weighting::unmarked), 5.0);
  MarkedConfiguration empty = MarkedConfiguration::compound(1);
  EXPECT_EQ(pair(empty, f, Weighting::marked), 0.0);
  EXPECT_EQ(pair(empty, f, Weighting::unmarked), 0.0);
}

TEST(Pair, LinearInTestFunction) {
  RandomStream rng(7, 0);
  auto f = ScalarField::bump({0.0}, 0.5), g = ScalarField::bump({0.3}, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    auto omega = random_config(rng, 6);
    for (auto w : {Weighting::marked, Weighting::unmarked}) {
      EXPECT_NEAR(pair(omega, 2.0 * f + (-0.5) * g, w), 2.0 * pair(omega, f, w) - 0.5 * pair(omega, g, w), 1e-12);
    }
  }
}

TEST(Configuration, SortedAndDuplicatesRejected) {
  auto omega = MarkedConfiguration::compound(1, {0.5, 1.0, -0.2, 2.0});
  EXPECT_EQ(omega.point(0)[0], -0.2);
  EXPECT_EQ(omega.mark(0), 2.0);
  EXPECT_THROW(MarkedConfiguration::compound(1, {0.5, 1.0, 0.5, 2.0}), ConfigurationError);
  EXPECT_THROW(MarkedConfiguration::compound(1, {0.5, 0.0}), ConfigurationError);
  EXPECT_THROW(SimpleConfiguration(2, {0.1, 0.2, 0.1, 0.2}), ConfigurationError);
}

TEST(SigmaMap, RelabelingAndRoundTrip) {
  SimpleConfiguration hat(2, {0.1, 1.5, 0.7, 2.0});
  auto omega = sigma_map(hat);
  EXPECT_EQ(omega.size(), 2u);
  EXPECT_EQ(omega.point(1)[0], 0.7);
  EXPECT_EQ(omega.mark(1), 2.0);
  EXPECT_EQ(sigma_map_inverse(omega), hat);
  EXPECT_TRUE(sigma_map(SimpleConfiguration(2)).empty());
  EXPECT_THROW(sigma_map(SimpleConfiguration(2, {0.1, 1.0, 0.1, 2.0})), ConfigurationError);

  RandomStream rng(11, 3);
  for (int rep = 0; rep < 100; ++rep) {
    auto w = random_config(rng, rep % 7);
    EXPECT_EQ(sigma_map(sigma_map_inverse(w)), w);
    auto h = sigma_map_inverse(w);
    EXPECT_EQ(sigma_map_inverse(sigma_map(h)), h);
  }
}

TEST(Pushforward, TrivialCasesAndPairingIdentity) {
  auto v = CompactVectorField::scaled_bump({0.8}, ScalarField::bump({0.0}, 0.5));
  auto f = ScalarField::bump({0.3}, 0.5);
  RandomStream rng(5, 1);
  auto omega = random_config(rng, 8);
  EXPECT_EQ(pushforward(omega, v, 0.0), omega);
  auto far = MarkedConfiguration::compound(1, {-0.9, 1.0, 0.8, 2.0});
  EXPECT_EQ(pushforward(far, v, 0.4), far);
  for (int rep = 0; rep < 20; ++rep) {
    auto w = random_config(rng, 5);
    double rhs = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) rhs += w.mark(i) * f.value(flow(v, 0.2, w.point(i)).endpoint);
    EXPECT_NEAR(pair(pushforward(w, v, 0.2), f), rhs, 1e-7);
  }
}

TEST(Restrict, ProjectiveConsistencyAndCounts) {
  RandomStream rng(9, 2);
  Window full({-1.0}, {1.0}), mid({-0.5}, {0.6}), small({-0.2}, {0.1});
  for (int rep = 0; rep < 30; ++rep) {
    auto w = random_config(rng, 10);
    EXPECT_EQ(restrict_to(w, full), w);
    EXPECT_TRUE(restrict_to(w, Window({2.0}, {3.0})).empty());
    EXPECT_EQ(restrict_to(restrict_to(w, mid), small), restrict_to(w, small));
    EXPECT_EQ(count(restrict_to(w, mid), mid), count(w, mid));
    EXPECT_EQ(count(w, Window({-1.0}, {0.0})) + count(w, Window({0.0}, {1.0})), count(w, full));
    EXPECT_EQ(count(w, full), w.size());
  }
  EXPECT_EQ(count(MarkedConfiguration::compound(1), full), 0u);
}

TEST(Serialization, JsonlRoundTripIsExact) {
  RandomStream rng(1, 1);
  for (int rep = 0; rep < 50; ++rep) {
    auto w = random_config(rng, rep % 5);
    EXPECT_EQ(from_jsonl(to_jsonl(w), 1), w);
  }
  EXPECT_EQ(to_jsonl(MarkedConfiguration::compound(1, {0.5, 2.0, -0.25, 1.0})), "{\"atoms\":[[-0.25,1],[0.5,2]]}");
  EXPECT_THROW(from_jsonl("{\"atoms\":[[0.1]]}", 1), ConfigurationError);
  auto m = MarkedConfiguration::marked(2, 2, {0.1, 0.2, 3.0, 4.0});
  EXPECT_EQ(from_jsonl(to_jsonl(m), 2, MarkKind::marked, 2), m);
}

TEST(Serialization, CsvHeader) {
  auto w = MarkedConfiguration::compound(2, {0.5, 0.25, 2.0});
  EXPECT_EQ(to_csv(w), "x_1,x_2,mark\n0.5,0.25,2\n");
}
