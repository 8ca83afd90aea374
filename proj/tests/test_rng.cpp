#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hospsim/errors.hpp"
#include "hospsim/rng.hpp"

using namespace hospsim;

TEST(Rng, Uniform01StaysInUnitInterval) {
  Rng rng(3);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Rng, NamedStreamsAreReproducibleAndDistinct) {
  Rng a = make_stream(42, "death");
  Rng b = make_stream(42, "death");
  Rng c = make_stream(42, "routing");
  Rng d = make_stream(43, "death");
  auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Rng, DrawsFromOneStreamDoNotShiftAnother) {
  RngStreams s1(9), s2(9);
  for (int i = 0; i < 1000; ++i) s1["noise"]();
  for (int i = 0; i < 10; ++i) EXPECT_EQ(s1["covid"](), s2["covid"]());
  EXPECT_EQ(&s1["covid"], &s1["covid"]);
}

TEST(Rng, UniformIndexIsFlat) {
  Rng rng(5);
  const std::size_t k = 7;
  const int n = 70000;
  std::vector<int> counts(k);
  for (int i = 0; i < n; ++i) ++counts[uniform_index(rng, k)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  // 6 degrees of freedom, p = 0.001 critical value
  EXPECT_LT(chi2, 22.46);
}

TEST(Rng, WeightedIndexMatchesWeights) {
  Rng rng(11);
  std::vector<double> w = {1.0, 0.0, 3.0};
  std::vector<int> counts(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[weighted_index(w, rng)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / double(n), 0.25, 0.01);
  EXPECT_NEAR(counts[2] / double(n), 0.75, 0.01);
}

TEST(Rng, WeightedIndexRejectsAllZero) {
  Rng rng(1);
  std::vector<double> w = {0.0, 0.0};
  EXPECT_THROW(weighted_index(w, rng), DomainError);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(2);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  auto copy = v;
  shuffle(std::span(v), rng);
  EXPECT_NE(v, copy);
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v, copy);
}

TEST(Rng, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Apportion, LargestRemainderKeepsTotal) {
  auto a = apportion(10, {1.0, 1.0, 1.0});
  EXPECT_EQ(a, (std::vector<long long>{4, 3, 3}));
  auto b = apportion(7, {0.5, 0.0, 2.0});
  EXPECT_EQ(b[0] + b[1] + b[2], 7);
  EXPECT_EQ(b[1], 0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(b[i] - 7.0 * std::vector<double>{0.2, 0, 0.8}[i]), 1.0);
  EXPECT_EQ(apportion(5, {0.0, 0.0}), (std::vector<long long>{0, 0}));
}
