#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "flatspace/metric_space.hpp"

using namespace flatspace;

namespace {

FiniteMetricSpace two_points(double d) { return FiniteMetricSpace({"a", "b"}, {{0, d}, {d, 0}}); }

// Random points in the plane give a valid metric space.
FiniteMetricSpace random_space(std::mt19937_64& rng, std::size_t n, const std::string& prefix = "p") {
  std::normal_distribution<double> g;
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {g(rng), g(rng)};
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(prefix + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) d[i][j] = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  }
  return FiniteMetricSpace(labels, d);
}

std::vector<std::size_t> identity_map(std::size_t n) {
  std::vector<std::size_t> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = i;
  return a;
}

}  // namespace

TEST(DistanceMatrix, RejectsInvalidInput) {
  EXPECT_THROW(DistanceMatrix({{0, 1}, {2, 0}}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix({{1, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix({{0, -1}, {-1, 0}}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix({{0, NAN}, {NAN, 0}}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix({{0, 1}}), std::invalid_argument);
  EXPECT_NO_THROW(DistanceMatrix({{0, 0}, {0, 0}}));
}

TEST(FiniteMetricSpace, EnforcesMetricAxioms) {
  EXPECT_THROW(FiniteMetricSpace({"a", "b"}, {{0, 0}, {0, 0}}), std::invalid_argument);
  EXPECT_THROW(FiniteMetricSpace({"a", "b", "c"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}), std::invalid_argument);
  EXPECT_THROW(FiniteMetricSpace({"a"}, {{0, 1}, {1, 0}}), std::invalid_argument);
  try {
    FiniteMetricSpace({"a", "b", "c"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}});
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("a"), std::string::npos);
  }
}

TEST(ScaleSpace, Examples) {
  std::mt19937_64 rng(1);
  auto x = random_space(rng, 5);
  auto same = scale_space(x, ScaleFactor(1.0));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(same(i, j), x(i, j));
  EXPECT_DOUBLE_EQ(scale_space(two_points(3), ScaleFactor(2))(0, 1), 6.0);
  auto half = scale_space(x, ScaleFactor(0.5));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(half(i, j), 0.5 * x(i, j));
  EXPECT_THROW(ScaleFactor(0.0), std::invalid_argument);
  EXPECT_THROW(ScaleFactor(-1.0), std::invalid_argument);
}

TEST(ScaleSpace, ComposesMultiplicatively) {
  std::mt19937_64 rng(2);
  auto x = random_space(rng, 6);
  const double a = 1.7, b = 0.3;
  auto twice = scale_space(scale_space(x, ScaleFactor(a)), ScaleFactor(b));
  auto once = scale_space(x, ScaleFactor(a * b));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(twice(i, j), once(i, j), 1e-15 * (1 + once(i, j)));
}

TEST(ProductSpace, Examples) {
  auto p = product_space(two_points(3), two_points(4));
  EXPECT_DOUBLE_EQ(p(0, 3), 5.0);
  EXPECT_EQ(p.labels()[1], "(a,b)");
  auto single = FiniteMetricSpace({"o"}, std::vector<std::vector<double>>{{0.0}});
  auto y = two_points(2.5);
  auto q = product_space(single, y);
  EXPECT_DOUBLE_EQ(q(0, 1), 2.5);
}

TEST(ProductSpace, MatchesFormulaAndCommutes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_space(rng, 3, "x"), y = random_space(rng, 3, "y");
    auto xy = product_space(x, y), yx = product_space(y, x);
    for (std::size_t i1 = 0; i1 < 3; ++i1)
      for (std::size_t j1 = 0; j1 < 3; ++j1)
        for (std::size_t i2 = 0; i2 < 3; ++i2)
          for (std::size_t j2 = 0; j2 < 3; ++j2) {
            const double expect = std::sqrt(x(i1, i2) * x(i1, i2) + y(j1, j2) * y(j1, j2));
            EXPECT_NEAR(xy(i1 * 3 + j1, i2 * 3 + j2), expect, 1e-14);
            EXPECT_NEAR(xy(i1 * 3 + j1, i2 * 3 + j2), yx(j1 * 3 + i1, j2 * 3 + i2), 1e-14);
          }
  }
}

TEST(PowerSpace, HammingCube) {
  auto x = two_points(1.0);
  auto p = power_space(x, 4);
  ASSERT_EQ(p.size(), 16u);
  for (std::size_t u = 0; u < 16; ++u)
    for (std::size_t v = 0; v < 16; ++v)
      EXPECT_NEAR(p(u, v), std::sqrt(static_cast<double>(__builtin_popcount(static_cast<unsigned>(u ^ v)))), 1e-15);
  EXPECT_DOUBLE_EQ(p.distances().max_entry(), 2.0);
  EXPECT_THROW(power_space(x, 0), std::invalid_argument);
}

TEST(PowerSpace, SplitsAsProduct) {
  std::mt19937_64 rng(4);
  auto x = random_space(rng, 3);
  auto one = power_space(x, 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(one(i, j), x(i, j));
  auto p5 = power_space(x, 3);
  auto split = product_space(power_space(x, 2), power_space(x, 1));
  auto sq = power_space(x, 2);
  auto xx = product_space(x, x);
  for (std::size_t i = 0; i < p5.size(); ++i)
    for (std::size_t j = 0; j < p5.size(); ++j) EXPECT_NEAR(p5(i, j), split(i, j), 1e-14);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(sq(i, j), xx(i, j), 1e-15);
}

TEST(Lipschitz, Examples) {
  std::mt19937_64 rng(5);
  auto x = random_space(rng, 5);
  const auto id = identity_map(5);
  EXPECT_DOUBLE_EQ(bilipschitz_constant(PointMap(x, x, id)), 1.0);
  EXPECT_DOUBLE_EQ(lipschitz_constant(PointMap(x, x, id)), 1.0);
  EXPECT_NEAR(bilipschitz_constant(PointMap(x, scale_space(x, ScaleFactor(2)), id)), 2.0, 1e-15);
  EXPECT_NEAR(lipschitz_constant(PointMap(x, scale_space(x, ScaleFactor(3)), id)), 3.0, 1e-15);
  EXPECT_EQ(lipschitz_constant(PointMap(x, x, std::vector<std::size_t>(5, 2))), 0.0);
  EXPECT_EQ(bilipschitz_constant(PointMap(x, x, std::vector<std::size_t>(5, 2))),
            std::numeric_limits<double>::infinity());
}

TEST(Lipschitz, BilipschitzMatchesExhaustivePairScan) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_space(rng, 4, "x"), y = random_space(rng, 4, "y");
    std::vector<std::size_t> a = identity_map(4);
    std::shuffle(a.begin(), a.end(), rng);
    PointMap m(x, y, a);
    double expand = 0.0, shrink = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) {
        expand = std::max(expand, y(a[i], a[j]) / x(i, j));
        shrink = std::max(shrink, x(i, j) / y(a[i], a[j]));
      }
    EXPECT_NEAR(bilipschitz_constant(m), std::max({1.0, expand, shrink}), 1e-14);
    EXPECT_NEAR(bilipschitz_constant(m), std::max(lipschitz_constant(m), lipschitz_constant(m.inverse())), 1e-14);
  }
}

TEST(CorrespondenceDistortion, CollapseAndSmallSets) {
  DistanceMatrix src({{0, 1}, {1, 0}});
  DistanceMatrix img({{0, 0}, {0, 0}});
  EXPECT_EQ(correspondence_distortion(src, img), std::numeric_limits<double>::infinity());
  EXPECT_EQ(correspondence_distortion(DistanceMatrix(1, {0.0}), DistanceMatrix(1, {0.0})), 1.0);
  EXPECT_DOUBLE_EQ(correspondence_distortion(src, DistanceMatrix({{0, 0.5}, {0.5, 0}})), 2.0);
}
