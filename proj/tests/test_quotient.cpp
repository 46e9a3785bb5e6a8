#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "flatspace/quotient.hpp"
#include "oracles.hpp"

using namespace flatspace;
using std::numbers::pi;

namespace {

EuclideanIsometry rotation2(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return EuclideanIsometry(r, Eigen::Vector2d::Zero());
}

Eigen::VectorXd v(std::initializer_list<double> xs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) out[k++] = x;
  return out;
}

}  // namespace

TEST(Isometry, Validation) {
  EXPECT_THROW(EuclideanIsometry(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Zero(2)), std::invalid_argument);
  EXPECT_THROW(EuclideanIsometry::permutation({0, 0}), std::invalid_argument);
  auto p = EuclideanIsometry::permutation({2, 0, 1});
  EXPECT_EQ(p.apply(v({1, 2, 3})), v({2, 3, 1}));
  EXPECT_TRUE(p.compose(p.inverse()).approx_equal(EuclideanIsometry::identity(3), 1e-15));
}

TEST(IsometryGroup, Validation) {
  EXPECT_THROW(FiniteIsometryGroup({rotation2(pi / 2)}), std::invalid_argument);
  EXPECT_THROW(FiniteIsometryGroup({EuclideanIsometry::identity(2), rotation2(pi / 2)}), std::invalid_argument);
  auto c4 = FiniteIsometryGroup::generated_by({rotation2(pi / 2)});
  EXPECT_EQ(c4.order(), 4u);
  EXPECT_EQ(FiniteIsometryGroup::symmetric_group(4).order(), 24u);
  EXPECT_THROW(FiniteIsometryGroup::generated_by({rotation2(1.0)}, 50), std::invalid_argument);
}

TEST(EuclideanQuotient, Examples) {
  auto pm = FiniteIsometryGroup({EuclideanIsometry::identity(1),
                                 EuclideanIsometry(Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::VectorXd::Zero(1))});
  EXPECT_EQ(euclidean_quotient_distance(v({1}), v({-1}), pm), 0.0);
  auto c4 = FiniteIsometryGroup::generated_by({rotation2(pi / 2)});
  EXPECT_NEAR(euclidean_quotient_distance(v({1, 0}), v({0, 1}), c4), 0.0, 1e-15);
}

TEST(EuclideanQuotient, MatchesBruteForceAndIsPseudometric) {
  std::mt19937_64 rng(31);
  auto s3 = FiniteIsometryGroup::symmetric_group(3);
  // a non-permutation group: the dihedral group of the square, with a translation conjugate
  auto d4 = FiniteIsometryGroup::generated_by(
      {rotation2(pi / 2), EuclideanIsometry(Eigen::Vector2d(1, -1).asDiagonal(), Eigen::Vector2d::Zero())});
  EXPECT_EQ(d4.order(), 8u);
  for (int k = 0; k < 200; ++k) {
    const auto& G = (k % 2) ? s3 : d4;
    const auto dim = G.dimension();
    auto x = oracle::random_vector(rng, dim), y = oracle::random_vector(rng, dim), z = oracle::random_vector(rng, dim);
    double brute = INFINITY;
    for (const auto& g : G.elements()) brute = std::min(brute, (x - g.orthogonal() * y - g.translation()).norm());
    const double dxy = euclidean_quotient_distance(x, y, G);
    EXPECT_NEAR(dxy, brute, 1e-12);
    EXPECT_NEAR(dxy, euclidean_quotient_distance(y, x, G), 1e-10);
    EXPECT_LE(euclidean_quotient_distance(x, z, G), dxy + euclidean_quotient_distance(y, z, G) + 1e-10);
    EXPECT_LE(dxy, (x - y).norm() + 1e-15);
    for (const auto& g : G.elements()) EXPECT_NEAR(euclidean_quotient_distance(g.apply(x), y, G), dxy, 1e-10);
  }
}

TEST(Compactified, Examples) {
  auto trivial = FiniteIsometryGroup::trivial(1);
  EXPECT_NEAR(compactified_distance(v({1}), v({9}), trivial, LatticeShiftAction(10, 1)), 2.0, 1e-14);
  auto s2 = FiniteIsometryGroup::symmetric_group(2);
  auto x = v({0.3, 1.2}), y = v({-0.4, 0.9});
  EXPECT_NEAR(compactified_distance(x, y, s2, LatticeShiftAction(1e6, 2)), euclidean_quotient_distance(x, y, s2), 1e-9);
  EXPECT_THROW(compactified_distance(x, y, FiniteIsometryGroup::generated_by({rotation2(pi / 2)}), LatticeShiftAction(5, 2)),
               std::invalid_argument);
  EXPECT_THROW(LatticeShiftAction(0.0, 2), std::invalid_argument);
}

TEST(Compactified, MatchesExhaustiveWindowSearch) {
  std::mt19937_64 rng(32);
  const auto perms = oracle::all_permutations(3);
  auto s3 = FiniteIsometryGroup::from_permutations(perms);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x(3), y(3);
    for (int i = 0; i < 3; ++i) x[i] = u(rng), y[i] = u(rng);
    const double M = 5.0;
    const double got = compactified_distance(x, y, s3, LatticeShiftAction(M, 3));
    EXPECT_NEAR(got, oracle::window_search(x, y, perms, M, 8), 1e-10) << k;
  }
}

TEST(Compactified, CircleMetricAndCentralBall) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  auto trivial = FiniteIsometryGroup::trivial(1);
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng), y = u(rng);
    EXPECT_NEAR(compactified_distance(v({x}), v({y}), trivial, LatticeShiftAction(3.0, 1)),
                oracle::circle_distance(x, y, 3.0), 1e-12);
  }
  auto s3 = FiniteIsometryGroup::symmetric_group(3);
  const double M = 8.0;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(3, M / 2), y = x;
    auto dx = oracle::random_vector(rng, 3), dy = oracle::random_vector(rng, 3);
    x += dx.normalized() * (M / 4) * std::uniform_real_distribution<double>(0, 1)(rng);
    y += dy.normalized() * (M / 4) * std::uniform_real_distribution<double>(0, 1)(rng);
    EXPECT_NEAR(compactified_distance(x, y, s3, LatticeShiftAction(M, 3)), euclidean_quotient_distance(x, y, s3), 1e-12);
  }
}

TEST(DiagonalQuotient, Examples) {
  const auto circle = GroupSpec::circle(2 * pi);
  auto e = [](double x) { return GroupElement(std::vector<double>{x}); };
  auto s = net(circle, 256);
  DiagonalQuotientPoint a{e(1.0), e(2.0)};
  EXPECT_EQ(diagonal_quotient_distance(a, a, circle, s.points), 0.0);
  EXPECT_NEAR(diagonal_canonical(DiagonalQuotientPoint{e(0.7), e(0.7)}, circle).coordinates()[0], 0.0, 1e-15);
  EXPECT_NEAR(diagonal_canonical(DiagonalQuotientPoint{e(5.0), e(1.0)}, circle).coordinates()[0], 2 * pi - 4.0, 1e-14);

  // dense subgroup grid as ground truth
  auto dense = net(circle, 4096);
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0, 2 * pi);
  for (int k = 0; k < 20; ++k) {
    const double x = u(rng), y = u(rng);
    DiagonalQuotientPoint p{e(0), e(x)}, q{e(0), e(y)};
    const double truth = diagonal_quotient_distance(p, q, circle, dense.points);
    EXPECT_NEAR(truth, oracle::circle_distance(x, y, 2 * pi), 4 * dense.mesh);
    EXPECT_NEAR(diagonal_quotient_distance(p, q, circle, s.points), truth, 4 * s.mesh);
  }
}

TEST(DiagonalQuotient, SU2ConvergesToCanonicalForm) {
  const auto S = GroupSpec::su2();
  std::mt19937_64 rng(35);
  std::vector<std::pair<DiagonalQuotientPoint, DiagonalQuotientPoint>> pairs;
  for (int k = 0; k < 20; ++k)
    pairs.push_back({{random_element(S, rng), random_element(S, rng)}, {random_element(S, rng), random_element(S, rng)}});
  double prev = INFINITY;
  for (std::size_t q : {50u, 100u, 200u, 400u}) {
    auto n = net(S, q);
    double worst = 0.0;
    for (const auto& [a, b] : pairs) {
      const double exact = geodesic_distance(S, diagonal_canonical(a, S), diagonal_canonical(b, S));
      const double approx = diagonal_quotient_distance(a, b, S, n.points);
      // never below the quotient distance, and within the net error above it
      EXPECT_GE(approx, exact - 1e-12);
      EXPECT_LE(approx, exact + 2 * std::numbers::sqrt2 * n.mesh + 1e-12);
      worst = std::max(worst, approx - exact);
    }
    // nets are nested prefixes, so refinement can only lower the minimum
    EXPECT_LE(worst, prev + 1e-12);
    prev = worst;
  }
}
