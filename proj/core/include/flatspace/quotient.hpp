#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "flatspace/lie_group.hpp"

namespace flatspace {

/// x -> Q x + t with Q orthogonal.
class EuclideanIsometry {
 public:
  EuclideanIsometry(Eigen::MatrixXd orthogonal, Eigen::VectorXd translation);
  static EuclideanIsometry identity(Eigen::Index dim);
  /// Coordinate permutation sending coordinate i to position perm[i].
  static EuclideanIsometry permutation(const std::vector<std::size_t>& perm);

  Eigen::Index dimension() const noexcept { return q_.rows(); }
  const Eigen::MatrixXd& orthogonal() const noexcept { return q_; }
  const Eigen::VectorXd& translation() const noexcept { return t_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return q_ * x + t_; }
  /// (this * other)(x) = this(other(x)).
  EuclideanIsometry compose(const EuclideanIsometry& other) const;
  EuclideanIsometry inverse() const;
  bool approx_equal(const EuclideanIsometry& other, double tol) const;
  bool is_permutation() const;

 private:
  Eigen::MatrixXd q_;
  Eigen::VectorXd t_;
};

/// Finite group of Euclidean isometries, validated on construction: contains
/// the identity and is closed under composition and inversion (tolerance 1e-9).
class FiniteIsometryGroup {
 public:
  static constexpr double kClosureTolerance = 1e-9;

  explicit FiniteIsometryGroup(std::vector<EuclideanIsometry> elements);
  /// Elements given as permutation arrays, expanded to permutation matrices.
  static FiniteIsometryGroup from_permutations(const std::vector<std::vector<std::size_t>>& perms);
  /// Smallest group containing the generators; throws past `max_order`.
  static FiniteIsometryGroup generated_by(const std::vector<EuclideanIsometry>& generators,
                                          std::size_t max_order = 100000);
  static FiniteIsometryGroup symmetric_group(std::size_t m);
  static FiniteIsometryGroup trivial(Eigen::Index dim);

  std::size_t order() const noexcept { return elements_.size(); }
  Eigen::Index dimension() const noexcept { return elements_.front().dimension(); }
  const std::vector<EuclideanIsometry>& elements() const noexcept { return elements_; }

 private:
  std::vector<EuclideanIsometry> elements_;
};

/// Z^m acting on R^m by shifts scaled by M.
struct LatticeShiftAction {
  double scale;
  std::size_t dimension;
  LatticeShiftAction(double M, std::size_t m);
};

/// Orbit (g1, g2) ~ (g g1, g g2) in the diagonal quotient of sqrt2 G x sqrt2 G.
struct DiagonalQuotientPoint {
  GroupElement first;
  GroupElement second;
};

/// min over g in G of |x - g(y)|.
double euclidean_quotient_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FiniteIsometryGroup& G);

/// Distance in R^m / (perms x M Z^m). `perms` must consist of permutation
/// matrices with zero translation; x and y are reduced into [0, M)^m first.
double compactified_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FiniteIsometryGroup& perms,
                             const LatticeShiftAction& shifts);

/// min over g in `acting` of sqrt(2 d(g a1, b1)^2 + 2 d(g a2, b2)^2).
double diagonal_quotient_distance(const DiagonalQuotientPoint& a, const DiagonalQuotientPoint& b, const GroupSpec& G,
                                  const std::vector<GroupElement>& acting);

/// g1^{-1} g2: the point of G isometric to the orbit of (g1, g2).
GroupElement diagonal_canonical(const DiagonalQuotientPoint& a, const GroupSpec& G);

}  // namespace flatspace
