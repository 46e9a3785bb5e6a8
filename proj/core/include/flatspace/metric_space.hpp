#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace flatspace {

/// Dense symmetric matrix of pairwise distances. Zero off-diagonal entries are
/// allowed, so this also represents images of non-injective maps.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// Validates symmetry, zero diagonal and nonnegativity.
  explicit DistanceMatrix(std::vector<std::vector<double>> rows);
  DistanceMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return d_; }
  double max_entry() const noexcept;
  std::vector<std::vector<double>> rows() const;

 private:
  void validate() const;

  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Labeled finite metric space. Points are distinct and the triangle
/// inequality holds up to 1e-12 relative to the largest distance.
class FiniteMetricSpace {
 public:
  static constexpr double kTriangleTolerance = 1e-12;

  FiniteMetricSpace(std::vector<std::string> labels, DistanceMatrix dist);
  FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<double>> dist);

  std::size_t size() const noexcept { return dist_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return dist_(i, j); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const DistanceMatrix& distances() const noexcept { return dist_; }

 private:
  std::vector<std::string> labels_;
  DistanceMatrix dist_;
};

class ScaleFactor {
 public:
  explicit ScaleFactor(double lambda);
  double value() const noexcept { return lambda_; }

 private:
  double lambda_;
};

/// A map between two finite metric spaces given by an index assignment.
class PointMap {
 public:
  PointMap(FiniteMetricSpace domain, FiniteMetricSpace codomain, std::vector<std::size_t> assignment);

  const FiniteMetricSpace& domain() const noexcept { return domain_; }
  const FiniteMetricSpace& codomain() const noexcept { return codomain_; }
  const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }
  bool injective() const;
  /// Only valid for bijections.
  PointMap inverse() const;

 private:
  FiniteMetricSpace domain_;
  FiniteMetricSpace codomain_;
  std::vector<std::size_t> assignment_;
};

FiniteMetricSpace scale_space(const FiniteMetricSpace& x, ScaleFactor lambda);

/// Point (i, j) of the product sits at index i * |Y| + j.
FiniteMetricSpace product_space(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

/// n-fold product; tuples are enumerated in lexicographic (base-|X|) order.
FiniteMetricSpace power_space(const FiniteMetricSpace& x, int n);

double bilipschitz_constant(const PointMap& m);
double lipschitz_constant(const PointMap& m);

/// Bi-Lipschitz constant of the correspondence i -> i between two distance
/// matrices of the same size. A collapsed pair (source > 0, image == 0) gives
/// +infinity. Returns 1 for fewer than two points.
double correspondence_distortion(const DistanceMatrix& source, const DistanceMatrix& image);

}  // namespace flatspace
