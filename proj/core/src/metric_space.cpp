#include "flatspace/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatspace {

DistanceMatrix::DistanceMatrix(std::vector<std::vector<double>> rows) : n_(rows.size()) {
  d_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw std::invalid_argument("distance matrix is not square");
    d_.insert(d_.end(), row.begin(), row.end());
  }
  validate();
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> row_major) : n_(n), d_(std::move(row_major)) {
  if (d_.size() != n_ * n_) throw std::invalid_argument("distance matrix has wrong number of entries");
  validate();
}

void DistanceMatrix::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("distances must be finite and nonnegative");
      if (v != (*this)(j, i)) throw std::invalid_argument("distance matrix is not symmetric");
    }
  }
}

double DistanceMatrix::max_entry() const noexcept {
  return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
}

std::vector<std::vector<double>> DistanceMatrix::rows() const {
  std::vector<std::vector<double>> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i].assign(d_.begin() + i * n_, d_.begin() + (i + 1) * n_);
  return out;
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, DistanceMatrix dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  const std::size_t n = dist_.size();
  if (labels_.size() != n) throw std::invalid_argument("label count does not match distance matrix");
  if (n == 0) throw std::invalid_argument("metric space must have at least one point");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dist_(i, j) <= 0.0)
        throw std::invalid_argument("points '" + labels_[i] + "' and '" + labels_[j] + "' coincide");
  const double tol = kTriangleTolerance * dist_.max_entry();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (dist_(i, k) > dist_(i, j) + dist_(j, k) + tol)
          throw std::invalid_argument("triangle inequality fails at ('" + labels_[i] + "', '" + labels_[j] +
                                      "', '" + labels_[k] + "')");
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<double>> dist)
    : FiniteMetricSpace(std::move(labels), DistanceMatrix(std::move(dist))) {}

ScaleFactor::ScaleFactor(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("scale factor must be positive");
}

PointMap::PointMap(FiniteMetricSpace domain, FiniteMetricSpace codomain, std::vector<std::size_t> assignment)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), assignment_(std::move(assignment)) {
  if (assignment_.size() != domain_.size()) throw std::invalid_argument("assignment must cover every domain point");
  for (std::size_t a : assignment_)
    if (a >= codomain_.size()) throw std::invalid_argument("assignment index out of range");
}

bool PointMap::injective() const {
  std::vector<bool> seen(codomain_.size(), false);
  for (std::size_t a : assignment_) {
    if (seen[a]) return false;
    seen[a] = true;
  }
  return true;
}

PointMap PointMap::inverse() const {
  if (domain_.size() != codomain_.size() || !injective()) throw std::invalid_argument("map is not a bijection");
  std::vector<std::size_t> inv(assignment_.size());
  for (std::size_t i = 0; i < assignment_.size(); ++i) inv[assignment_[i]] = i;
  return PointMap(codomain_, domain_, std::move(inv));
}

FiniteMetricSpace scale_space(const FiniteMetricSpace& x, ScaleFactor lambda) {
  const auto src = x.distances().data();
  std::vector<double> d(src.begin(), src.end());
  for (double& v : d) v *= lambda.value();
  return FiniteMetricSpace(x.labels(), DistanceMatrix(x.size(), std::move(d)));
}

FiniteMetricSpace product_space(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  const std::size_t nx = x.size(), ny = y.size(), n = nx * ny;
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) labels.push_back("(" + x.labels()[i] + "," + y.labels()[j] + ")");
  std::vector<double> d(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double dx = x(a / ny, b / ny), dy = y(a % ny, b % ny);
      d[a * n + b] = std::sqrt(dx * dx + dy * dy);
    }
  return FiniteMetricSpace(std::move(labels), DistanceMatrix(n, std::move(d)));
}

FiniteMetricSpace power_space(const FiniteMetricSpace& x, int n) {
  if (n <= 0) throw std::invalid_argument("power must be positive");
  FiniteMetricSpace out = x;
  for (int k = 1; k < n; ++k) out = product_space(out, x);
  return out;
}

namespace {

// Largest ratio d_to / d_from over pairs; a pair with d_from == 0 and d_to > 0
// is an infinite stretch.
double max_stretch(const DistanceMatrix& from, const DistanceMatrix& to, std::span<const std::size_t> idx) {
  double best = 0.0;
  const std::size_t n = from.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = from(i, j), b = to(idx[i], idx[j]);
      if (a == 0.0) {
        if (b > 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      best = std::max(best, b / a);
    }
  return best;
}

std::vector<std::size_t> identity_index(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace

double lipschitz_constant(const PointMap& m) {
  if (m.domain().size() < 2) throw std::invalid_argument("Lipschitz constant needs at least two domain points");
  return max_stretch(m.domain().distances(), m.codomain().distances(), m.assignment());
}

double bilipschitz_constant(const PointMap& m) {
  const auto& dom = m.domain().distances();
  const auto& cod = m.codomain().distances();
  const auto& a = m.assignment();
  const std::size_t n = dom.size();
  double expand = 0.0, shrink = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = dom(i, j), dy = cod(a[i], a[j]);
      if (dy == 0.0) return std::numeric_limits<double>::infinity();
      expand = std::max(expand, dy / dx);
      shrink = std::max(shrink, dx / dy);
    }
  return std::max({1.0, expand, shrink});
}

double correspondence_distortion(const DistanceMatrix& source, const DistanceMatrix& image) {
  if (source.size() != image.size()) throw std::invalid_argument("correspondence needs equal sizes");
  const auto idx = identity_index(source.size());
  const double expand = max_stretch(source, image, idx);
  const double shrink = max_stretch(image, source, idx);
  return std::max({1.0, expand, shrink});
}

}  // namespace flatspace
