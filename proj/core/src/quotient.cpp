#include "flatspace/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatspace {

EuclideanIsometry::EuclideanIsometry(Eigen::MatrixXd orthogonal, Eigen::VectorXd translation)
    : q_(std::move(orthogonal)), t_(std::move(translation)) {
  if (q_.rows() != q_.cols() || q_.rows() != t_.size() || q_.rows() == 0)
    throw std::invalid_argument("isometry needs a square matrix and a matching translation");
  if (!q_.allFinite() || !t_.allFinite()) throw std::invalid_argument("isometry entries must be finite");
  const Eigen::MatrixXd gram = q_.transpose() * q_;
  if ((gram - Eigen::MatrixXd::Identity(q_.rows(), q_.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("isometry matrix is not orthogonal");
}

EuclideanIsometry EuclideanIsometry::identity(Eigen::Index dim) {
  return EuclideanIsometry(Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim));
}

EuclideanIsometry EuclideanIsometry::permutation(const std::vector<std::size_t>& perm) {
  const auto m = static_cast<Eigen::Index>(perm.size());
  std::vector<bool> seen(perm.size(), false);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size() || seen[perm[i]]) throw std::invalid_argument("not a permutation array");
    seen[perm[i]] = true;
    q(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return EuclideanIsometry(std::move(q), Eigen::VectorXd::Zero(m));
}

EuclideanIsometry EuclideanIsometry::compose(const EuclideanIsometry& other) const {
  if (other.dimension() != dimension()) throw std::invalid_argument("isometry dimensions differ");
  return EuclideanIsometry(q_ * other.q_, q_ * other.t_ + t_);
}

EuclideanIsometry EuclideanIsometry::inverse() const {
  Eigen::MatrixXd qt = q_.transpose();
  Eigen::VectorXd t = -(qt * t_);
  return EuclideanIsometry(std::move(qt), std::move(t));
}

bool EuclideanIsometry::approx_equal(const EuclideanIsometry& other, double tol) const {
  return dimension() == other.dimension() && (q_ - other.q_).cwiseAbs().maxCoeff() <= tol &&
         (t_ - other.t_).cwiseAbs().maxCoeff() <= tol;
}

bool EuclideanIsometry::is_permutation() const {
  if (!t_.isZero(0.0)) return false;
  for (Eigen::Index i = 0; i < q_.rows(); ++i)
    for (Eigen::Index j = 0; j < q_.cols(); ++j)
      if (q_(i, j) != 0.0 && q_(i, j) != 1.0) return false;
  return true;  // orthogonality already forces one 1 per row and column
}

// ---------------------------------------------------------------------------

namespace {

std::size_t find_element(const std::vector<EuclideanIsometry>& elems, const EuclideanIsometry& g, double tol) {
  for (std::size_t k = 0; k < elems.size(); ++k)
    if (elems[k].approx_equal(g, tol)) return k;
  return elems.size();
}

}  // namespace

FiniteIsometryGroup::FiniteIsometryGroup(std::vector<EuclideanIsometry> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("isometry group must be nonempty");
  const Eigen::Index dim = elements_.front().dimension();
  for (const auto& g : elements_)
    if (g.dimension() != dim) throw std::invalid_argument("isometry group elements have different dimensions");
  const auto n = elements_.size();
  if (find_element(elements_, EuclideanIsometry::identity(dim), kClosureTolerance) == n)
    throw std::invalid_argument("isometry group does not contain the identity");
  for (const auto& g : elements_) {
    if (find_element(elements_, g.inverse(), kClosureTolerance) == n)
      throw std::invalid_argument("isometry group is not closed under inversion");
    for (const auto& h : elements_)
      if (find_element(elements_, g.compose(h), kClosureTolerance) == n)
        throw std::invalid_argument("isometry group is not closed under composition");
  }
}

FiniteIsometryGroup FiniteIsometryGroup::from_permutations(const std::vector<std::vector<std::size_t>>& perms) {
  std::vector<EuclideanIsometry> elems;
  elems.reserve(perms.size());
  for (const auto& p : perms) elems.push_back(EuclideanIsometry::permutation(p));
  return FiniteIsometryGroup(std::move(elems));
}

FiniteIsometryGroup FiniteIsometryGroup::generated_by(const std::vector<EuclideanIsometry>& generators,
                                                      std::size_t max_order) {
  if (generators.empty()) throw std::invalid_argument("need at least one generator");
  std::vector<EuclideanIsometry> elems{EuclideanIsometry::identity(generators.front().dimension())};
  for (std::size_t k = 0; k < elems.size(); ++k)
    for (const auto& s : generators) {
      EuclideanIsometry next = s.compose(elems[k]);
      if (find_element(elems, next, kClosureTolerance) == elems.size()) {
        elems.push_back(std::move(next));
        if (elems.size() > max_order) throw std::invalid_argument("generated group exceeds the order limit");
      }
    }
  return FiniteIsometryGroup(std::move(elems));
}

FiniteIsometryGroup FiniteIsometryGroup::symmetric_group(std::size_t m) {
  if (m == 0) throw std::invalid_argument("symmetric group needs m >= 1");
  std::vector<std::size_t> p(m);
  for (std::size_t i = 0; i < m; ++i) p[i] = i;
  std::vector<std::vector<std::size_t>> all;
  do {
    all.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return from_permutations(all);
}

FiniteIsometryGroup FiniteIsometryGroup::trivial(Eigen::Index dim) {
  return FiniteIsometryGroup({EuclideanIsometry::identity(dim)});
}

LatticeShiftAction::LatticeShiftAction(double M, std::size_t m) : scale(M), dimension(m) {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("lattice scale must be positive");
  if (m == 0) throw std::invalid_argument("lattice dimension must be positive");
}

// ---------------------------------------------------------------------------

double euclidean_quotient_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FiniteIsometryGroup& G) {
  if (x.size() != y.size() || x.size() != G.dimension()) throw std::invalid_argument("dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : G.elements()) best = std::min(best, (x - g.apply(y)).norm());
  return best;
}

double compactified_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FiniteIsometryGroup& perms,
                             const LatticeShiftAction& shifts) {
  const auto m = static_cast<Eigen::Index>(shifts.dimension);
  if (x.size() != m || y.size() != m || perms.dimension() != m) throw std::invalid_argument("dimension mismatch");
  const double M = shifts.scale;
  auto reduce = [M](const Eigen::VectorXd& v) {
    Eigen::VectorXd r = v;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      r[i] = std::fmod(r[i], M);
      if (r[i] < 0.0) r[i] += M;
      if (r[i] >= M) r[i] -= M;
    }
    return r;
  };
  const Eigen::VectorXd xr = reduce(x), yr = reduce(y);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : perms.elements()) {
    if (!s.is_permutation()) throw std::invalid_argument("compactification needs a coordinate permutation group");
    const Eigen::VectorXd z = xr - s.apply(yr);
    // Window W = ceil(|z|_inf / M) + 1; the objective is a sum over
    // coordinates, so the best shift is found coordinate by coordinate.
    const auto window = static_cast<long>(std::ceil(z.cwiseAbs().maxCoeff() / M)) + 1;
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double c = std::numeric_limits<double>::infinity();
      for (long a = -window; a <= window; ++a) {
        const double r = z[i] - M * static_cast<double>(a);
        c = std::min(c, r * r);
      }
      total += c;
    }
    best = std::min(best, std::sqrt(total));
  }
  return best;
}

double diagonal_quotient_distance(const DiagonalQuotientPoint& a, const DiagonalQuotientPoint& b, const GroupSpec& G,
                                  const std::vector<GroupElement>& acting) {
  if (acting.empty()) throw std::invalid_argument("acting set must be nonempty");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : acting) {
    const double d1 = geodesic_distance(G, group_op(G, g, a.first), b.first);
    const double d2 = geodesic_distance(G, group_op(G, g, a.second), b.second);
    best = std::min(best, 2.0 * d1 * d1 + 2.0 * d2 * d2);
  }
  return std::sqrt(best);
}

GroupElement diagonal_canonical(const DiagonalQuotientPoint& a, const GroupSpec& G) {
  return group_op(G, inverse(G, a.first), a.second);
}

}  // namespace flatspace
