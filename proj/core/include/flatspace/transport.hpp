#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flatspace/assignment.hpp"

namespace flatspace {

inline constexpr double kWeightTolerance = 1e-12;
inline constexpr double kMarginalTolerance = 1e-10;

/// Finitely supported probability measure over an arbitrary atom type.
template <class Atom>
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Atom> atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty()) throw std::invalid_argument("measure needs at least one atom");
    if (atoms_.size() != weights_.size()) throw std::invalid_argument("atom and weight counts differ");
    long double total = 0.0L;
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be positive");
      total += w;
    }
    if (std::abs(static_cast<double>(total) - 1.0) > kWeightTolerance)
      throw std::invalid_argument("weights must sum to 1");
  }

  static DiscreteMeasure dirac(Atom a) { return DiscreteMeasure({std::move(a)}, {1.0}); }

  /// Weight 1/N on each listed atom; repeated atoms are kept as separate entries.
  static DiscreteMeasure uniform(std::vector<Atom> atoms) {
    const std::size_t n = atoms.size();
    if (n == 0) throw std::invalid_argument("measure needs at least one atom");
    return DiscreteMeasure(std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool is_uniform() const noexcept {
    for (double w : weights_)
      if (w != weights_.front()) return false;
    return true;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
};

using Point = Eigen::VectorXd;
using EuclideanMeasure = DiscreteMeasure<Point>;
/// Ordered N-tuple of base-space points; S_N acts by reordering.
template <class Atom>
using TuplePoint = std::vector<Atom>;

inline double euclidean_distance(const Point& a, const Point& b) { return (a - b).norm(); }

/// Rows indexed by atoms of the source measure, columns by the target.
struct Coupling {
  Eigen::MatrixXd plan;
  bool feasible_for(std::span<const double> mu, std::span<const double> nu, double tol = kMarginalTolerance) const;
};

struct TransportResult {
  double distance = 0.0;
  Coupling coupling;
};

/// Distance between atom i of the source and atom j of the target.
using DistanceOracle = std::function<double(std::size_t, std::size_t)>;

/// Exact transportation problem min <C, q> over couplings q of mu and nu.
/// Network simplex on the complete bipartite graph; returns the optimal cost
/// (not its square root) together with the plan.
struct TransportPlan {
  double cost = 0.0;
  Coupling coupling;
  std::size_t pivots = 0;
};
TransportPlan solve_transportation(std::span<const double> mu, std::span<const double> nu, const Eigen::MatrixXd& cost);

/// 2-Wasserstein distance between weight vectors with distances supplied by
/// the oracle. Equal-count uniform inputs go through the assignment solver.
TransportResult w2_discrete(std::span<const double> mu, std::span<const double> nu, const DistanceOracle& metric);

template <class Atom, class Metric>
TransportResult w2_discrete(const DiscreteMeasure<Atom>& mu, const DiscreteMeasure<Atom>& nu, Metric&& metric) {
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  return w2_discrete(mu.weights(), nu.weights(),
                     [&](std::size_t i, std::size_t j) -> double { return metric(a[i], b[j]); });
}

/// min over permutations s of sqrt(sum_i d(x_i, y_s(i))^2), unnormalised.
double perm_quotient_distance(std::size_t n, const DistanceOracle& metric);

template <class Atom, class Metric>
double perm_quotient_distance(const TuplePoint<Atom>& x, const TuplePoint<Atom>& y, Metric&& metric) {
  if (x.size() != y.size()) throw std::invalid_argument("tuples must have equal length");
  return perm_quotient_distance(x.size(), [&](std::size_t i, std::size_t j) -> double { return metric(x[i], y[j]); });
}

/// Uniform empirical measure of a tuple; identical atoms merge their weights.
template <class Atom>
DiscreteMeasure<Atom> ivanov_embed(const TuplePoint<Atom>& x) {
  if (x.empty()) throw std::invalid_argument("tuple must be nonempty");
  std::vector<Atom> atoms;
  std::vector<std::size_t> counts;
  for (const Atom& p : x) {
    std::size_t k = 0;
    while (k < atoms.size() && !(atoms[k] == p)) ++k;
    if (k == atoms.size()) {
      atoms.push_back(p);
      counts.push_back(1);
    } else {
      ++counts[k];
    }
  }
  std::vector<double> weights(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    weights[k] = static_cast<double>(counts[k]) / static_cast<double>(x.size());
  return DiscreteMeasure<Atom>(std::move(atoms), std::move(weights));
}

/// The inclusion of 2^n-tuples into 2^(n+1)-tuples: every entry repeated twice.
template <class Atom>
TuplePoint<Atom> refine_tuple(const TuplePoint<Atom>& x) {
  TuplePoint<Atom> out;
  out.reserve(2 * x.size());
  for (const Atom& p : x) {
    out.push_back(p);
    out.push_back(p);
  }
  return out;
}

/// Scale that makes ivanov_embed isometric: W2 of the embedded measures equals
/// perm_quotient_distance / sqrt(N).
inline double ivanov_normalisation(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

}  // namespace flatspace
