#include "flatspace/transport.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace flatspace {

bool Coupling::feasible_for(std::span<const double> mu, std::span<const double> nu, double tol) const {
  if (plan.rows() != static_cast<Eigen::Index>(mu.size()) || plan.cols() != static_cast<Eigen::Index>(nu.size()))
    return false;
  if ((plan.array() < -tol).any()) return false;
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    if (std::abs(plan.row(i).sum() - mu[static_cast<std::size_t>(i)]) > tol) return false;
  for (Eigen::Index j = 0; j < plan.cols(); ++j)
    if (std::abs(plan.col(j).sum() - nu[static_cast<std::size_t>(j)]) > tol) return false;
  return true;
}

namespace {

void check_weights(std::span<const double> w, const char* which) {
  if (w.empty()) throw std::invalid_argument(std::string(which) + " measure is empty");
  long double total = 0.0L;
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(which) + " weights must be positive");
    total += x;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > kWeightTolerance)
    throw std::invalid_argument(std::string(which) + " weights must sum to 1");
}

struct BasicCell {
  std::size_t row;
  std::size_t col;
  double flow;
};

// Transportation simplex on the bipartite graph rows -> columns. The basis is
// a spanning tree of m + n - 1 cells; degenerate cells carry zero flow.
class TransportationSimplex {
 public:
  TransportationSimplex(std::span<const double> supply, std::span<const double> demand, const Eigen::MatrixXd& cost)
      : m_(supply.size()), n_(demand.size()), cost_(cost), u_(m_), v_(n_) {
    north_west_corner(supply, demand);
    const double scale = std::max(cost_.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    eps_ = 1e-13 * scale;
  }

  std::size_t run() {
    std::size_t pivots = 0, degenerate_streak = 0;
    const std::size_t bland_after = 2 * (m_ + n_);
    const std::size_t limit = 100 * (m_ + n_) * (m_ + n_) + 1000;
    while (true) {
      build_tree();
      compute_potentials();
      const bool bland = degenerate_streak > bland_after;
      std::size_t ei = 0, ej = 0;
      if (!entering(bland, ei, ej)) break;
      const bool degenerate = pivot(ei, ej);
      degenerate_streak = degenerate ? degenerate_streak + 1 : 0;
      if (++pivots > limit) throw std::runtime_error("transportation simplex failed to converge");
    }
    return pivots;
  }

  Eigen::MatrixXd plan() const {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
    for (const auto& c : basis_) q(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col)) += c.flow;
    return q;
  }

 private:
  double c(std::size_t i, std::size_t j) const {
    return cost_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  void north_west_corner(std::span<const double> supply, std::span<const double> demand) {
    std::size_t i = 0, j = 0;
    double ra = supply[0], rb = demand[0];
    while (true) {
      const double f = std::max(0.0, std::min(ra, rb));
      basis_.push_back({i, j, f});
      ra -= f;
      rb -= f;
      if (i + 1 == m_ && j + 1 == n_) break;
      if ((ra <= rb && i + 1 < m_) || j + 1 == n_) {
        ra = supply[++i];
      } else {
        rb = demand[++j];
      }
    }
  }

  // Nodes 0..m-1 are rows, m..m+n-1 are columns; adjacency stores basis indices.
  void build_tree() {
    adj_.assign(m_ + n_, {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adj_[basis_[k].row].push_back(k);
      adj_[m_ + basis_[k].col].push_back(k);
    }
  }

  // Fixed variable order for tie-breaking (Bland's rule needs one).
  std::size_t key(std::size_t k) const { return basis_[k].row * n_ + basis_[k].col; }

  std::size_t other_end(std::size_t k, std::size_t node) const {
    return node < m_ ? m_ + basis_[k].col : basis_[k].row;
  }

  void compute_potentials() {
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    u_[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t k : adj_[node]) {
        const std::size_t next = other_end(k, node);
        if (seen[next]) continue;
        seen[next] = 1;
        const auto& cell = basis_[k];
        if (next >= m_) {
          v_[cell.col] = c(cell.row, cell.col) - u_[cell.row];
        } else {
          u_[cell.row] = c(cell.row, cell.col) - v_[cell.col];
        }
        stack.push_back(next);
      }
    }
  }

  bool entering(bool bland, std::size_t& ei, std::size_t& ej) const {
    double best = -eps_;
    bool found = false;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double r = c(i, j) - u_[i] - v_[j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
          found = true;
          if (bland) return true;
        }
      }
    return found;
  }

  // Returns true for a degenerate (zero step) pivot.
  bool pivot(std::size_t ei, std::size_t ej) {
    // Tree path from row ei to column ej.
    const std::size_t start = ei, goal = m_ + ej;
    std::vector<std::size_t> parent_edge(m_ + n_, std::numeric_limits<std::size_t>::max());
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue{start};
    seen[start] = 1;
    for (std::size_t h = 0; h < queue.size() && !seen[goal]; ++h) {
      const std::size_t node = queue[h];
      for (std::size_t k : adj_[node]) {
        const std::size_t next = other_end(k, node);
        if (seen[next]) continue;
        seen[next] = 1;
        parent_edge[next] = k;
        queue.push_back(next);
      }
    }
    // Walk back from the column: the first cell on the cycle after the
    // entering cell loses flow, then signs alternate.
    std::vector<std::size_t> path;
    for (std::size_t node = goal; node != start;) {
      const std::size_t k = parent_edge[node];
      path.push_back(k);
      node = other_end(k, node);
    }
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = std::numeric_limits<std::size_t>::max();
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const std::size_t k = path[p];
      if (basis_[k].flow < theta || (basis_[k].flow == theta && key(k) < key(leaving))) {
        theta = basis_[k].flow;
        leaving = k;
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      auto& cell = basis_[path[p]];
      cell.flow = (p % 2 == 0) ? std::max(0.0, cell.flow - theta) : cell.flow + theta;
    }
    basis_[leaving] = {ei, ej, theta};
    return theta == 0.0;
  }

  std::size_t m_, n_;
  const Eigen::MatrixXd& cost_;
  std::vector<BasicCell> basis_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> u_, v_;
  double eps_ = 0.0;
};

}  // namespace

TransportPlan solve_transportation(std::span<const double> mu, std::span<const double> nu, const Eigen::MatrixXd& cost) {
  check_weights(mu, "source");
  check_weights(nu, "target");
  if (cost.rows() != static_cast<Eigen::Index>(mu.size()) || cost.cols() != static_cast<Eigen::Index>(nu.size()))
    throw std::invalid_argument("cost matrix shape does not match the measures");
  if (!cost.allFinite()) throw std::invalid_argument("transport costs must be finite");

  TransportationSimplex simplex(mu, nu, cost);
  TransportPlan out;
  out.pivots = simplex.run();
  out.coupling.plan = simplex.plan();
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const double q = out.coupling.plan(i, j);
      if (q != 0.0) total += static_cast<long double>(q) * cost(i, j);
    }
  out.cost = static_cast<double>(total);
  return out;
}

namespace {

Eigen::MatrixXd squared_costs(std::size_t m, std::size_t n, const DistanceOracle& metric) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = metric(i, j);
      if (!(d >= 0.0) || !std::isfinite(d))
        throw std::invalid_argument("metric returned an invalid distance for atoms (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d * d;
    }
  return c;
}

bool uniform_equal(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) return false;
  const double w = mu.front();
  auto same = [w](double x) { return std::abs(x - w) <= kWeightTolerance; };
  return std::all_of(mu.begin(), mu.end(), same) && std::all_of(nu.begin(), nu.end(), same);
}

}  // namespace

TransportResult w2_discrete(std::span<const double> mu, std::span<const double> nu, const DistanceOracle& metric) {
  check_weights(mu, "source");
  check_weights(nu, "target");
  const Eigen::MatrixXd cost = squared_costs(mu.size(), nu.size(), metric);
  TransportResult out;
  if (uniform_equal(mu, nu)) {
    const auto n = mu.size();
    const auto match = solve_assignment(cost);
    out.coupling.plan = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      out.coupling.plan(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(match.permutation[i])) = mu[i];
    out.distance = std::sqrt(std::max(0.0, match.cost / static_cast<double>(n)));
    return out;
  }
  auto plan = solve_transportation(mu, nu, cost);
  out.distance = std::sqrt(std::max(0.0, plan.cost));
  out.coupling = std::move(plan.coupling);
  return out;
}

double perm_quotient_distance(std::size_t n, const DistanceOracle& metric) {
  if (n == 0) return 0.0;
  const auto match = solve_assignment(squared_costs(n, n, metric));
  return std::sqrt(std::max(0.0, match.cost));
}

}  // namespace flatspace
