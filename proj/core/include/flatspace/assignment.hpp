#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace flatspace {

struct AssignmentResult {
  /// permutation[i] is the column matched to row i.
  std::vector<std::size_t> permutation;
  double cost = 0.0;
};

/// Exact minimum-cost perfect matching on a square matrix.
///
/// Shortest augmenting paths with row/column potentials (the Jonker-Volgenant
/// family), O(n^3). The returned cost is re-accumulated from the original
/// entries in extended precision.
AssignmentResult solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace flatspace
