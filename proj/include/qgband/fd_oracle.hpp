#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qgband/graph.hpp"

namespace qgband {

/// Second-order finite-difference discretization of the graph eigenproblem,
/// assembled from the quadratic form so that Hermiticity is exact.  The
/// generalized problem Q u = lambda D u (D = lumped masses) is reduced to
/// the standard one via H = D^{-1/2} Q D^{-1/2}.
struct DiscreteOperator {
  Eigen::MatrixXcd h;
  bool real = true;              // no complex phase weights anywhere
  std::vector<double> mass;      // lumped weight per unknown
  /// Row of each grid node, edge-major: nodes[e][i] for the i-th node of
  /// edge e (including both endpoints); -1 marks Dirichlet-eliminated nodes.
  std::vector<std::vector<int>> nodes;
  int size = 0;
};

DiscreteOperator discretize(const CompactGraph& g, int points_per_unit);

/// Lowest `count` eigenvalues of the discretized problem, ascending.
std::vector<double> oracle_eigenvalues(const CompactGraph& g,
                                       int points_per_unit, int count);

}  // namespace qgband
