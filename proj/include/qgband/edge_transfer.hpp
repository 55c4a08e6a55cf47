#pragma once

#include <Eigen/Dense>

#include "qgband/graph.hpp"

namespace qgband {

/// Fundamental solutions of -u'' + q u = lambda u on a constant-q piece,
/// evaluated at x: c(0) = 1, c'(0) = 0 and s(0) = 0, s'(0) = 1.  With
/// omega = lambda - q these satisfy c' = -omega * s and s' = c, for every
/// sign of omega.
struct BasisEval {
  double c = 1.0;
  double dc = 0.0;
  double s = 0.0;
  double ds = 1.0;
};

BasisEval basis_eval(double lambda, double x, double q);

/// Propagates (u, u') along an edge: (u(x), u'(x))^T = M(x) (u(0), u'(0))^T.
/// det M = 1 (Wronskian).
struct TransferMatrix {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();

  double det() const { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }
};

/// Whole-edge transfer matrix: ordered product of the per-segment matrices
/// of the piecewise-constant potential.
TransferMatrix transfer_matrix(double lambda, const Edge& e);

/// Transfer matrix from x = 0 to x (0 <= x <= e.length), splitting the
/// segment containing x.
TransferMatrix transfer_matrix_to(double lambda, const Edge& e, double x);

}  // namespace qgband
