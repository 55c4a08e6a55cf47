#include "qgband/edge_transfer.hpp"

#include <cmath>

namespace qgband {

BasisEval basis_eval(double lambda, double x, double q) {
  const double omega = lambda - q;
  BasisEval b;
  if (std::abs(omega) < 1e-6) {
    // Series in u = omega * x^2 keeps full relative accuracy through the
    // sign change of omega; |u| stays tiny for the edge lengths in play.
    const double u = omega * x * x;
    b.c = 1.0 + u * (-1.0 / 2.0 + u * (1.0 / 24.0 + u * (-1.0 / 720.0 + u / 40320.0)));
    b.s = x * (1.0 + u * (-1.0 / 6.0 + u * (1.0 / 120.0 + u * (-1.0 / 5040.0 + u / 362880.0))));
  } else if (omega > 0.0) {
    const double r = std::sqrt(omega);
    b.c = std::cos(r * x);
    b.s = std::sin(r * x) / r;
  } else {
    const double r = std::sqrt(-omega);
    b.c = std::cosh(r * x);
    b.s = std::sinh(r * x) / r;
  }
  b.dc = -omega * b.s;
  b.ds = b.c;
  return b;
}

namespace {

Eigen::Matrix2d segment_matrix(double lambda, double q, double len) {
  const BasisEval b = basis_eval(lambda, len, q);
  Eigen::Matrix2d m;
  m << b.c, b.s, b.dc, b.ds;
  return m;
}

}  // namespace

TransferMatrix transfer_matrix(double lambda, const Edge& e) {
  TransferMatrix t;
  if (e.potential.empty()) {
    t.m = segment_matrix(lambda, 0.0, e.length);
    return t;
  }
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  for (const PotentialSegment& seg : e.potential)
    m = segment_matrix(lambda, seg.value, seg.length) * m;
  t.m = m;
  return t;
}

TransferMatrix transfer_matrix_to(double lambda, const Edge& e, double x) {
  TransferMatrix t;
  if (x <= 0.0) return t;
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  double covered = 0.0;
  if (e.potential.empty()) {
    t.m = segment_matrix(lambda, 0.0, std::min(x, e.length));
    return t;
  }
  for (const PotentialSegment& seg : e.potential) {
    const double take = std::min(seg.length, x - covered);
    if (take <= 0.0) break;
    m = segment_matrix(lambda, seg.value, take) * m;
    covered += take;
    if (covered >= x) break;
  }
  t.m = m;
  return t;
}

}  // namespace qgband
