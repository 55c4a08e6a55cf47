#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "qgband/errors.hpp"

namespace qgband {

/// Side lengths of the closure condition
///   a1 e^{ik1} + a2 e^{ik2} + a3 e^{ik3} + a4 = 0.
struct PolygonSpec {
  std::array<double, 4> a{1.0, 1.0, 1.0, 1.0};
};

enum class PolygonClass { Empty, Point, Curve };

enum class CurveTopology {
  OneCircle,
  TwoCircles,
  TwoCirclesOnePoint,
  TwoCirclesTwoPoints,
  ThreeCirclesPairwise,
  Unclassified,
};

struct CurvePoint {
  std::array<double, 3> k{0.0, 0.0, 0.0};
  double residual = 0.0;
};

struct PolygonCurve {
  PolygonClass classification = PolygonClass::Curve;
  /// Sampled branches; each polyline is a closed loop (last point repeats
  /// the first) unless degenerate.
  std::vector<std::vector<CurvePoint>> branches;
  bool smooth = true;
  CurveTopology topology = CurveTopology::Unclassified;
};

/// Quadrangle solvability: Curve when every side is strictly shorter than
/// the other three together, Empty when some side is strictly longer, Point
/// at equality (forced collinear configuration).
PolygonClass classify(const PolygonSpec& a);

/// The unique solution in the Point case.
std::array<double, 3> point_solution(const PolygonSpec& a);

/// False iff some sign combination ±a1 ±a2 ±a3 ±a4 vanishes (within
/// 1e-12 * sum a): the curve then passes through collinear configurations.
bool smoothness(const PolygonSpec& a);

/// Collinear solutions sigma.(a1,a2,a3) + a4 = 0, mapped to k in {0, pi}^3.
std::vector<std::array<double, 3>> singular_points(const PolygonSpec& a);

/// |a1 e^{ik1} + a2 e^{ik2} + a3 e^{ik3} + a4|.
double closure_residual(const PolygonSpec& a, const std::array<double, 3>& k);

/// Samples the full solution set with roughly m points: for each feasible
/// k1 the remaining angles close a two-link chain, k2 = arg(-w) +- alpha2,
/// k3 = arg(-w) -+ alpha3, w = a4 + a1 e^{ik1}; the +- branches glue where
/// |w| reaches a2+a3 or |a2-a3|.  The |w| = 0 circle (a1 = a4, a2 = a3) is
/// an explicit special branch.
PolygonCurve curve_samples(const PolygonSpec& a, int m);

/// Connected-component count and singular-point matching of the sampled
/// curve; Unclassified when polyline chaining is ambiguous.
CurveTopology topology(const PolygonSpec& a);

/// Torus distance (max over coordinates of circular distance) from k to the
/// nearest curve sample.
double curve_distance(const PolygonCurve& curve, const std::array<double, 3>& k);

/// Closed planar n-gon angle tuples: solutions (k1..k_{n-1}) of
/// sum_{j<n} sides[j] e^{ik_j} + sides[n-1] = 0.  Sampling only (about m
/// tuples; exact solution pair for n = 3); no topology for n > 4.
std::vector<std::vector<double>> ngon_samples(const std::vector<double>& sides,
                                              int m);

/// CSV rows `branch_id,k1,k2,k3,residual`, 12 significant digits.
void write_branch_csv(const PolygonCurve& curve, std::ostream& out);

}  // namespace qgband
