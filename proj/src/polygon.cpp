#include "qgband/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "qgband/format.hpp"
#include "qgband/graph.hpp"

namespace qgband {

namespace {

double side_sum(const PolygonSpec& a) {
  return a.a[0] + a.a[1] + a.a[2] + a.a[3];
}

void check_sides(const PolygonSpec& a) {
  for (double s : a.a)
    if (!(s > 0.0) || !std::isfinite(s))
      throw Error(ErrorCode::NonPositiveLength,
                  "polygon sides must be positive");
}

std::complex<double> unit(double t) {
  return {std::cos(t), std::sin(t)};
}

double circular_distance(double x, double y) {
  return std::abs(std::remainder(x - y, 2.0 * M_PI));
}

}  // namespace

PolygonClass classify(const PolygonSpec& a) {
  check_sides(a);
  bool point = false;
  for (int m = 0; m < 4; ++m) {
    double others = 0.0;
    for (int j = 0; j < 4; ++j)
      if (j != m) others += a.a[j];
    if (a.a[m] > others) return PolygonClass::Empty;
    if (a.a[m] == others) point = true;
  }
  return point ? PolygonClass::Point : PolygonClass::Curve;
}

std::array<double, 3> point_solution(const PolygonSpec& a) {
  if (classify(a) != PolygonClass::Point)
    throw Error(ErrorCode::NotACurve, "sides do not describe a point case");
  for (int m = 0; m < 4; ++m) {
    double others = 0.0;
    for (int j = 0; j < 4; ++j)
      if (j != m) others += a.a[j];
    if (a.a[m] == others) {
      std::array<double, 3> k{0.0, 0.0, 0.0};
      if (m == 3) {
        k = {M_PI, M_PI, M_PI};
      } else {
        k[m] = M_PI;
      }
      return k;
    }
  }
  throw Error(ErrorCode::NotACurve, "unreachable");
}

bool smoothness(const PolygonSpec& a) {
  check_sides(a);
  const double tol = 1e-12 * side_sum(a);
  for (int s = 0; s < 8; ++s) {
    const double v = (s & 1 ? -1.0 : 1.0) * a.a[0] +
                     (s & 2 ? -1.0 : 1.0) * a.a[1] +
                     (s & 4 ? -1.0 : 1.0) * a.a[2] + a.a[3];
    if (std::abs(v) <= tol) return false;
  }
  return true;
}

std::vector<std::array<double, 3>> singular_points(const PolygonSpec& a) {
  check_sides(a);
  const double tol = 1e-12 * side_sum(a);
  std::vector<std::array<double, 3>> pts;
  for (int s = 0; s < 8; ++s) {
    const double s1 = s & 1 ? -1.0 : 1.0;
    const double s2 = s & 2 ? -1.0 : 1.0;
    const double s3 = s & 4 ? -1.0 : 1.0;
    if (std::abs(s1 * a.a[0] + s2 * a.a[1] + s3 * a.a[2] + a.a[3]) <= tol)
      pts.push_back({s1 < 0 ? M_PI : 0.0, s2 < 0 ? M_PI : 0.0,
                     s3 < 0 ? M_PI : 0.0});
  }
  return pts;
}

double closure_residual(const PolygonSpec& a, const std::array<double, 3>& k) {
  const std::complex<double> z = a.a[0] * unit(k[0]) + a.a[1] * unit(k[1]) +
                                 a.a[2] * unit(k[2]) + a.a[3];
  return std::abs(z);
}

namespace {

double point_distance(const std::array<double, 3>& x,
                      const std::array<double, 3>& y) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d = std::max(d, circular_distance(x[i], y[i]));
  return d;
}

double branch_mesh(const std::vector<CurvePoint>& b) {
  double mesh = 0.0;
  for (size_t i = 1; i < b.size(); ++i)
    mesh = std::max(mesh, point_distance(b[i - 1].k, b[i].k));
  return mesh;
}

double branch_gap(const std::vector<CurvePoint>& x,
                  const std::vector<CurvePoint>& y) {
  double gap = std::numeric_limits<double>::infinity();
  for (const CurvePoint& p : x)
    for (const CurvePoint& q : y) gap = std::min(gap, point_distance(p.k, q.k));
  return gap;
}

CurveTopology classify_topology(const PolygonSpec& a,
                                const PolygonCurve& curve) {
  const int nb = static_cast<int>(curve.branches.size());
  if (nb == 0) return CurveTopology::Unclassified;

  double mesh = 0.0;
  for (const auto& b : curve.branches) mesh = std::max(mesh, branch_mesh(b));
  const double chain_tol = 3.0 * mesh;

  // Union branches that approach within the chaining tolerance.
  std::vector<int> comp(nb);
  std::iota(comp.begin(), comp.end(), 0);
  const auto root = [&](int i) {
    while (comp[i] != i) i = comp[i] = comp[comp[i]];
    return i;
  };
  std::vector<std::vector<double>> gaps(nb, std::vector<double>(nb, 0.0));
  for (int i = 0; i < nb; ++i)
    for (int j = i + 1; j < nb; ++j) {
      gaps[i][j] = branch_gap(curve.branches[i], curve.branches[j]);
      if (gaps[i][j] <= chain_tol) comp[root(i)] = root(j);
    }
  int components = 0;
  for (int i = 0; i < nb; ++i)
    if (root(i) == i) ++components;

  // Ambiguity guard: a separation barely above the tolerance is not a
  // trustworthy component count.
  for (int i = 0; i < nb; ++i)
    for (int j = i + 1; j < nb; ++j)
      if (root(i) != root(j) && gaps[i][j] <= 2.0 * chain_tol)
        return CurveTopology::Unclassified;

  if (curve.smooth) {
    if (components == 1) return CurveTopology::OneCircle;
    if (components == 2) return CurveTopology::TwoCircles;
    return CurveTopology::Unclassified;
  }

  const auto sing = singular_points(a);
  // Singular points must lie on the sampled curve.
  for (const auto& p : sing) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : curve.branches)
      for (const CurvePoint& q : b)
        best = std::min(best, point_distance(p, q.k));
    if (best > chain_tol + 1e-9) return CurveTopology::Unclassified;
  }
  if (components != 1) return CurveTopology::Unclassified;
  switch (sing.size()) {
    case 1:
      return CurveTopology::TwoCirclesOnePoint;
    case 2:
      return CurveTopology::TwoCirclesTwoPoints;
    case 3:
      return CurveTopology::ThreeCirclesPairwise;
    default:
      return CurveTopology::Unclassified;
  }
}

// Kahan's expression for the triangle area stays accurate for needles,
// where Heron's raw form cancels.
double triangle_area(double x, double y, double z) {
  if (x < y) std::swap(x, y);
  if (y < z) std::swap(y, z);
  if (x < y) std::swap(x, y);
  const double f = std::max(z - (x - y), 0.0);  // tiny negative = rounding
  return 0.25 * std::sqrt((x + (y + z)) * f * (z + (x - y)) * (x + (y - z)));
}

// Two-link closure at fixed k1: fills k2, k3 for elbow sign +1 or -1.
// Requires |a2 - a3| <= |w| <= a2 + a3 with w = a4 + a1 e^{ik1}.
CurvePoint elbow_point(const PolygonSpec& a, double k1, int sign) {
  const std::complex<double> w = a.a[3] + a.a[0] * unit(k1);
  const double r = std::abs(w);
  const double phi = std::arg(-w);
  const double c2 =
      std::clamp((r * r + a.a[1] * a.a[1] - a.a[2] * a.a[2]) /
                     (2.0 * r * a.a[1]),
                 -1.0, 1.0);
  const double c3 =
      std::clamp((r * r + a.a[2] * a.a[2] - a.a[1] * a.a[1]) /
                     (2.0 * r * a.a[2]),
                 -1.0, 1.0);
  // acos would lose ~sqrt(eps) at the folds (c -> +-1); atan2 against the
  // area-based sine keeps the angle error at the rounding level everywhere.
  const double area = triangle_area(r, a.a[1], a.a[2]);
  const double alpha2 = std::atan2(2.0 * area / (r * a.a[1]), c2);
  const double alpha3 = std::atan2(2.0 * area / (r * a.a[2]), c3);
  CurvePoint p;
  p.k = {wrap_angle(k1), wrap_angle(phi + sign * alpha2),
         wrap_angle(phi - sign * alpha3)};
  p.residual = closure_residual(a, p.k);
  return p;
}

}  // namespace

PolygonCurve curve_samples(const PolygonSpec& a, int m) {
  const PolygonClass cls = classify(a);
  if (cls != PolygonClass::Curve) {
    Error err(ErrorCode::NotACurve,
              cls == PolygonClass::Empty
                  ? "no closed quadrangle with these sides"
                  : "sides admit a single collinear configuration only");
    throw err;
  }
  m = std::max(m, 48);

  PolygonCurve curve;
  curve.classification = PolygonClass::Curve;
  curve.smooth = smoothness(a);

  const double a1 = a.a[0], a2 = a.a[1], a3 = a.a[2], a4 = a.a[3];
  const double tol_eq = 1e-12 * side_sum(a);

  // Degenerate pivot w = 0: possible only with a1 = a4 (k1 = pi) and then
  // a2 = a3; contributes the full circle (pi, t, t+pi).
  if (std::abs(a1 - a4) <= tol_eq && std::abs(a2 - a3) <= tol_eq) {
    const int n = std::max(m / 3, 32);
    std::vector<CurvePoint> loop;
    loop.reserve(n + 1);
    for (int i = 0; i < n; ++i) {
      const double t = -M_PI + 2.0 * M_PI * (i + 1) / n;
      CurvePoint p;
      p.k = {M_PI, t, wrap_angle(t + M_PI)};
      p.residual = closure_residual(a, p.k);
      loop.push_back(p);
    }
    loop.push_back(loop.front());
    curve.branches.push_back(std::move(loop));
  }

  // Feasible k1 range for the regular (two-link) branches.
  const double r2_min = (a2 - a3) * (a2 - a3);
  const double r2_max = (a2 + a3) * (a2 + a3);
  const auto cos_of_r2 = [&](double r2) {
    return (r2 - a1 * a1 - a4 * a4) / (2.0 * a1 * a4);
  };
  const double c_lo_raw = cos_of_r2(r2_min);
  const double c_hi_raw = cos_of_r2(r2_max);
  const double cl = std::max(c_lo_raw, -1.0);
  const double ch = std::min(c_hi_raw, 1.0);

  if (cl <= ch) {
    const bool covers_zero = c_hi_raw >= 1.0;   // k1 = 0 feasible
    const bool covers_pi = c_lo_raw <= -1.0;    // k1 = pi feasible
    const double th_min = std::acos(ch);
    const double th_max = std::acos(cl);

    const auto trace_loop = [&](double from, double to, int n) {
      // Forward along elbow +1, back along elbow -1; the folds at the ends
      // are shared points of the two elbows, so the polyline closes.
      std::vector<CurvePoint> loop;
      loop.reserve(2 * n + 2);
      for (int i = 0; i <= n; ++i)
        loop.push_back(elbow_point(a, from + (to - from) * i / n, +1));
      for (int i = n - 1; i >= 1; --i)
        loop.push_back(elbow_point(a, from + (to - from) * i / n, -1));
      loop.push_back(loop.front());
      return loop;
    };

    if (covers_zero && covers_pi) {
      // Whole k1 circle feasible: one closed loop per elbow sign.
      const int n = std::max(m / 2, 24);
      for (int sign : {+1, -1}) {
        std::vector<CurvePoint> loop;
        loop.reserve(n + 1);
        for (int i = 0; i < n; ++i)
          loop.push_back(elbow_point(a, -M_PI + 2.0 * M_PI * (i + 1) / n, sign));
        loop.push_back(loop.front());
        curve.branches.push_back(std::move(loop));
      }
    } else if (covers_zero) {
      curve.branches.push_back(trace_loop(-th_max, th_max, std::max(m / 2, 24)));
    } else if (covers_pi) {
      curve.branches.push_back(
          trace_loop(th_min, 2.0 * M_PI - th_min, std::max(m / 2, 24)));
    } else {
      const int n = std::max(m / 4, 16);
      curve.branches.push_back(trace_loop(th_min, th_max, n));
      curve.branches.push_back(trace_loop(-th_max, -th_min, n));
    }
  }

  curve.topology = classify_topology(a, curve);
  return curve;
}

CurveTopology topology(const PolygonSpec& a) {
  return curve_samples(a, 1536).topology;
}

double curve_distance(const PolygonCurve& curve,
                      const std::array<double, 3>& k) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : curve.branches)
    for (const CurvePoint& p : b) best = std::min(best, point_distance(k, p.k));
  return best;
}

std::vector<std::vector<double>> ngon_samples(const std::vector<double>& sides,
                                              int m) {
  const int n = static_cast<int>(sides.size());
  if (n < 3)
    throw Error(ErrorCode::ConfigInvalid, "polygon needs at least 3 sides");
  for (double s : sides)
    if (!(s > 0.0))
      throw Error(ErrorCode::NonPositiveLength, "polygon sides must be positive");

  std::vector<std::vector<double>> out;
  const double last = sides[n - 1];

  const auto close_two = [&](const std::complex<double>& w, double sa,
                             double sb, std::vector<double>& tuple) -> bool {
    const double r = std::abs(w);
    if (r < std::abs(sa - sb) - 1e-15 || r > sa + sb + 1e-15) return false;
    if (r == 0.0) return false;  // continuum of solutions; skip in sampling
    const double phi = std::arg(-w);
    const double ca = std::clamp((r * r + sa * sa - sb * sb) / (2.0 * r * sa),
                                 -1.0, 1.0);
    const double cb = std::clamp((r * r + sb * sb - sa * sa) / (2.0 * r * sb),
                                 -1.0, 1.0);
    tuple.push_back(wrap_angle(phi + std::acos(ca)));
    tuple.push_back(wrap_angle(phi - std::acos(cb)));
    return true;
  };

  if (n == 3) {
    std::vector<double> tuple;
    if (close_two(std::complex<double>(last, 0.0), sides[0], sides[1], tuple)) {
      out.push_back({tuple[0], tuple[1]});
      // Mirror elbow; coincides with the first at collinear configurations.
      std::vector<double> mirror{wrap_angle(-tuple[0]), wrap_angle(-tuple[1])};
      if (std::abs(mirror[0] - tuple[0]) > 1e-12 ||
          std::abs(mirror[1] - tuple[1]) > 1e-12)
        out.push_back(mirror);
    }
    return out;
  }

  if (n == 4) {
    PolygonSpec spec;
    spec.a = {sides[0], sides[1], sides[2], sides[3]};
    if (classify(spec) == PolygonClass::Point) {
      const auto k = point_solution(spec);
      out.push_back({k[0], k[1], k[2]});
      return out;
    }
    if (classify(spec) == PolygonClass::Empty) return out;
    const PolygonCurve curve = curve_samples(spec, m);
    for (const auto& b : curve.branches)
      for (size_t i = 0; i + 1 < b.size(); ++i)  // skip closure duplicate
        out.push_back({b[i].k[0], b[i].k[1], b[i].k[2]});
    return out;
  }

  // n >= 5: seeded random sampling of the free angles, two-link closure for
  // the final pair.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ static_cast<uint64_t>(n));
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  const long max_tries = 200L * std::max(m, 1);
  for (long tries = 0; tries < max_tries && static_cast<int>(out.size()) < m;
       ++tries) {
    std::vector<double> tuple;
    std::complex<double> w(last, 0.0);
    for (int j = 0; j < n - 3; ++j) {
      const double kj = angle(rng);
      tuple.push_back(kj);
      w += sides[j] * unit(kj);
    }
    if (close_two(w, sides[n - 3], sides[n - 2], tuple)) out.push_back(tuple);
  }
  return out;
}

void write_branch_csv(const PolygonCurve& curve, std::ostream& out) {
  out << "branch_id,k1,k2,k3,residual\n";
  for (size_t b = 0; b < curve.branches.size(); ++b)
    for (const CurvePoint& p : curve.branches[b])
      out << b << ',' << format_g12(p.k[0]) << ',' << format_g12(p.k[1]) << ','
          << format_g12(p.k[2]) << ',' << format_g12(p.residual) << "\n";
}

}  // namespace qgband
