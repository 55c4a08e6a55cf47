#include "qgband/band_edge.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace qgband {

namespace {

// Evenly spaced selection of n sample points across all branches, skipping
// each loop's closing duplicate.
std::vector<std::array<double, 3>> pick_on_curve(const PolygonCurve& curve,
                                                 int n) {
  std::vector<std::array<double, 3>> all;
  for (const auto& b : curve.branches)
    for (size_t i = 0; i + 1 < b.size(); ++i) all.push_back(b[i].k);
  if (all.empty()) return all;
  std::vector<std::array<double, 3>> out;
  const int total = static_cast<int>(all.size());
  const int take = std::min(n, total);
  for (int i = 0; i < take; ++i)
    out.push_back(all[static_cast<size_t>(i) * total / take]);
  return out;
}

}  // namespace

DegeneracyReport degenerate_curve(const CompactGraph& g, int b, double gamma_b,
                                  const VerifyOptions& opts) {
  DegeneracyReport rep;
  rep.tol_curve = opts.tol_curve;

  const CompactGraph decoupled = dirichlet_perturbation(g, b);
  const std::vector<int> copies = dirichlet_copy_ids(g, b);
  if (copies.size() != 4)
    throw Error(ErrorCode::WrongDegree,
                "degeneracy pipeline needs degree 4 at the cell-boundary vertex");

  const std::vector<EigenvalueHit> ground = first_eigenvalues(decoupled, 1);
  rep.lambda_edge = ground.front().lambda;
  const EigenSolution sol = eigenfunction(decoupled, rep.lambda_edge);

  double max_abs = 0.0;
  for (int j = 0; j < 4; ++j) {
    rep.derivatives[j] = sol.vertex_derivatives[copies[j]][0].real();
    max_abs = std::max(max_abs, std::abs(rep.derivatives[j]));
  }
  for (int j = 0; j < 4; ++j) {
    if (std::abs(rep.derivatives[j]) < 1e-12 * max_abs) {
      Error err(ErrorCode::NoCurve,
                "ground-state derivative vanishes on edge end " +
                    std::to_string(j + 1));
      err.index = j + 1;
      throw err;
    }
  }
  // Reduce to positive side lengths: negative ratios against the fourth
  // derivative become k_j -> k_j + pi shifts of the solution set.
  const double ref = rep.derivatives[3];
  for (int j = 0; j < 4; ++j) {
    const double ratio = rep.derivatives[j] / ref;
    rep.signs[j] = ratio < 0.0 ? -1 : 1;
    rep.quad.a[j] = std::abs(rep.derivatives[j]);
  }
  // Symmetric graphs give exit slopes equal up to eigensolver noise, and the
  // singular-point analysis of the side lengths keys on exact coincidences;
  // collapse magnitudes within 1e-9 (relative) onto their group mean.
  {
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return rep.quad.a[x] < rep.quad.a[y]; });
    const double snap = 1e-9 * rep.quad.a[order[3]];
    int start = 0;
    for (int j = 1; j <= 4; ++j) {
      if (j < 4 &&
          rep.quad.a[order[j]] - rep.quad.a[order[j - 1]] <= snap)
        continue;
      if (j - start > 1) {
        double mean = 0.0;
        for (int i = start; i < j; ++i) mean += rep.quad.a[order[i]];
        mean /= j - start;
        for (int i = start; i < j; ++i) rep.quad.a[order[i]] = mean;
      }
      start = j;
    }
  }

  if (classify(rep.quad) != PolygonClass::Curve) {
    int worst = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < 4; ++m) {
      double others = 0.0;
      for (int j = 0; j < 4; ++j)
        if (j != m) others += rep.quad.a[j];
      const double excess = rep.quad.a[m] - others;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = m;
      }
    }
    Error err(ErrorCode::NoCurve,
              "quadrangle inequality fails: side " + std::to_string(worst + 1) +
                  " is not shorter than the other three (excess " +
                  std::to_string(worst_excess) + ")");
    err.index = worst + 1;
    throw err;
  }

  rep.curve = curve_samples(rep.quad, opts.dense_samples);
  for (auto& branch : rep.curve.branches)
    for (CurvePoint& p : branch)
      for (int j = 0; j < 3; ++j)
        if (rep.signs[j] < 0) p.k[j] = wrap_angle(p.k[j] + M_PI);

  // Verification fibers share the compact graph's edges, so one transfer
  // table set serves the whole batch.
  const std::vector<std::array<double, 3>> on_points =
      pick_on_curve(rep.curve, opts.on_curve_samples);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::vector<std::array<double, 3>> off_points;
  long guard = 0;
  while (static_cast<int>(off_points.size()) < opts.off_curve_samples &&
         guard < 200000L) {
    ++guard;
    std::array<double, 3> k;
    for (int j = 0; j < 3; ++j) k[j] = wrap_angle(angle(rng));
    if (curve_distance(rep.curve, k) > opts.min_off_distance)
      off_points.push_back(k);
  }

  const CompactGraph probe = apply_floquet(g, b, {0.0, 0.0, 0.0}, gamma_b);
  const double s_lo = scan_s_of_lambda(default_lambda_lo(probe));
  const double s_hi = scan_s_of_lambda(rep.lambda_edge + 1e-4);
  const double scan_step = (M_PI / probe.total_length()) / 20.0;
  const int n = std::max(3, static_cast<int>(std::ceil((s_hi - s_lo) / scan_step)) + 1);
  const double h = (s_hi - s_lo) / (n - 1);
  std::vector<TransferTable> tables;
  tables.reserve(n);
  for (int i = 0; i < n; ++i)
    tables.push_back(make_transfer_table(probe, scan_lambda_of_s(s_lo + h * i)));

  const int n_on = static_cast<int>(on_points.size());
  const int n_off = static_cast<int>(off_points.size());
  std::vector<double> lam1(n_on + n_off,
                           std::numeric_limits<double>::quiet_NaN());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_on + n_off; ++i) {
    try {
      const std::array<double, 3>& k =
          i < n_on ? on_points[i] : off_points[i - n_on];
      const CompactGraph fiber = apply_floquet(g, b, k, gamma_b);
      const auto hits = eigenvalues_from_scan(fiber, s_lo, s_hi, tables);
      if (!hits.empty()) lam1[i] = hits.front().lambda;
    } catch (...) {
#pragma omp critical(qgband_curve_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  rep.on_curve_checked = n_on;
  rep.off_curve_checked = n_off;
  rep.on_curve_max_dev = 0.0;
  for (int i = 0; i < n_on; ++i) {
    if (!std::isfinite(lam1[i]))
      throw Error(ErrorCode::NotAnEigenvalue,
                  "no eigenvalue found below the predicted edge on the curve");
    rep.on_curve_max_dev =
        std::max(rep.on_curve_max_dev, std::abs(lam1[i] - rep.lambda_edge));
  }
  rep.off_curve_min_margin = std::numeric_limits<double>::infinity();
  for (int i = n_on; i < n_on + n_off; ++i) {
    if (!std::isfinite(lam1[i]))
      throw Error(ErrorCode::NotAnEigenvalue,
                  "no eigenvalue found below the predicted edge off the curve");
    rep.off_curve_min_margin =
        std::min(rep.off_curve_min_margin, rep.lambda_edge - lam1[i]);
  }
  if (n_off == 0) rep.off_curve_min_margin = 0.0;
  return rep;
}

GapReport check_gap(const CompactGraph& g, int a, int b, double gamma_b,
                    const GridSpec& grid, ExecutionMode mode) {
  GapReport rep;
  rep.grid = grid;

  const CompactGraph gb = dirichlet_perturbation(g, b);
  const CompactGraph ga = dirichlet_perturbation(g, a);
  rep.lambda_b = first_eigenvalues(gb, 1).front().lambda;
  rep.lambda_a = first_eigenvalues(ga, 1).front().lambda;
  if (!(rep.lambda_b < rep.lambda_a))
    throw Error(ErrorCode::GapChainViolated,
                "lambda_1 of the B-decoupled graph (" +
                    std::to_string(rep.lambda_b) +
                    ") is not below lambda_1 of the A-decoupled graph (" +
                    std::to_string(rep.lambda_a) + ")");

  const BandTable table =
      sweep_fibers([&](const std::array<double, 3>& k)
                       { return apply_floquet(g, b, k, gamma_b); },
                   grid, 2, mode);

  rep.max_band1 = -std::numeric_limits<double>::infinity();
  rep.min_band2 = std::numeric_limits<double>::infinity();
  int argmax1 = 0, argmin2 = 0;
  for (int flat = 0; flat < grid.cells(); ++flat) {
    if (table.lambda(flat, 0) > rep.max_band1) {
      rep.max_band1 = table.lambda(flat, 0);
      argmax1 = flat;
    }
    if (table.lambda(flat, 1) < rep.min_band2) {
      rep.min_band2 = table.lambda(flat, 1);
      argmin2 = flat;
    }
  }
  if (rep.max_band1 > rep.lambda_b + kGapTol) {
    Error err(ErrorCode::GapChainViolated,
              "band 1 exceeds lambda_1 of the B-decoupled graph");
    err.has_k = true;
    err.k = grid.k_at(argmax1);
    throw err;
  }
  if (rep.min_band2 < rep.lambda_a - kGapTol) {
    Error err(ErrorCode::GapChainViolated,
              "band 2 dips below lambda_1 of the A-decoupled graph");
    err.has_k = true;
    err.k = grid.k_at(argmin2);
    throw err;
  }
  rep.certified_gap = {rep.lambda_b, rep.lambda_a};
  rep.open = rep.min_band2 > rep.max_band1;
  return rep;
}

QuantCheck quant_condition(const std::array<double, 5>& lengths) {
  for (double l : lengths)
    if (!(l > 0.0))
      throw Error(ErrorCode::NonPositiveLength, "lengths must be positive");

  QuantCheck check;
  // rho^2 - rho^3/3 decreases through pi^2/24 exactly once on (2,3).
  const auto f = [](double rho) {
    return rho * rho - rho * rho * rho / 3.0 - M_PI * M_PI / 24.0;
  };
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  check.rho0 = 0.5 * (lo + hi);

  const double l0 = lengths[0];
  double lmin = lengths[1], lmax = lengths[1];
  for (int j = 2; j <= 4; ++j) {
    lmin = std::min(lmin, lengths[j]);
    lmax = std::max(lmax, lengths[j]);
  }
  check.hypothesis = std::min(check.rho0 * lmin, l0) >= lmax;
  if (!check.hypothesis) return check;

  const CompactGraph g2 = build_gamma2(lengths);
  const int b = g2.find_vertex("B");
  const CompactGraph decoupled = dirichlet_perturbation(g2, b);
  const std::vector<int> copies = dirichlet_copy_ids(g2, b);
  check.lambda_b = first_eigenvalues(decoupled, 1).front().lambda;
  const EigenSolution sol = eigenfunction(decoupled, check.lambda_b);
  std::array<double, 4> mags{};
  double sum = 0.0;
  for (int j = 0; j < 4; ++j) {
    mags[j] = std::abs(sol.vertex_derivatives[copies[j]][0].real());
    sum += mags[j];
  }
  for (int j = 0; j < 4; ++j) check.margins[j] = sum - 2.0 * mags[j];
  check.margins_checked = true;
  return check;
}

std::pair<CompactGraph, double> draw_perturbation(const CompactGraph& g, int b,
                                                  const PerturbationSpec& spec,
                                                  uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    Edge ed = g.edge(e);
    const double factor = 1.0 + spec.length_jitter * u(rng);
    ed.length *= factor;
    for (PotentialSegment& seg : ed.potential) seg.length *= factor;
    edges.push_back(std::move(ed));
  }
  std::vector<Vertex> vertices;
  vertices.reserve(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    Vertex vx;
    vx.label = g.vertex(v).label;
    vx.condition = g.vertex(v).condition;
    if (vx.condition.kind != ConditionKind::Dirichlet)
      vx.condition.gamma += spec.gamma_jitter * u(rng);
    vertices.push_back(std::move(vx));
  }
  if (spec.potential_amplitude > 0.0) {
    for (Edge& ed : edges) {
      const double v1 = spec.potential_amplitude * u(rng);
      const double v2 = spec.potential_amplitude * u(rng);
      ed.potential = {PotentialSegment{0.5 * ed.length, v1},
                      PotentialSegment{0.5 * ed.length, v2}};
    }
  }
  const double gamma_b = vertices.at(b).condition.gamma;
  return {CompactGraph(std::move(vertices), std::move(edges)), gamma_b};
}

RobustnessReport perturb_and_verify(const CompactGraph& g, int a, int b,
                                    double gamma_b,
                                    const PerturbationSpec& spec,
                                    uint64_t seed, const GridSpec& grid,
                                    const VerifyOptions& opts) {
  auto [perturbed, gb] = draw_perturbation(g, b, spec, seed);
  (void)gamma_b;  // the fiber coupling always tracks the perturbed vertex
  RobustnessReport rep{seed, spec, perturbed, gb,
                       check_gap(perturbed, a, b, gb, grid),
                       degenerate_curve(perturbed, b, gb, opts)};
  return rep;
}

}  // namespace qgband
