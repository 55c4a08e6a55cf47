#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "qgband/dispersion.hpp"
#include "qgband/graph.hpp"
#include "qgband/polygon.hpp"
#include "qgband/secular.hpp"

namespace qgband {

inline constexpr double kGapTol = 1e-8;
inline constexpr double kCurveTol = 1e-8;

struct VerifyOptions {
  int on_curve_samples = 100;
  int off_curve_samples = 100;
  double tol_curve = kCurveTol;
  double min_off_distance = 0.3;  // torus distance from the predicted curve
  int dense_samples = 1024;       // resolution of the predicted curve
  uint64_t seed = 0x51ab5eedULL;  // off-curve sampling
};

/// Prediction and verification of the first-band degenerate edge.
struct DegeneracyReport {
  double lambda_edge = 0.0;                 // lambda_1 of the B-decoupled graph
  std::array<double, 4> derivatives{};      // signed phi'_j(B), adjacency order
  PolygonSpec quad;                         // |phi'_j(B)|
  std::array<int, 4> signs{1, 1, 1, 1};
  PolygonCurve curve;                       // predicted maximum set, original k coords
  double on_curve_max_dev = 0.0;            // max |lambda_1(k) - lambda_edge| on curve
  double off_curve_min_margin = 0.0;        // min lambda_edge - lambda_1(k) off curve
  int on_curve_checked = 0;
  int off_curve_checked = 0;
  double tol_curve = kCurveTol;
};

/// Gap chain between the first two bands.
struct GapReport {
  double lambda_b = 0.0;    // lambda_1 of the B-decoupled graph
  double lambda_a = 0.0;    // lambda_1 of the A-decoupled graph
  double max_band1 = 0.0;
  double min_band2 = 0.0;
  bool open = false;
  std::array<double, 2> certified_gap{};  // (lambda_b, lambda_a), contained in the true gap
  GridSpec grid;
};

/// Sufficient length condition for curve existence on the tailed family.
struct QuantCheck {
  double rho0 = 0.0;
  bool hypothesis = false;
  bool margins_checked = false;
  std::array<double, 4> margins{};  // sum |phi'_i| - 2|phi'_j|, positive = ok
  double lambda_b = 0.0;
};

struct PerturbationSpec {
  double length_jitter = 0.02;        // relative, uniform in +-
  double gamma_jitter = 0.1;          // absolute, uniform in +-
  double potential_amplitude = 0.1;   // two-segment piecewise value, uniform in +-
};

struct RobustnessReport {
  uint64_t seed = 0;
  PerturbationSpec spec;
  CompactGraph graph;  // the perturbed graph that was verified
  double gamma_b = 0.0;
  GapReport gap;
  DegeneracyReport curve;
};

/// Predicts the degeneracy curve from the ground state of the B-decoupled
/// graph: the quasimomentum set where sum_j e^{ik_j} phi'_j(B) + phi'_4(B)
/// vanishes, negative derivative ratios absorbed as k_j -> k_j + pi.
/// Verifies lambda_1 equality on the curve and strict decrease off it.
/// Throws NoCurve (index = failing side, 1-based) when the quadrangle
/// inequalities fail.
DegeneracyReport degenerate_curve(const CompactGraph& g, int b, double gamma_b,
                                  const VerifyOptions& opts = {});

/// lambda_1 of the B- and A-decoupled graphs, strict ordering check, and a
/// torus sweep confirming max band1 <= lambda_b and min band2 >= lambda_a
/// within kGapTol.  Throws GapChainViolated (with the offending k when a
/// swept cell violates the chain).
GapReport check_gap(const CompactGraph& g, int a, int b, double gamma_b,
                    const GridSpec& grid, ExecutionMode mode = ExecutionMode::Parallel);

/// rho0 solves rho^2 - rho^3/3 = pi^2/24 in (2,3); hypothesis:
/// min(rho0 * min_j l_j, l_0) >= max_j l_j for the tailed family with tail
/// l_0 and parallel edges l_1..l_4.  When the hypothesis holds, the ground
/// state margins sum|phi'_i| - 2|phi'_j| are computed (all must be
/// positive).
QuantCheck quant_condition(const std::array<double, 5>& lengths);

/// Deterministically jitters edge lengths, vertex couplings, and edge
/// potentials, then reruns check_gap and degenerate_curve on the result.
RobustnessReport perturb_and_verify(const CompactGraph& g, int a, int b,
                                    double gamma_b,
                                    const PerturbationSpec& spec,
                                    uint64_t seed, const GridSpec& grid,
                                    const VerifyOptions& opts = {});

/// The jittered graph drawn by perturb_and_verify (exposed for tests and
/// oracle comparisons); returns the graph and the fiber coupling at b.
std::pair<CompactGraph, double> draw_perturbation(const CompactGraph& g, int b,
                                                  const PerturbationSpec& spec,
                                                  uint64_t seed);

}  // namespace qgband
