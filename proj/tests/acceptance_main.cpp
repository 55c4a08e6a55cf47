// Acceptance gate: nine end-to-end checks, one pass/fail line each.
// Exit code 0 iff all pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgband/band_edge.hpp"
#include "qgband/dispersion.hpp"
#include "qgband/fd_oracle.hpp"
#include "qgband/format.hpp"
#include "qgband/graph.hpp"
#include "qgband/polygon.hpp"
#include "qgband/secular.hpp"

using namespace qgband;

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

double bisect(double lo, double hi, double (*f)(double)) {
  // expects f(lo) > 0 > f(hi)
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double detached_root(double beta) { return 4.0 * beta * std::cos(beta) + std::sin(beta); }

const double kQuarterPi2 = M_PI * M_PI / 4.0;

CompactGraph core_graph() { return build_gamma1({1, 1, 1, 1}, 0.0, 1.0); }

bool run_criterion(int id, const char* title,
                   const std::function<std::string()>& body) {
  bool ok = false;
  std::string detail;
  try {
    detail = body();
    ok = true;
  } catch (const std::exception& e) {
    detail = e.what();
  }
  std::printf("criterion %d %s  %s (%s)\n", id, ok ? "PASS" : "FAIL", title,
              detail.c_str());
  std::fflush(stdout);
  return ok;
}

// --- 1: open gap with a flat first-band top on the 16^3 torus grid --------

std::string crit_gap() {
  const CompactGraph g = core_graph();
  const auto t0 = std::chrono::steady_clock::now();
  const BandTable table = band_sweep(g, 1, 1.0, GridSpec{16, 16, 16}, 2);
  const SpectrumReport rep = spectrum_report(table, kGapTol);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const double beta = bisect(M_PI / 2, M_PI, detached_root);
  const double lambda_a = beta * beta;
  const double max1 = rep.bands[0][1];
  const double min2 = rep.bands[1][0];
  require(std::abs(max1 - kQuarterPi2) <= 1e-6,
          "band-1 max " + format_g12(max1) + " not at " +
              format_g12(kQuarterPi2));
  require(min2 >= lambda_a - 1e-6, "band-2 min " + format_g12(min2) +
                                       " below " + format_g12(lambda_a));
  require(min2 - max1 >= 0.4,
          "gap length " + format_g12(min2 - max1) + " < 0.4");
  require(rep.gap_open_between_first_two, "gap not reported open");
  require(seconds <= 120.0, "sweep took " + format_g12(seconds) + "s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "max1=%s min2=%s gap=%s t=%.1fs",
                format_g12(max1).c_str(), format_g12(min2).c_str(),
                format_g12(min2 - max1).c_str(), seconds);
  return buf;
}

// --- 2: first band attains its maximum exactly along the predicted curve --

std::string crit_degenerate_edge() {
  const DegeneracyReport rep = degenerate_curve(core_graph(), 1, 1.0);
  require(std::abs(rep.lambda_edge - kQuarterPi2) <= 1e-10,
          "edge value " + format_g12(rep.lambda_edge));
  require(rep.on_curve_checked == 100, "expected 100 on-curve samples");
  require(rep.off_curve_checked == 100, "expected 100 off-curve samples");
  require(rep.on_curve_max_dev <= 1e-8 - 1e-10,
          "on-curve deviation " + format_g12(rep.on_curve_max_dev));
  require(rep.off_curve_min_margin >= 1.001e-6,
          "off-curve margin " + format_g12(rep.off_curve_min_margin));
  return "on_dev=" + format_g12(rep.on_curve_max_dev) +
         " off_margin=" + format_g12(rep.off_curve_min_margin) +
         " samples=100+100";
}

// --- 3: both verdicts survive ten jittered parameter draws ----------------

std::string crit_robustness() {
  const CompactGraph g = core_graph();
  const PerturbationSpec spec;  // +-2% lengths, +-0.1 couplings, |q| <= 0.1
  double worst_dev = 0.0;
  double worst_gap = std::numeric_limits<double>::infinity();
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const RobustnessReport rep =
        perturb_and_verify(g, 0, 1, 1.0, spec, seed, GridSpec{8, 8, 8});
    const std::string tag = " (seed " + std::to_string(seed) + ")";
    require(rep.gap.open, "gap closed" + tag);
    require(rep.curve.on_curve_max_dev <= 1e-8,
            "on-curve deviation " + format_g12(rep.curve.on_curve_max_dev) + tag);
    require(rep.curve.off_curve_min_margin > 0.0, "off-curve margin lost" + tag);
    worst_dev = std::max(worst_dev, rep.curve.on_curve_max_dev);
    worst_gap = std::min(worst_gap, rep.gap.min_band2 - rep.gap.max_band1);
  }
  return "seeds=1..10 worst_on_dev=" + format_g12(worst_dev) +
         " worst_gap=" + format_g12(worst_gap);
}

// --- 4: rank-one coupling increases interlace the spectrum ----------------

std::string crit_interlacing() {
  std::mt19937_64 rng(0xA11CEULL);
  auto unif = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  double worst_slack = std::numeric_limits<double>::infinity();
  int done = 0;
  int attempts = 0;
  while (done < 20) {
    require(++attempts <= 200, "too many under-resolved draws");
    const std::array<double, 4> len{unif(0.7, 1.4), unif(0.7, 1.4),
                                    unif(0.7, 1.4), unif(0.7, 1.4)};
    const double ga = unif(-0.5, 0.5);
    const double gb = ga + unif(0.3, 1.2);
    const double bump = unif(0.5, 2.0);
    try {
      const CompactGraph g = build_gamma1(len, ga, gb);
      const std::vector<double> base = flatten(first_eigenvalues(g, 7));
      const CompactGraph hat_dirichlet = dirichlet_perturbation(g, 1);
      const CompactGraph hat_stiffer =
          with_vertex_condition(g, 1, VertexCondition::delta(gb + bump));
      for (const CompactGraph* hat : {&hat_dirichlet, &hat_stiffer}) {
        const std::vector<double> up = flatten(first_eigenvalues(*hat, 6));
        for (int k = 0; k < 6; ++k) {
          worst_slack = std::min(worst_slack, up[k] - base[k]);
          worst_slack = std::min(worst_slack, base[k + 1] - up[k]);
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ScanResolutionTooCoarse) continue;
      throw;
    }
    ++done;
  }
  require(worst_slack >= -1e-9,
          "interlacing violated by " + format_g12(-worst_slack));
  return "graphs=20 perturbations=40 worst_slack=" + format_g12(worst_slack);
}

// --- 5: decoupling at B always lands below decoupling at A ----------------

std::string crit_ordering() {
  std::mt19937_64 rng(0x4A3ULL);
  auto unif = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto margin_of = [](const CompactGraph& g, int a, int b) {
    const double lb = first_eigenvalues(dirichlet_perturbation(g, b), 1)[0].lambda;
    const double la = first_eigenvalues(dirichlet_perturbation(g, a), 1)[0].lambda;
    return la - lb;
  };
  double min_core = std::numeric_limits<double>::infinity();
  double min_tailed = std::numeric_limits<double>::infinity();
  int attempts = 0;
  for (int done = 0; done < 20;) {
    require(++attempts <= 200, "too many under-resolved draws");
    const std::array<double, 4> len{unif(0.7, 1.4), unif(0.7, 1.4),
                                    unif(0.7, 1.4), unif(0.7, 1.4)};
    const double ga = unif(-0.5, 0.5);
    const double gb = ga + unif(0.3, 1.2);
    try {
      min_core = std::min(min_core, margin_of(build_gamma1(len, ga, gb), 0, 1));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ScanResolutionTooCoarse) continue;
      throw;
    }
    ++done;
  }
  for (int done = 0; done < 20;) {
    require(++attempts <= 400, "too many under-resolved draws");
    const std::array<double, 5> len{unif(0.7, 1.4), unif(0.7, 1.4),
                                    unif(0.7, 1.4), unif(0.7, 1.4),
                                    unif(0.7, 1.4)};
    try {
      const CompactGraph g = build_gamma2(len);
      min_tailed = std::min(
          min_tailed, margin_of(g, g.find_vertex("A"), g.find_vertex("B")));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ScanResolutionTooCoarse) continue;
      throw;
    }
    ++done;
  }
  require(min_core > 0.0, "core margin " + format_g12(min_core));
  require(min_tailed > 0.0, "tailed margin " + format_g12(min_tailed));
  return "min_margin core=" + format_g12(min_core) +
         " tailed=" + format_g12(min_tailed) + " (20+20 draws)";
}

// --- 6: secular roots agree with the lumped discretization ----------------

std::string crit_oracle() {
  const PerturbationSpec spec;
  std::vector<std::pair<std::string, CompactGraph>> cfgs;
  cfgs.emplace_back("core", core_graph());
  cfgs.emplace_back("tailed", build_gamma2({1, 1, 1, 1, 1}));
  cfgs.emplace_back("core#11", draw_perturbation(core_graph(), 1, spec, 11).first);
  cfgs.emplace_back("core#12", draw_perturbation(core_graph(), 1, spec, 12).first);
  const CompactGraph tailed = build_gamma2({1, 1, 1, 1, 1});
  const int tb = tailed.find_vertex("B");
  cfgs.emplace_back("tailed#13", draw_perturbation(tailed, tb, spec, 13).first);
  cfgs.emplace_back("tailed#14", draw_perturbation(tailed, tb, spec, 14).first);

  double worst_err = 0.0;
  double ratio_lo = std::numeric_limits<double>::infinity();
  double ratio_hi = 0.0;
  int ratios = 0;
  for (const auto& [name, g] : cfgs) {
    const std::vector<double> sec = flatten(first_eigenvalues(g, 6));
    const std::vector<double> fine = oracle_eigenvalues(g, 400, 6);
    const std::vector<double> coarse = oracle_eigenvalues(g, 200, 6);
    int ratios_here = 0;
    for (int i = 0; i < 6; ++i) {
      const double err_fine = fine[i] - sec[i];
      const double err_coarse = coarse[i] - sec[i];
      require(std::abs(err_fine) <= 5e-3, name + " eigenvalue " +
                                              std::to_string(i + 1) +
                                              " off by " + format_g12(err_fine));
      worst_err = std::max(worst_err, std::abs(err_fine));
      if (std::abs(err_fine) < 1e-7) continue;  // below eigensolver noise floor
      const double ratio = std::abs(err_coarse) / std::abs(err_fine);
      require(ratio >= 3.5 && ratio <= 4.5,
              name + " eigenvalue " + std::to_string(i + 1) +
                  " halving ratio " + format_g12(ratio));
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
      ++ratios_here;
    }
    require(ratios_here >= 2, name + ": too few resolvable errors for the "
                              "halving-ratio check");
    ratios += ratios_here;
  }
  return "configs=6 worst_err=" + format_g12(worst_err) + " ratio=[" +
         format_g12(ratio_lo) + "," + format_g12(ratio_hi) + "] over " +
         std::to_string(ratios) + " eigenvalues";
}

// --- 7: quadrangle classification table and closure residuals -------------

std::string crit_polygon() {
  require(classify(PolygonSpec{{1, 1, 1, 4}}) == PolygonClass::Empty,
          "(1,1,1,4) not Empty");
  require(classify(PolygonSpec{{1, 1, 1, 3}}) == PolygonClass::Point,
          "(1,1,1,3) not Point");
  const std::array<double, 3> p = point_solution(PolygonSpec{{1, 1, 1, 3}});
  for (double c : p)
    require(std::abs(c - M_PI) <= 1e-12, "point solution not at (pi,pi,pi)");
  require(closure_residual(PolygonSpec{{1, 1, 1, 3}}, p) <= 1e-12,
          "point residual");

  const PolygonSpec uneven{{1.1, 0.95, 0.9, 1.0}};
  require(classify(uneven) == PolygonClass::Curve, "uneven spec not Curve");
  require(smoothness(uneven), "uneven spec not smooth");

  const PolygonSpec equal{{1, 1, 1, 1}};
  require(classify(equal) == PolygonClass::Curve, "equal spec not Curve");
  require(!smoothness(equal), "equal spec reported smooth");
  require(topology(equal) == CurveTopology::ThreeCirclesPairwise,
          "equal spec topology");

  double worst = 0.0;
  int count = 0;
  for (const PolygonSpec& spec : {uneven, equal}) {
    const PolygonCurve curve = curve_samples(spec, 512);
    for (const auto& branch : curve.branches)
      for (const CurvePoint& pt : branch) {
        worst = std::max(worst, pt.residual);
        ++count;
      }
  }
  require(count >= 512, "too few curve samples");
  require(worst <= 1e-10, "closure residual " + format_g12(worst));
  return "samples=" + std::to_string(count) +
         " max_residual=" + format_g12(worst);
}

// --- 8: length threshold and positive quadrangle margins ------------------

std::string crit_threshold() {
  const QuantCheck base = quant_condition({1, 1, 1, 1, 1});
  require(base.rho0 > 2.84 && base.rho0 < 2.85,
          "threshold root " + format_g12(base.rho0));
  const double res = base.rho0 * base.rho0 -
                     base.rho0 * base.rho0 * base.rho0 / 3.0 -
                     M_PI * M_PI / 24.0;
  require(std::abs(res) <= 1e-12, "root residual " + format_g12(res));

  std::mt19937_64 rng(0xBEEFULL);
  auto unif = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  double min_margin = std::numeric_limits<double>::infinity();
  int attempts = 0;
  for (int done = 0; done < 50;) {
    require(++attempts <= 300, "too many under-resolved draws");
    const std::array<double, 5> len{unif(1.4, 2.0), unif(0.7, 1.4),
                                    unif(0.7, 1.4), unif(0.7, 1.4),
                                    unif(0.7, 1.4)};
    try {
      const QuantCheck q = quant_condition(len);
      require(q.hypothesis, "draw unexpectedly misses the hypothesis");
      require(q.margins_checked, "margins not evaluated");
      for (double m : q.margins) min_margin = std::min(min_margin, m);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ScanResolutionTooCoarse) continue;
      throw;
    }
    ++done;
  }
  require(min_margin > 0.0, "margin " + format_g12(min_margin));
  return "rho0=" + format_g12(base.rho0) + " residual=" + format_g12(res) +
         " min_margin=" + format_g12(min_margin) + " (50 tuples)";
}

// --- 9: discrete diamond band sum and closure-set degeneracy --------------

std::string crit_diamond() {
  std::mt19937_64 rng(0xD1AULL);
  auto unif = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  for (int d : {2, 3}) {
    for (int i = 0; i < 100; ++i) {
      std::vector<double> k(d);
      for (double& c : k) c = unif(-M_PI, M_PI);
      const auto [lo, hi] = discrete_diamond_bands(d, k);
      require(lo + hi == 2.0 * (d + 1), "band sum not exact");
      require(lo <= hi, "band order");
    }
  }

  double worst = 0.0;
  const auto triangle = ngon_samples({1, 1, 1}, 16);
  require(triangle.size() == 2, "triangle closure set size");
  for (const auto& k : triangle) {
    const auto [lo, hi] = discrete_diamond_bands(2, k);
    worst = std::max(worst, hi - lo);
  }

  int checked = 0;
  const PolygonCurve curve = curve_samples(PolygonSpec{{1, 1, 1, 1}}, 256);
  for (const auto& branch : curve.branches)
    for (const CurvePoint& pt : branch) {
      const auto [lo, hi] =
          discrete_diamond_bands(3, {pt.k[0], pt.k[1], pt.k[2]});
      worst = std::max(worst, hi - lo);
      ++checked;
    }
  require(checked >= 256, "too few closure samples");
  require(worst <= 1e-10, "closure split " + format_g12(worst));
  return "sum exact on 200 draws; closure split<=" + format_g12(worst) +
         " over " + std::to_string(checked + 2) + " samples";
}

}  // namespace

int main() {
  int failed = 0;
  failed += !run_criterion(1, "first gap open with flat band-1 top", crit_gap);
  failed += !run_criterion(2, "band-1 maximum attained along predicted curve",
                           crit_degenerate_edge);
  failed += !run_criterion(3, "verdicts stable under jittered parameters",
                           crit_robustness);
  failed += !run_criterion(4, "rank-one interlacing inequalities",
                           crit_interlacing);
  failed += !run_criterion(5, "decoupled ground-state ordering", crit_ordering);
  failed += !run_criterion(6, "secular vs finite-difference cross-check",
                           crit_oracle);
  failed += !run_criterion(7, "quadrangle classification and residuals",
                           crit_polygon);
  failed += !run_criterion(8, "length threshold certifies positive margins",
                           crit_threshold);
  failed += !run_criterion(9, "discrete diamond sum and closure degeneracy",
                           crit_diamond);
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
