#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qgband/dispersion.hpp"
#include "qgband/graph.hpp"
#include "qgband/polygon.hpp"

using namespace qgband;

TEST_CASE("grid covers the half-open cube with the positive face included") {
  const GridSpec grid{8, 8, 8};
  CHECK(grid.cells() == 512);
  CHECK(grid.coordinate(0, 7) == M_PI);       // endpoint hit exactly
  CHECK(grid.coordinate(0, 0) > -M_PI);       // opposite face excluded
  CHECK(grid.coordinate(0, 3) == doctest::Approx(0.0));
  for (int flat : {0, 17, 311, 511}) {
    const auto idx = grid.unflatten(flat);
    CHECK(idx[0] * 64 + idx[1] * 8 + idx[2] == flat);
    const auto k = grid.k_at(flat);
    for (int axis = 0; axis < 3; ++axis)
      CHECK(k[axis] == grid.coordinate(axis, idx[axis]));
  }
}

TEST_CASE("parallel and sequential sweeps are bitwise identical") {
  const CompactGraph g = build_gamma1({1, 1, 1, 1}, 0.0, 1.0);
  const GridSpec grid{4, 4, 4};
  const BandTable par = band_sweep(g, 1, 1.0, grid, 2);
  const BandTable ser = band_sweep_serial(g, 1, 1.0, grid, 2);
  REQUIRE(par.values.size() == ser.values.size());
  for (size_t i = 0; i < par.values.size(); ++i)
    CHECK(par.values[i] == ser.values[i]);
}

TEST_CASE("sweep rejects degenerate grids and band counts") {
  const CompactGraph g = build_gamma1({1, 1, 1, 1}, 0.0, 1.0);
  CHECK_THROWS_AS(band_sweep(g, 1, 1.0, GridSpec{2, 4, 4}, 2), Error);
  CHECK_THROWS_AS(band_sweep(g, 1, 1.0, GridSpec{4, 4, 4}, 1), Error);
}

TEST_CASE("band report flags the gap and the first-band peak cells") {
  const CompactGraph g = build_gamma1({1, 1, 1, 1}, 0.0, 1.0);
  BandTable table = band_sweep(g, 1, 1.0, GridSpec{6, 6, 6}, 2);
  table.config_hash = "feed";
  const SpectrumReport rep = spectrum_report(table, 1e-8);
  REQUIRE(rep.bands.size() == 2);
  CHECK(rep.config_hash == "feed");
  CHECK(rep.gap_open_between_first_two);
  REQUIRE(rep.gaps.size() >= 1);
  CHECK(rep.gaps[0][0] == rep.bands[0][1]);
  CHECK(rep.gaps[0][1] == rep.bands[1][0]);
  // the grid contains exact peak momenta, e.g. (pi, pi, 0)
  CHECK(rep.bands[0][1] == doctest::Approx(M_PI * M_PI / 4).epsilon(1e-10));
  REQUIRE(!rep.argmax_cells.empty());
  for (const auto& cell : rep.argmax_cells) {
    const int flat = (cell[0] * 6 + cell[1]) * 6 + cell[2];
    CHECK(table.lambda(flat, 0) >= rep.bands[0][1] - 1e-8);
  }
}

TEST_CASE("first band stays below the decoupled ground state everywhere") {
  const CompactGraph g = build_gamma1({1.0, 1.05, 0.95, 1.0}, 0.0, 1.0);
  const BandTable table = band_sweep(g, 1, 1.0, GridSpec{4, 4, 4}, 2);
  const double lb =
      flatten(eigenvalues_in(dirichlet_perturbation(g, 1), 0.1, 4.0))[0];
  for (int flat = 0; flat < table.grid.cells(); ++flat)
    CHECK(table.lambda(flat, 0) <= lb + 1e-8);
}

TEST_CASE("two-level lattice bands sum to twice the center exactly") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  for (int d : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> k(d);
      for (double& kj : k) kj = ang(rng);
      const auto [lo, hi] = discrete_diamond_bands(d, k);
      CHECK(lo + hi == 2.0 * (d + 1));  // exact, not approximate
      CHECK(lo <= hi);
      CHECK(lo >= 0.0);
    }
    // the all-zero momentum pins the extremes
    const auto [lo0, hi0] = discrete_diamond_bands(d, std::vector<double>(d, 0.0));
    CHECK(lo0 == 0.0);
    CHECK(hi0 == 2.0 * (d + 1));
  }
}

TEST_CASE("two-level lattice bands touch exactly on the closure set") {
  // d = 2: the triangle closes at +-(2pi/3, -2pi/3)
  const double t = 2.0 * M_PI / 3.0;
  for (double sign : {1.0, -1.0}) {
    const auto [lo, hi] = discrete_diamond_bands(2, {sign * t, -sign * t});
    CHECK(hi - lo < 1e-10);
    CHECK(lo == doctest::Approx(3.0).epsilon(1e-12));
  }
  // d = 3: sample the equilateral quadrangle closure curve
  const PolygonCurve curve = curve_samples(PolygonSpec{{1, 1, 1, 1}}, 256);
  int checked = 0;
  for (const auto& branch : curve.branches)
    for (const CurvePoint& p : branch) {
      const auto [lo, hi] =
          discrete_diamond_bands(3, {p.k[0], p.k[1], p.k[2]});
      CHECK(hi - lo <= 1e-10);
      ++checked;
    }
  CHECK(checked >= 256);
}

TEST_CASE("two-level lattice rejects malformed input") {
  CHECK_THROWS_AS(discrete_diamond_bands(1, {0.0}), Error);
  CHECK_THROWS_AS(discrete_diamond_bands(3, {0.0, 0.0}), Error);
}

TEST_CASE("band table serializes one row per cell") {
  const CompactGraph g = build_gamma1({1, 1, 1, 1}, 0.0, 1.0);
  const BandTable table = band_sweep(g, 1, 1.0, GridSpec{4, 4, 4}, 2);
  std::ostringstream out;
  write_band_csv(table, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "k1,k2,k3,lambda_1,lambda_2");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == 64);
}
