#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qgband/graph.hpp"
#include "qgband/secular.hpp"

namespace qgband {

/// Uniform grid over the torus (-pi, pi]^3; the pi endpoint is included,
/// -pi is not, so no point is counted twice.
struct GridSpec {
  int n1 = 16;
  int n2 = 16;
  int n3 = 16;

  int cells() const { return n1 * n2 * n3; }
  int axis_size(int axis) const { return axis == 0 ? n1 : (axis == 1 ? n2 : n3); }
  double coordinate(int axis, int index) const {
    return -M_PI + 2.0 * M_PI * (index + 1) / axis_size(axis);
  }
  /// Lexicographic flattening: k1 slowest, k3 fastest.
  std::array<int, 3> unflatten(int flat) const {
    return {flat / (n2 * n3), (flat / n3) % n2, flat % n3};
  }
  std::array<double, 3> k_at(int flat) const {
    const std::array<int, 3> idx = unflatten(flat);
    return {coordinate(0, idx[0]), coordinate(1, idx[1]), coordinate(2, idx[2])};
  }
};

/// First `bands` band functions tabulated on the grid, cell-major:
/// values[flat * bands + j] = lambda_{j+1}(k_flat).
struct BandTable {
  GridSpec grid;
  int bands = 0;
  std::vector<double> values;
  std::string config_hash;
  double tol_eig = kDefaultTolEig;

  double lambda(int flat, int band) const { return values[flat * bands + band]; }
};

struct SpectrumReport {
  std::vector<std::array<double, 2>> bands;  // [min_k, max_k] per band
  std::vector<std::array<double, 2>> gaps;   // open intervals, positive length
  std::vector<std::array<int, 3>> argmax_cells;  // argmax set of band 1
  bool gap_open_between_first_two = false;
  std::string config_hash;
};

enum class ExecutionMode { Serial, Parallel };

using FiberFactory = std::function<CompactGraph(const std::array<double, 3>&)>;

/// Core sweep: eigenvalues of factory(k) for every grid cell.  All fibers
/// must share the same edge set; the per-lambda transfer tables of the scan
/// are computed once per window and shared read-only across cells.  Solver
/// failures are rethrown with the offending k attached (lowest flat index
/// when several cells fail).
BandTable sweep_fibers(const FiberFactory& factory, const GridSpec& grid,
                       int bands, ExecutionMode mode,
                       double tol_eig = kDefaultTolEig);

/// Floquet sweep of the periodic structure: fiber at k applies quasimomentum
/// weights at vertex b.  OpenMP-parallel over grid cells.
BandTable band_sweep(const CompactGraph& g, int b, double gamma_b,
                     const GridSpec& grid, int bands,
                     double tol_eig = kDefaultTolEig);

/// Reference implementation: identical output, strictly sequential.
BandTable band_sweep_serial(const CompactGraph& g, int b, double gamma_b,
                            const GridSpec& grid, int bands,
                            double tol_eig = kDefaultTolEig);

/// Band intervals, gaps between consecutive bands, and the argmax set of the
/// first band (cells within tol of its maximum).
SpectrumReport spectrum_report(const BandTable& table, double tol);

/// Bands of the two-vertex discrete diamond with d+1 parallel edges:
/// eigenvalues of [[d+1, -conj(w)], [-w, d+1]], w = 1 + sum_j e^{ik_j}.
/// The pair sums to 2(d+1) exactly.
std::pair<double, double> discrete_diamond_bands(int d,
                                                 const std::vector<double>& k);

/// CSV rows `k1,k2,k3,lambda_1,...,lambda_J` in lexicographic grid order,
/// 12 significant digits.
void write_band_csv(const BandTable& table, std::ostream& out);

}  // namespace qgband
