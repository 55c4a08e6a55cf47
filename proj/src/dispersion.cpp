#include "qgband/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>

#include "qgband/format.hpp"

namespace qgband {

std::string format_g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

namespace {

struct SweepError {
  std::exception_ptr eptr;
  int flat = std::numeric_limits<int>::max();
};

}  // namespace

BandTable sweep_fibers(const FiberFactory& factory, const GridSpec& grid,
                       int bands, ExecutionMode mode, double tol_eig) {
  if (grid.n1 < 4 || grid.n2 < 4 || grid.n3 < 4)
    throw Error(ErrorCode::ConfigInvalid, "sweep grid needs n_i >= 4");
  if (bands < 2)
    throw Error(ErrorCode::ConfigInvalid, "sweep needs at least 2 bands");

  // The probe fiber fixes edge data (shared by every fiber) and scan bounds.
  const CompactGraph probe = factory(grid.k_at(0));
  const double length = probe.total_length();
  const double step = M_PI / length;       // mean eigenvalue spacing in s
  const double scan_step = step / 20.0;

  const int cells = grid.cells();
  std::vector<std::vector<EigenvalueHit>> found(cells);
  std::vector<int> counts(cells, 0);

  double lo = default_lambda_lo(probe);
  double s_hi = scan_s_of_lambda(lo) + std::max(2.0, (bands + 2) * step);
  int remaining = cells;

  while (remaining > 0) {
    const double s_lo = scan_s_of_lambda(lo);
    const double hi = std::min(scan_lambda_of_s(s_hi), kLambdaCap);
    const double s_hi_clamped = scan_s_of_lambda(hi);
    const int n =
        std::max(3, static_cast<int>(std::ceil((s_hi_clamped - s_lo) / scan_step)) + 1);
    const double h = (s_hi_clamped - s_lo) / (n - 1);

    std::vector<TransferTable> tables;
    tables.reserve(n);
    for (int i = 0; i < n; ++i)
      tables.push_back(make_transfer_table(probe, scan_lambda_of_s(s_lo + h * i)));

    SweepError failure;
    auto body = [&](int flat) {
      if (counts[flat] >= bands) return;
      try {
        const CompactGraph fiber = factory(grid.k_at(flat));
        // Band crossings and flat bands put distinct roots arbitrarily close
        // together at isolated cells; those cells retry with a denser
        // private scan instead of failing the whole sweep.
        std::vector<EigenvalueHit> hits;
        for (int refine = 0;; ++refine) {
          try {
            if (refine == 0) {
              hits = eigenvalues_from_scan(fiber, s_lo, s_hi_clamped, tables,
                                           tol_eig);
            } else {
              const int dn = (n - 1) * (1 << refine) + 1;
              const double dh = (s_hi_clamped - s_lo) / (dn - 1);
              std::vector<TransferTable> dense;
              dense.reserve(dn);
              for (int i = 0; i < dn; ++i)
                dense.push_back(
                    make_transfer_table(probe, scan_lambda_of_s(s_lo + dh * i)));
              hits = eigenvalues_from_scan(fiber, s_lo, s_hi_clamped, dense,
                                           tol_eig);
            }
            break;
          } catch (const Error& err) {
            if (err.code() != ErrorCode::ScanResolutionTooCoarse || refine >= 8)
              throw;
          }
        }
        for (const EigenvalueHit& hit : hits) {
          if (!found[flat].empty() &&
              std::abs(scan_s_of_lambda(hit.lambda) -
                       scan_s_of_lambda(found[flat].back().lambda)) <= 1e-9)
            continue;
          found[flat].push_back(hit);
          counts[flat] += hit.multiplicity;
        }
      } catch (...) {
#pragma omp critical(qgband_sweep_error)
        if (flat < failure.flat) {
          failure.flat = flat;
          failure.eptr = std::current_exception();
        }
      }
    };

    if (mode == ExecutionMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (int flat = 0; flat < cells; ++flat) body(flat);
    } else {
      for (int flat = 0; flat < cells; ++flat) body(flat);
    }

    if (failure.eptr) {
      try {
        std::rethrow_exception(failure.eptr);
      } catch (Error err) {
        err.has_k = true;
        err.k = grid.k_at(failure.flat);
        throw err;
      }
    }

    remaining = 0;
    int worst = 0;
    for (int flat = 0; flat < cells; ++flat)
      if (counts[flat] < bands) {
        ++remaining;
        worst = std::max(worst, bands - counts[flat]);
      }
    if (remaining > 0) {
      if (hi >= kLambdaCap) {
        int flat = 0;
        while (counts[flat] >= bands) ++flat;
        Error err(ErrorCode::LambdaOutOfRange,
                  "sweep exhausted the lambda range before finding " +
                      std::to_string(bands) + " bands");
        err.has_k = true;
        err.k = grid.k_at(flat);
        throw err;
      }
      lo = scan_lambda_of_s(s_hi_clamped - 3.0 * scan_step);
      s_hi = s_hi_clamped + std::max(2.0, (worst + 2) * step);
    }
  }

  BandTable t;
  t.grid = grid;
  t.bands = bands;
  t.tol_eig = tol_eig;
  t.values.resize(static_cast<size_t>(cells) * bands);
  for (int flat = 0; flat < cells; ++flat) {
    const std::vector<double> lams = flatten(found[flat]);
    for (int j = 0; j < bands; ++j) t.values[flat * bands + j] = lams[j];
  }
  return t;
}

namespace {

FiberFactory floquet_factory(const CompactGraph& g, int b, double gamma_b) {
  if (b < 0 || b >= g.vertex_count())
    throw Error(ErrorCode::UnknownVertex,
                "band_sweep: no vertex " + std::to_string(b));
  return [&g, b, gamma_b](const std::array<double, 3>& k) {
    return apply_floquet(g, b, k, gamma_b);
  };
}

}  // namespace

BandTable band_sweep(const CompactGraph& g, int b, double gamma_b,
                     const GridSpec& grid, int bands, double tol_eig) {
  return sweep_fibers(floquet_factory(g, b, gamma_b), grid, bands,
                      ExecutionMode::Parallel, tol_eig);
}

BandTable band_sweep_serial(const CompactGraph& g, int b, double gamma_b,
                            const GridSpec& grid, int bands, double tol_eig) {
  return sweep_fibers(floquet_factory(g, b, gamma_b), grid, bands,
                      ExecutionMode::Serial, tol_eig);
}

SpectrumReport spectrum_report(const BandTable& table, double tol) {
  if (table.values.empty() || table.bands == 0)
    throw Error(ErrorCode::ConfigInvalid, "spectrum_report: empty band table");
  SpectrumReport r;
  r.config_hash = table.config_hash;
  const int cells = table.grid.cells();
  for (int j = 0; j < table.bands; ++j) {
    double lo = table.lambda(0, j), hi = table.lambda(0, j);
    for (int flat = 1; flat < cells; ++flat) {
      lo = std::min(lo, table.lambda(flat, j));
      hi = std::max(hi, table.lambda(flat, j));
    }
    r.bands.push_back({lo, hi});
  }
  for (int j = 0; j + 1 < table.bands; ++j) {
    const double gap_lo = r.bands[j][1];
    const double gap_hi = r.bands[j + 1][0];
    if (gap_hi > gap_lo) {
      r.gaps.push_back({gap_lo, gap_hi});
      if (j == 0) r.gap_open_between_first_two = true;
    }
  }
  const double max1 = r.bands[0][1];
  for (int flat = 0; flat < cells; ++flat)
    if (table.lambda(flat, 0) >= max1 - tol)
      r.argmax_cells.push_back(table.grid.unflatten(flat));
  return r;
}

std::pair<double, double> discrete_diamond_bands(int d,
                                                 const std::vector<double>& k) {
  if (d < 2)
    throw Error(ErrorCode::ConfigInvalid, "diamond dimension must be >= 2");
  if (static_cast<int>(k.size()) != d)
    throw Error(ErrorCode::ConfigInvalid,
                "diamond needs a quasimomentum component per dimension");
  std::complex<double> w(1.0, 0.0);
  for (double kj : k) w += std::complex<double>(std::cos(kj), std::sin(kj));
  const double a = d + 1.0;
  // Clamp |w| <= d+1 (can be exceeded by rounding only); the complement trick
  // makes lo + hi == 2(d+1) hold exactly in floating point.
  const double r = std::min(std::abs(w), a);
  const double lo = a - r;
  const double hi = 2.0 * a - lo;
  return {lo, hi};
}

void write_band_csv(const BandTable& table, std::ostream& out) {
  out << "k1,k2,k3";
  for (int j = 1; j <= table.bands; ++j) out << ",lambda_" << j;
  out << "\n";
  const int cells = table.grid.cells();
  for (int flat = 0; flat < cells; ++flat) {
    const std::array<double, 3> k = table.grid.k_at(flat);
    out << format_g12(k[0]) << ',' << format_g12(k[1]) << ',' << format_g12(k[2]);
    for (int j = 0; j < table.bands; ++j)
      out << ',' << format_g12(table.lambda(flat, j));
    out << "\n";
  }
}

}  // namespace qgband
