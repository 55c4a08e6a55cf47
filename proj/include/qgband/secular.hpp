#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "qgband/edge_transfer.hpp"
#include "qgband/graph.hpp"

namespace qgband {

inline constexpr double kDefaultTolEig = 1e-8;
inline constexpr double kLambdaCap = 1e6;

/// Boundary-condition matrix in the per-edge coefficients (A_e, B_e) of
/// u_e = A_e c + B_e s: columns (2e, 2e+1), one row per vertex-condition
/// equation, sum_v deg(v) = 2E rows in total.
struct SecularMatrix {
  Eigen::MatrixXcd m;
};

/// Per-edge transfer matrices at a fixed lambda.  The k-independent part of
/// the fiber assembly: one table serves every quasimomentum at this lambda.
struct TransferTable {
  double lambda = 0.0;
  std::vector<TransferMatrix> edges;
};

TransferTable make_transfer_table(const CompactGraph& g, double lambda);

SecularMatrix secular_matrix(const CompactGraph& g, double lambda);
SecularMatrix secular_matrix(const CompactGraph& g, const TransferTable& table);

/// Smallest singular value of the secular matrix divided by the largest;
/// continuous in lambda, zero exactly at eigenvalues.
double sigma_min(const CompactGraph& g, double lambda);

struct EigenvalueHit {
  double lambda = 0.0;
  int multiplicity = 1;
  double sigma = 0.0;  // relative sigma_min at acceptance
};

/// Conservative lower bound for the spectrum in the presence of attractive
/// delta couplings and potentials.
double default_lambda_lo(const CompactGraph& g);

/// All eigenvalues in [lambda_lo, lambda_hi] with multiplicities.  Scans
/// sigma_min on a uniform grid in s = sign(lambda)sqrt(|lambda|) with step
/// (pi/L_total)/20, refines each local minimum by golden section to width
/// 1e-12 in s, and accepts minima with sigma <= tol_eig.  Multiplicity
/// counts singular values within 10*tol_eig of zero (relative).  Distinct
/// accepted roots closer than two scan steps raise ScanResolutionTooCoarse;
/// refine > 1 shrinks the step (and the two-step threshold) by that factor.
std::vector<EigenvalueHit> eigenvalues_in(const CompactGraph& g,
                                          double lambda_lo, double lambda_hi,
                                          double tol_eig = kDefaultTolEig,
                                          int refine = 1);

/// Scan variable maps: s = sign(lambda) sqrt(|lambda|).
double scan_s_of_lambda(double lambda);
double scan_lambda_of_s(double s);

/// sigma_min ratio from a precomputed transfer table through the Gram
/// matrix: ~10x cheaper than the SVD but with an accuracy floor ~1e-8;
/// good for locating scan minima only.
double sigma_min_scan(const CompactGraph& g, const TransferTable& table);

/// Singular values of the secular matrix, descending.
Eigen::VectorXd secular_singular_values(const CompactGraph& g, double lambda);

/// Number of eigenvalues strictly below lambda, computed without scanning:
/// Sturm oscillation counts on the edges plus the negative inertia of the
/// vertex Schur complement.  Exact at any generic probe point; empty when
/// lambda sits too close to an edge Dirichlet level or to an eigenvalue for
/// the reduction to be trustworthy (any nearby probe works instead).
std::optional<int> eigenvalue_count_below(const CompactGraph& g,
                                          double lambda);

/// Same extraction contract as eigenvalues_in, but the coarse scan reads
/// precomputed tables: tables[i] at lambda(s_lo + i*h), h uniform on
/// [s_lo, s_hi].  Lets torus sweeps share one table set across all k, since
/// transfer matrices depend on edges only.
std::vector<EigenvalueHit> eigenvalues_from_scan(
    const CompactGraph& g, double s_lo, double s_hi,
    const std::vector<TransferTable>& tables,
    double tol_eig = kDefaultTolEig);

/// Lowest `count` eigenvalues (counted with multiplicity), scanning upward
/// from default_lambda_lo and growing the window as needed.  Windows whose
/// roots pack tighter than two scan steps are rescanned at up to 2048x
/// resolution before the coarseness error is allowed to propagate.
std::vector<EigenvalueHit> first_eigenvalues(const CompactGraph& g, int count,
                                             double tol_eig = kDefaultTolEig);

/// Expands hits into an ascending list repeating each eigenvalue
/// `multiplicity` times.
std::vector<double> flatten(const std::vector<EigenvalueHit>& hits);

struct EigenSolution {
  double lambda = 0.0;
  int multiplicity = 1;
  /// True when multiplicity > 1: `coefficients` then spans the whole null
  /// space and the representative column is not canonical.
  bool ambiguous = false;
  /// 2E x multiplicity; column 0 is the returned representative, each
  /// column L2-normalized over the graph.
  Eigen::MatrixXcd coefficients;
  /// [vertex][position in adjacency list] -> inward derivative u'_e(v),
  /// taken in the direction into the edge, for the representative column.
  std::vector<std::vector<Complex>> vertex_derivatives;
  /// Representative was rotated to be real (graphs without complex phases).
  bool real_valued = false;
};

EigenSolution eigenfunction(const CompactGraph& g, double lambda,
                            double tol_eig = kDefaultTolEig);

/// (u_e(x), u_e'(x)) of the representative solution.
std::pair<Complex, Complex> edge_value(const CompactGraph& g,
                                       const EigenSolution& sol, int e,
                                       double x);

}  // namespace qgband
