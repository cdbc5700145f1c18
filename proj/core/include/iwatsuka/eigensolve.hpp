#pragma once

#include <span>
#include <vector>

namespace iwatsuka {

// Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the lowest
// eigenvalues, inverse iteration for eigenvectors, and a small dense oracle
// (characteristic-recurrence bisection with eigenvalue interlacing) that is
// algorithmically independent of the Sturm path, for cross-checking.

// max|diag| + 2 max|offdiag|; tolerances default relative to this.
double tridiag_scale(std::span<const double> diag,
                     std::span<const double> offdiag);

// Number of eigenvalues strictly below lambda via the Sturm pivot recurrence.
// Zero pivots are replaced by -1e-300, so an eigenvalue exactly at lambda may
// count as below; immaterial for bisection, which only queries interior
// points of shrinking brackets.
int count_below(std::span<const double> diag, std::span<const double> offdiag,
                double lambda);

// Lowest k eigenvalues, each bracket-converged to absolute width <= tol
// (default 1e-10 * scale). Throws std::invalid_argument for k > dimension.
std::vector<double> lowest_eigenvalues(std::span<const double> diag,
                                       std::span<const double> offdiag, int k,
                                       double tol = 0.0);

// Inverse iteration at a given (isolated) eigenvalue estimate. Unit norm,
// residual ||(M - lambda) v|| <= resid_tol (default 1e-8 * scale), sign fixed
// by making the first entry of largest magnitude positive. Starts from a
// fixed-seed pseudo-random vector; throws NumericalError on non-convergence.
std::vector<double> eigenvector(std::span<const double> diag,
                                std::span<const double> offdiag, double lambda,
                                double resid_tol = 0.0, int max_iter = 50);

// Test oracle: the full spectrum for dimension <= 64. Splits at zero
// off-diagonal entries; within each irreducible block isolates the k-th
// leading-minor roots between the (k-1)-th ones and bisects the sign of the
// characteristic recurrence. Independent of count_below / lowest_eigenvalues.
std::vector<double> dense_oracle(std::span<const double> diag,
                                 std::span<const double> offdiag);

struct EigenResult {
  std::vector<double> values;                 // sorted ascending
  std::vector<std::vector<double>> vectors;   // empty unless requested
  std::vector<double> residuals;              // per vector
};

EigenResult lowest_eigenpairs(std::span<const double> diag,
                              std::span<const double> offdiag, int k,
                              double tol = 0.0, bool with_vectors = false);

}  // namespace iwatsuka
