#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "iwatsuka/common.hpp"
#include "iwatsuka/gauge.hpp"
#include "iwatsuka/profiles.hpp"

namespace iwatsuka {

// Uniform Dirichlet grid: interior nodes x_j = left + (j+1) h, j = 0..n-1,
// h = (right - left) / (n_interior + 1).
struct GridSpec {
  double left = 0.0;
  double right = 0.0;
  int n_interior = 0;

  double h() const { return (right - left) / (n_interior + 1); }
  double node(int j) const { return left + (j + 1) * h(); }
};

void validate_grid(const GridSpec& g);  // left < right, n_interior >= 3

// Second-order central-difference discretization of
//   -d^2/dx^2 + (xi + A_y(x))^2 + W(x)
// with Dirichlet truncation: symmetric tridiagonal with
// diag[j] = 2/h^2 + V_xi(x_j), offdiag = -1/h^2.
struct FiberMatrix {
  GridSpec grid;
  std::vector<double> diag;
  std::vector<double> offdiag;
  double xi = 0.0;
};

double effective_potential(const GaugeFunction& g, const ProfileSpec& w,
                           double xi, double x);

FiberMatrix assemble_fiber(const GaugeFunction& g, const ProfileSpec& w,
                           double xi, const GridSpec& grid);

struct BoxOptions {
  int n_bands = 1;
  // Confinement clearance of the box endpoints above the level estimate.
  // 40 puts the Dirichlet truncation error two orders below the
  // second-order discretization error at the default grid spacing.
  double margin = 40.0;
  double h_max = 0.0;       // 0 = auto: max(1e-2 / sqrt(B_char), 1e-3)
  double scan_cap = 65536.0;
};

// Truncation box for the fiber problem: endpoints found by scanning outward
// from the turning points of xi + A_y (or from the potential minimum when
// there is none) until V_xi exceeds a harmonic-oscillator-based estimate
//   lambda_est = V_floor + (2 n_bands - 1) max(b_over+, b_over-) + w_over
// by at least `margin`. Throws NumericalError if the potential does not
// confine within the scan cap (pass an explicit box in that case).
GridSpec select_box(const GaugeFunction& g, const ProfileSpec& w,
                    const TailBounds& tails, double xi, const BoxOptions& o);

// Scan anchors and the level estimate behind select_box; the band sweep
// shares them.
struct FiberSeeding {
  std::vector<double> seeds;  // turning points, or the potential minimum
  double lambda_est = 0.0;
  double b_char = 0.0;
};

FiberSeeding fiber_seeding(const GaugeFunction& g, const ProfileSpec& w,
                           const TailBounds& tails, double xi, int n_bands);

// Generic-potential versions of the same machinery; the comparison operators
// and the sandwich check reuse them.
GridSpec select_box_for_potential(const std::function<double(double)>& v,
                                  std::span<const double> seeds,
                                  double lambda_est, double margin,
                                  double h_max, double scan_cap = 65536.0);

// diag/offdiag of the discretized -d^2 + v on the grid.
std::pair<std::vector<double>, std::vector<double>> assemble_tridiagonal(
    const std::function<double(double)>& v, const GridSpec& grid);

double default_h_max(double b_char);

// Grid over an explicit interval under the h policy.
GridSpec grid_for_interval(const Interval& box, double h_max);

// Options shared by every eigenvalue workflow.
struct SolverOptions {
  double h_max = 0.0;            // 0 = auto per field scale
  double margin = 40.0;
  std::optional<Interval> box;   // explicit truncation box, disables adaptation
  double eigen_tol = 0.0;        // bisection width, 0 = auto 1e-10 * scale
  double box_tol = 1e-8;
  double gap_tol_scale = 1e-9;   // simplicity threshold, relative to scale
  double scan_cap = 65536.0;
  int threads = 1;
};

struct PotentialSolve {
  std::vector<double> values;
  GridSpec grid;
};

// Lowest k eigenvalues of -d^2 + v with adaptive Dirichlet truncation:
// initial box from select_box_for_potential, then the box is doubled until
// v(endpoints) >= computed lambda_k + margin (a-posteriori validation; the
// a-priori harmonic estimate can undershoot for strongly tilted wells).
// An explicit box in opts is used as-is.
PotentialSolve solve_potential_lowest(const std::function<double(double)>& v,
                                      std::span<const double> seeds,
                                      double lambda_est, double b_char, int k,
                                      const SolverOptions& opts);

}  // namespace iwatsuka
