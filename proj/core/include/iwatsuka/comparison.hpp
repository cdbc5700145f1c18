#pragma once

#include <optional>
#include <span>
#include <vector>

#include "iwatsuka/fiber.hpp"
#include "iwatsuka/profiles.hpp"

namespace iwatsuka {

// Comparison operator H_{omega, omega_tilde}[alpha]: a harmonic well of
// frequency omega centered at alpha for x >= x0, glued continuously to a
// linear-slope-omega_tilde branch for x < x0. Its eigenvalues sigma_n(alpha)
// converge to the pure harmonic levels (2n-1) omega as alpha -> +infinity.
struct ComparisonSpec {
  double omega = 1.0;        // > 0
  double omega_tilde = 1.0;  // > 0
  double x0 = 0.0;
  double alpha = 0.0;
};

void validate_comparison(const ComparisonSpec& s);

// omega^2 (x - alpha)^2 for x >= x0,
// (omega_tilde (x - x0) + omega (x0 - alpha))^2 for x < x0.
double comparison_potential(const ComparisonSpec& s, double x);

std::vector<double> comparison_eigs(const ComparisonSpec& s, int k,
                                    const SolverOptions& opts = {});

struct ConvergenceRow {
  double alpha = 0.0;
  std::vector<double> sigma;  // sigma_1 .. sigma_k
  std::vector<double> err;    // |sigma_n - (2n-1) omega|
};

struct ConvergenceStudy {
  double omega = 0.0;
  double omega_tilde = 0.0;
  double x0 = 0.0;
  std::vector<ConvergenceRow> rows;
  // Per band: first row index from which the error column is non-increasing
  // up to `slack` (the solver's eigenvalue resolution); -1 if never.
  std::vector<int> monotone_from;
  double slack = 0.0;
};

ConvergenceStudy convergence_study(double omega, double omega_tilde, double x0,
                                   std::span<const double> alphas, int k,
                                   const SolverOptions& opts = {});

enum class Side { Plus, Minus };
enum class Envelope { Under, Over };

// One of the four piecewise comparison potentials of the tail sandwich.
// For side Plus / envelope Under:
//   (b+_under - 2 eps)^2 (x - x_xi)^2                     for x >= -K_eps,
//   ((B_min - eps)(x + K_eps)
//      + (b+_under - 2 eps)(-K_eps - x_xi))^2             for x <  -K_eps,
// with B_min = min(b+_under, b-_under); the Over envelope replaces the
// slopes by b+_over + 2 eps and B_max + eps, and side Minus mirrors the
// branch condition to x <= K_eps with the minus-side bounds.
struct SandwichEnvelope {
  Side side = Side::Plus;
  Envelope envelope = Envelope::Under;
  double eps = 0.0;    // in (0, min(b+_under, b-_under)/2)
  double k_eps = 0.0;  // > 0
  double x_xi = 0.0;
};

double sandwich_envelope_eval(const SandwichEnvelope& p, const TailBounds& t,
                            double x);

struct LowerBoundCheck {
  bool ok = false;
  bool precondition_ok = true;           // alpha > x0 required
  std::optional<double> violating_x;
};

// Verifies pointwise, on a dense grid, the operator lower bound
//   min(1, omega_tilde/omega)^2 omega^2 x^2 <= shifted comparison potential
// that holds for all alpha > x0.
LowerBoundCheck operator_lower_bound_check(const ComparisonSpec& s,
                                           int grid_points = 100000);

}  // namespace iwatsuka
