#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iwatsuka/comparison.hpp"
#include "iwatsuka/fiber.hpp"
#include "iwatsuka/profiles.hpp"

namespace iwatsuka {

// A field/potential pair with its tail bounds; the unit every band sweep
// operates on.
struct FiberProblem {
  ProfileSpec field;
  ProfileSpec potential;
  TailBounds tails;
};

FiberProblem make_problem(ProfileSpec field, ProfileSpec potential,
                          const TailSampling& sampling = {});

struct XiSolveMeta {
  double xi = 0.0;
  Interval box;
  double h = 0.0;
  int n_interior = 0;
};

// Band functions on a quasi-momentum grid: bands[n][i] = lambda_{n+1}(xi_i),
// strictly increasing in n at every grid point (enforced).
struct BandSweep {
  std::vector<double> xi_grid;
  std::vector<std::vector<double>> bands;
  std::vector<XiSolveMeta> meta;
  int k = 0;
};

// Per-xi fiber solves with adaptive truncation; independent xi jobs run on
// opts.threads workers, results are aggregated in grid order. Throws
// NumericalError for non-confining tail configurations and for eigenvalue
// collisions (gap below gap_tol_scale * scale, reported with the xi).
BandSweep sweep(const FiberProblem& problem, std::span<const double> xi_grid,
                int k, const SolverOptions& opts = {});

// Side convention of the tail sandwich: xi -> -infinity pairs with the +
// tail bounds (the potential well escapes to x = +infinity), xi -> +infinity
// with the - bounds.
struct TailEntry {
  int band = 0;        // 1-based
  Side side = Side::Plus;
  double xi = 0.0;     // sweep endpoint used for the estimate
  double estimate = 0.0;
  double lo = 0.0;     // b_under (2n-1) + w_under
  double hi = 0.0;     // b_over (2n-1) + w_over
  // The tail sandwich needs b_under > 0 on this side; on the divergent side
  // of a sign-changing field the interval carries no meaning and the entry
  // is reported without a verdict.
  bool applicable = true;
  bool inside = false;  // within [lo - tail_tol, hi + tail_tol]
  double residual = 0.0;  // distance from the estimate to [lo, hi]
};

struct NonconstancyEntry {
  int band = 0;
  bool by_criterion = false;    // the two tail intervals are disjoint
  bool by_oscillation = false;  // observed max-min exceeds osc_tol
  bool nonconstant = false;
};

struct BandDiagnostics {
  double min_gap = 0.0;
  std::vector<double> oscillation;  // per band, max - min over the sweep
  std::vector<TailEntry> tail_report;
  std::vector<NonconstancyEntry> nonconstancy;
  double lipschitz_max = 0.0;       // max |dlambda/dxi| observed
  double lipschitz_bound = 0.0;     // 2 max|xi + A_y| perturbation bound
  std::optional<bool> sandwich_ok;  // filled by the caller when a sandwich
                                    // check was run; never computed here
  double tail_tol = 0.0;
  double osc_tol = 0.0;
};

// Pure post-processing of the sweep data; no additional solves.
BandDiagnostics diagnose(const BandSweep& s, const TailBounds& t,
                         double tail_tol = 5e-2, double osc_tol = 1e-3);

struct SandwichReport {
  bool ok = false;
  std::string reason;            // set when ok is false
  double x_xi = 0.0;
  double k_eps = 0.0;
  double eps = 0.0;
  Side side = Side::Plus;
  std::optional<int> violating_node;
  std::optional<double> violating_x;
  std::vector<double> under_values;
  std::vector<double> fiber_values;
  std::vector<double> over_values;
};

// Tail sandwich witness at a single xi: verifies (a) the pointwise potential
// inequality  under + w_under - eps <= V_xi <= over + w_over + eps  on every
// grid node, with the four piecewise envelopes built from a computed K_eps
// witness, and (b) the eigenvalue ordering lambda_n(under) <= lambda_n(H[xi])
// <= lambda_n(over) for n <= k. Negative xi checks the + side; positive xi
// is handled by reflecting the profiles and reusing the + side code.
// A pointwise violation is a legitimate outcome (xi not deep enough) and is
// reported, not thrown.
SandwichReport sandwich_check(const FiberProblem& problem, double xi,
                              double eps, int k,
                              const SolverOptions& opts = {});

struct ExportContext {
  TailBounds tails;
  ACDecision ac;
  SolverOptions options;
  std::optional<SandwichReport> sandwich;
};

// Writes bands.csv ("xi,lambda_1,...,lambda_k", one row per grid point,
// 17-significant-digit decimals) and meta.json (tail bounds, AC decision,
// solver parameters, diagnostics, per-xi box/h). Deterministic bytes for
// identical inputs. Throws std::invalid_argument on an empty sweep.
void export_sweep(const BandSweep& s, const BandDiagnostics& d,
                  const ExportContext& ctx,
                  const std::filesystem::path& directory);

}  // namespace iwatsuka
