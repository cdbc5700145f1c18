#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "iwatsuka/bands.hpp"
#include "iwatsuka/profiles.hpp"

namespace iwatsuka {

// Thin curved quantum layer in a homogeneous field B0: a planar unit-speed
// curve s -> (x(s), z(s)) swept along y. The effective model on the curve is
// a fiber problem with field B0 x'(s) and potential -kappa(s)^2 / 4.

// User-supplied arc-length samples (columns s, x, z).
struct CurveSamples {
  std::vector<double> s;
  std::vector<double> x;
  std::vector<double> z;
};

struct LineCurve {
  double angle = 0.0;     // tangent direction, radians
  double range = 10.0;    // sampled on [-range, range]
  double spacing = 0.01;
};

// Straight lead-in at angle_in, circular arc of the given radius turning to
// angle_out, straight lead-out. Curvature jumps at the two joins.
struct CircularBendCurve {
  double radius = 1.0;
  double angle_in = 0.0;
  double angle_out = 0.0;
  double lead = 5.0;
  double spacing = 0.01;
};

// C-infinity bend: tangent angle angle_in + dtheta (1 + tanh(s/scale)) / 2,
// so kappa = dtheta / (2 scale) sech^2(s/scale) with closed-form derivatives.
struct SmoothBendCurve {
  double angle_in = 0.0;
  double dtheta = 0.0;
  double scale = 1.0;
  double lead = 5.0;      // sampled on +-(lead + 10 scale)
  double spacing = 0.01;
};

// Racetrack-style chicane: straight, arc turning +dtheta, straight middle,
// arc turning back -dtheta, straight. Both tails run at angle 0, so the
// effective field returns to B0 with a compactly supported excursion.
struct RacetrackCurve {
  double radius = 1.0;
  double dtheta = 0.0;
  double lead = 5.0;
  double middle = 2.0;
  double spacing = 0.01;
};

using CurveSpec = std::variant<CurveSamples, LineCurve, CircularBendCurve,
                               SmoothBendCurve, RacetrackCurve>;

// Sampled curve with metadata; builtins carry closed-form reference
// evaluators (used for exact tails and as test oracles) and join locations
// where the curvature is discontinuous.
struct MaterializedCurve {
  std::vector<double> s;
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> joins;
  // Tangent angles at s -> -/+ infinity; set for builtins (exact tails).
  std::optional<std::pair<double, double>> tail_theta;
  // Closed-form evaluators, null for CurveSamples.
  std::function<double(double)> exact_xdot;
  std::function<double(double)> exact_kappa;
  std::function<double(double)> exact_kappa_dot;
  std::function<double(double)> exact_kappa_ddot;
};

MaterializedCurve materialize(const CurveSpec& c);

// Finite-difference geometry tables on the sample grid: first derivatives by
// central differences (one-sided at the ends), kappa = hypot(x'', z'') from
// 3-point second differences, kappa', kappa'' by further differencing.
// Validates the unit-speed invariant x'^2 + z'^2 = 1 to arc_tol (exact
// tangent data for builtins, finite differences for samples); throws
// std::invalid_argument with the worst offending s on violation.
struct CurveTables {
  std::vector<double> s;
  std::vector<double> xdot;
  std::vector<double> zdot;
  std::vector<double> kappa;
  std::vector<double> kappa_dot;
  std::vector<double> kappa_ddot;
  std::vector<double> joins;
  double kappa_max = 0.0;
};

CurveTables curvature(const CurveSpec& c, double arc_tol = 1e-8);

// Effective fiber data: b_eff = B0 x'(s) and w_eff = -kappa^2/4 as tabulated
// profiles. Tail bounds are exact for builtins (declared asymptotics of the
// straight/settled tails) and sampled, flagged heuristic, for free curves.
struct EffectiveProfile {
  ProfileSpec b_eff;
  ProfileSpec w_eff;
  std::vector<double> s;
  std::vector<double> kappa;
  double b0 = 0.0;
  TailBounds tails;
  bool tails_exact = false;
  std::vector<double> joins;
};

EffectiveProfile effective_profile(const CurveSpec& c, double b0,
                                   double arc_tol = 1e-8);

enum class LayerClause {
  CurvatureGap,         // cond_1_3 shape: kappa^2 gap < 4 B0 (x'-tail gap)
  CurvatureGapSwapped,
  SignSplit,            // cond_1_4 shape: opposite-sign x' tails
  SignSplitSwapped,
  None
};

std::string_view to_string(LayerClause c);

struct LayerACReport {
  ACDecision decision;
  LayerClause clause = LayerClause::None;
  // Margin of the curvature-gap inequality in its 4 B0 scaled form.
  double scaled_margin = 0.0;
};

// Absolute-continuity verdict for the effective layer model; delegates to
// ac_condition on the (b_eff, w_eff) tails and reports which clause fired.
LayerACReport layer_ac_check(const EffectiveProfile& e);

struct LayerGeometry {
  double half_width = 0.0;  // a > 0, with a * kappa_max < 1
};

struct LayerPotentialValue {
  double value = 0.0;
  bool near_join = false;  // kappa'' is not defined at piecewise joins
};

// Width-resolved layer potential
//   V(s,u) = -kappa^2/(4 f^2) - a u kappa''/(2 f^3) - 5 a^2 u^2 kappa'^2/(4 f^4),
// f = 1 - a u kappa(s), evaluated from the geometry tables (linear
// interpolation in s). Requires |u| < 1 and a kappa_max < 1; throws
// NumericalError if f <= 0.
LayerPotentialValue layer_potential(const CurveTables& t,
                                    const LayerGeometry& geom, double s,
                                    double u);

// Band sweep of the effective model; delegates to bands::sweep.
BandSweep layer_bands(const EffectiveProfile& e, std::span<const double> xi,
                      int k, const SolverOptions& opts = {});

}  // namespace iwatsuka
