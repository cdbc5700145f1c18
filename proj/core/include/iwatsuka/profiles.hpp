#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iwatsuka {

// Field and potential profiles B(x), W(x): bounded functions on the line,
// given in closed form or as tabulated samples with declared constant tails.

struct ConstantProfile {
  double value = 0.0;
};

// left for x < x_jump, right for x >= x_jump
struct StepProfile {
  double left = 0.0;
  double right = 0.0;
  double x_jump = 0.0;
};

// (left+right)/2 + (right-left)/2 * tanh((x-center)/width)
struct TanhStepProfile {
  double left = 0.0;
  double right = 0.0;
  double center = 0.0;
  double width = 1.0;
};

// base + amplitude * (1 - t^2)^m on the support, base outside;
// t is the support-normalized coordinate, so the profile meets its base
// value like (x - support_left)^m at the edges.
struct BumpProfile {
  double base = 0.0;
  double amplitude = 0.0;
  double support_left = -1.0;
  double support_right = 1.0;
  int exponent = 1;
};

// values.size() == breakpoints.size() + 1; right-continuous at breakpoints.
struct PiecewiseConstantProfile {
  std::vector<double> breakpoints;
  std::vector<double> values;
};

// Linear interpolation inside [x.front(), x.back()], declared constant tail
// values outside.
struct TabulatedProfile {
  std::vector<double> x;
  std::vector<double> y;
  double left_tail = 0.0;
  double right_tail = 0.0;
};

using ProfileSpec = std::variant<ConstantProfile, StepProfile, TanhStepProfile,
                                 BumpProfile, PiecewiseConstantProfile,
                                 TabulatedProfile>;

// Throws std::invalid_argument on malformed data (non-increasing tabulated
// abscissae, exponent < 1, size mismatches, non-positive width).
void validate_profile(const ProfileSpec& p);

double eval_profile(const ProfileSpec& p, double x);

// q(x) = p(-x); equality is a.e. for jump kinds (the value at a jump point
// moves to the other side of the discontinuity).
ProfileSpec reflect_profile(const ProfileSpec& p);

// Radius r such that for |x| > r the profile sits at its tail values
// (up to the asymptotic approach of the tanh kind).
double structure_radius(const ProfileSpec& p);

struct TailSampling {
  double window = 100.0;
  int n_points = 100000;
  // Window start defaults to the edge of the profile's structure
  // (for tabulated data: the first/last sample).
  std::optional<double> start_plus;
  std::optional<double> start_minus;
};

// Per-profile tail envelopes: under/over on each half line.
struct ProfileTails {
  double under_plus = 0.0;
  double over_plus = 0.0;
  double under_minus = 0.0;
  double over_minus = 0.0;
  bool exact = true;
};

ProfileTails profile_tails(const ProfileSpec& p, const TailSampling& s = {});

// The eight tail quantities of the field/potential pair.
struct TailBounds {
  double b_under_plus = 0.0;
  double b_over_plus = 0.0;
  double b_under_minus = 0.0;
  double b_over_minus = 0.0;
  double w_under_plus = 0.0;
  double w_over_plus = 0.0;
  double w_under_minus = 0.0;
  double w_over_minus = 0.0;
  // Provenance: exact closed-form bounds, or sampled over a finite window.
  // Downstream absolute-continuity verdicts on sampled bounds are heuristic.
  bool exact = true;
  double window = 0.0;
  int n_points = 0;
};

TailBounds tail_bounds(const ProfileSpec& b, const ProfileSpec& w,
                       const TailSampling& s = {});

// Interchanges the +/- indices of every field.
TailBounds swap_sides(const TailBounds& t);

enum class ACCondition { Cond13, Cond14, Cond13Swapped, Cond14Swapped, None };

std::string_view to_string(ACCondition c);

struct ACDecision {
  bool verdict = false;
  ACCondition matched = ACCondition::None;
  double margin = 0.0;  // slack of the decisive strict inequality
  // Diagnostic list of every condition that holds, in check order.
  std::vector<ACCondition> all_matched;
};

// Absolute-continuity test: checks, in order, the two sufficient conditions
//   cond_1_3:  b+_under > 0 and b-_under > 0 and b+_under >= b-_over
//              and (w-_over - w+_under < b+_under - b-_over)
//   cond_1_4:  b+_under > 0 and b-_over < 0
// and then both with the +/- indices interchanged (the _swapped variants).
// The ">=" is non-strict, the gap inequality strict. Returns the first
// match; these names are the wire format of the accheck reports.
ACDecision ac_condition(const TailBounds& t);

struct CatalogEntry {
  std::string name;
  ProfileSpec field;
  ProfileSpec potential;
  std::string note;
};

// Named (B, W) pairs covering the standard configurations: constant field,
// increasing step, smooth step, sign-changing field, compactly supported
// field excursion, step with electric potential.
const std::vector<CatalogEntry>& builtin_catalog();
const CatalogEntry* find_catalog_entry(std::string_view name);

}  // namespace iwatsuka
