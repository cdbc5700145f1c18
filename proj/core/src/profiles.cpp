#include "iwatsuka/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iwatsuka/common.hpp"

namespace iwatsuka {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

double bump_shape(const BumpProfile& p, double x) {
  const double half = 0.5 * (p.support_right - p.support_left);
  const double t = (x - 0.5 * (p.support_left + p.support_right)) / half;
  if (t <= -1.0 || t >= 1.0) return 0.0;
  return std::pow(1.0 - t * t, p.exponent);
}

}  // namespace

void validate_profile(const ProfileSpec& p) {
  std::visit(
      Overload{
          [](const ConstantProfile&) {},
          [](const StepProfile&) {},
          [](const TanhStepProfile& t) {
            if (!(t.width > 0.0))
              throw std::invalid_argument("tanh_step: width must be > 0");
          },
          [](const BumpProfile& b) {
            if (b.exponent < 1)
              throw std::invalid_argument("bump: exponent must be >= 1");
            if (!(b.support_left < b.support_right))
              throw std::invalid_argument("bump: empty support");
          },
          [](const PiecewiseConstantProfile& pw) {
            if (pw.values.size() != pw.breakpoints.size() + 1)
              throw std::invalid_argument(
                  "piecewise_constant: need breakpoints.size() + 1 values");
            if (!std::is_sorted(pw.breakpoints.begin(), pw.breakpoints.end(),
                                std::less_equal<double>()))
              throw std::invalid_argument(
                  "piecewise_constant: breakpoints must be strictly increasing");
            if (pw.breakpoints.empty())
              throw std::invalid_argument(
                  "piecewise_constant: need at least one breakpoint");
          },
          [](const TabulatedProfile& t) {
            if (t.x.size() != t.y.size())
              throw std::invalid_argument(
                  "tabulated: x_samples and y_samples differ in length");
            if (t.x.size() < 2)
              throw std::invalid_argument("tabulated: need at least 2 samples");
            for (std::size_t i = 1; i < t.x.size(); ++i)
              if (!(t.x[i] > t.x[i - 1]))
                throw std::invalid_argument(
                    "tabulated: x_samples must be strictly increasing");
          },
      },
      p);
}

double eval_profile(const ProfileSpec& p, double x) {
  return std::visit(
      Overload{
          [](const ConstantProfile& c) { return c.value; },
          [x](const StepProfile& s) {
            return x < s.x_jump ? s.left : s.right;
          },
          [x](const TanhStepProfile& t) {
            const double mid = 0.5 * (t.left + t.right);
            const double amp = 0.5 * (t.right - t.left);
            return mid + amp * std::tanh((x - t.center) / t.width);
          },
          [x](const BumpProfile& b) {
            return b.base + b.amplitude * bump_shape(b, x);
          },
          [x](const PiecewiseConstantProfile& pw) {
            const auto it = std::upper_bound(pw.breakpoints.begin(),
                                             pw.breakpoints.end(), x);
            return pw.values[static_cast<std::size_t>(
                it - pw.breakpoints.begin())];
          },
          [x](const TabulatedProfile& t) {
            if (x < t.x.front()) return t.left_tail;
            if (x > t.x.back()) return t.right_tail;
            const auto it =
                std::lower_bound(t.x.begin(), t.x.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - t.x.begin());
            if (t.x[i] == x) return t.y[i];
            const double f = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
            return t.y[i - 1] + f * (t.y[i] - t.y[i - 1]);
          },
      },
      p);
}

ProfileSpec reflect_profile(const ProfileSpec& p) {
  return std::visit(
      Overload{
          [](const ConstantProfile& c) -> ProfileSpec { return c; },
          [](const StepProfile& s) -> ProfileSpec {
            return StepProfile{s.right, s.left, -s.x_jump};
          },
          [](const TanhStepProfile& t) -> ProfileSpec {
            return TanhStepProfile{t.right, t.left, -t.center, t.width};
          },
          [](const BumpProfile& b) -> ProfileSpec {
            return BumpProfile{b.base, b.amplitude, -b.support_right,
                               -b.support_left, b.exponent};
          },
          [](const PiecewiseConstantProfile& pw) -> ProfileSpec {
            PiecewiseConstantProfile r;
            r.breakpoints.assign(pw.breakpoints.rbegin(),
                                 pw.breakpoints.rend());
            for (double& b : r.breakpoints) b = -b;
            r.values.assign(pw.values.rbegin(), pw.values.rend());
            return r;
          },
          [](const TabulatedProfile& t) -> ProfileSpec {
            TabulatedProfile r;
            r.x.assign(t.x.rbegin(), t.x.rend());
            for (double& v : r.x) v = -v;
            r.y.assign(t.y.rbegin(), t.y.rend());
            r.left_tail = t.right_tail;
            r.right_tail = t.left_tail;
            return r;
          },
      },
      p);
}

double structure_radius(const ProfileSpec& p) {
  return std::visit(
      Overload{
          [](const ConstantProfile&) { return 0.0; },
          [](const StepProfile& s) { return std::abs(s.x_jump); },
          [](const TanhStepProfile& t) {
            // tanh is within 5e-18 of its limit 20 widths out
            return std::abs(t.center) + 20.0 * t.width;
          },
          [](const BumpProfile& b) {
            return std::max(std::abs(b.support_left),
                            std::abs(b.support_right));
          },
          [](const PiecewiseConstantProfile& pw) {
            return std::max(std::abs(pw.breakpoints.front()),
                            std::abs(pw.breakpoints.back()));
          },
          [](const TabulatedProfile& t) {
            return std::max(std::abs(t.x.front()), std::abs(t.x.back()));
          },
      },
      p);
}

namespace {

ProfileTails sampled_tails(const ProfileSpec& p, const TailSampling& s) {
  ProfileTails r;
  r.exact = false;
  const double r_struct = structure_radius(p);
  const double a_plus = s.start_plus.value_or(r_struct);
  const double a_minus = s.start_minus.value_or(-r_struct);
  // the envelopes describe open half lines, so the window start itself is
  // excluded from the sample
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 1; i <= s.n_points; ++i) {
    const double x = a_plus + s.window * i / s.n_points;
    const double v = eval_profile(p, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  r.under_plus = lo;
  r.over_plus = hi;
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (int i = 1; i <= s.n_points; ++i) {
    const double x = a_minus - s.window * i / s.n_points;
    const double v = eval_profile(p, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  r.under_minus = lo;
  r.over_minus = hi;
  return r;
}

}  // namespace

ProfileTails profile_tails(const ProfileSpec& p, const TailSampling& s) {
  validate_profile(p);
  return std::visit(
      Overload{
          [](const ConstantProfile& c) {
            return ProfileTails{c.value, c.value, c.value, c.value, true};
          },
          [](const StepProfile& st) {
            return ProfileTails{st.right, st.right, st.left, st.left, true};
          },
          [](const TanhStepProfile& t) {
            // the limits are attained monotonically in the tails, so the
            // envelopes coincide with them
            return ProfileTails{t.right, t.right, t.left, t.left, true};
          },
          [](const BumpProfile& b) {
            return ProfileTails{b.base, b.base, b.base, b.base, true};
          },
          [](const PiecewiseConstantProfile& pw) {
            return ProfileTails{pw.values.back(), pw.values.back(),
                                pw.values.front(), pw.values.front(), true};
          },
          [&s, &p](const TabulatedProfile&) { return sampled_tails(p, s); },
      },
      p);
}

TailBounds tail_bounds(const ProfileSpec& b, const ProfileSpec& w,
                       const TailSampling& s) {
  const ProfileTails tb = profile_tails(b, s);
  const ProfileTails tw = profile_tails(w, s);
  TailBounds t;
  t.b_under_plus = tb.under_plus;
  t.b_over_plus = tb.over_plus;
  t.b_under_minus = tb.under_minus;
  t.b_over_minus = tb.over_minus;
  t.w_under_plus = tw.under_plus;
  t.w_over_plus = tw.over_plus;
  t.w_under_minus = tw.under_minus;
  t.w_over_minus = tw.over_minus;
  t.exact = tb.exact && tw.exact;
  if (!t.exact) {
    t.window = s.window;
    t.n_points = s.n_points;
  }
  return t;
}

TailBounds swap_sides(const TailBounds& t) {
  TailBounds r = t;
  std::swap(r.b_under_plus, r.b_under_minus);
  std::swap(r.b_over_plus, r.b_over_minus);
  std::swap(r.w_under_plus, r.w_under_minus);
  std::swap(r.w_over_plus, r.w_over_minus);
  return r;
}

std::string_view to_string(ACCondition c) {
  switch (c) {
    case ACCondition::Cond13: return "cond_1_3";
    case ACCondition::Cond14: return "cond_1_4";
    case ACCondition::Cond13Swapped: return "cond_1_3_swapped";
    case ACCondition::Cond14Swapped: return "cond_1_4_swapped";
    case ACCondition::None: return "none";
  }
  return "none";
}

namespace {

// Gap-condition margin; negative when the condition fails.
bool check_13(const TailBounds& t, double& margin) {
  if (!(t.b_under_plus > 0.0 && t.b_under_minus > 0.0)) return false;
  if (!(t.b_under_plus >= t.b_over_minus)) return false;
  margin = (t.b_under_plus - t.b_over_minus) -
           (t.w_over_minus - t.w_under_plus);
  return margin > 0.0;
}

bool check_14(const TailBounds& t, double& margin) {
  if (!(t.b_under_plus > 0.0 && t.b_over_minus < 0.0)) return false;
  margin = std::min(t.b_under_plus, -t.b_over_minus);
  return true;
}

}  // namespace

ACDecision ac_condition(const TailBounds& t) {
  const TailBounds sw = swap_sides(t);
  ACDecision d;
  double margin = 0.0;

  const auto consider = [&d](ACCondition c, double m) {
    d.all_matched.push_back(c);
    if (!d.verdict) {
      d.verdict = true;
      d.matched = c;
      d.margin = m;
    }
  };

  if (check_13(t, margin)) consider(ACCondition::Cond13, margin);
  if (check_14(t, margin)) consider(ACCondition::Cond14, margin);
  if (check_13(sw, margin)) consider(ACCondition::Cond13Swapped, margin);
  if (check_14(sw, margin)) consider(ACCondition::Cond14Swapped, margin);
  return d;
}

const std::vector<CatalogEntry>& builtin_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"landau", ConstantProfile{1.0}, ConstantProfile{0.0},
       "constant field, flat bands at the odd levels; excluded from the "
       "absolute-continuity conditions by strictness"},
      {"iwatsuka-step", StepProfile{1.0, 2.0, 0.0}, ConstantProfile{0.0},
       "field stepping 1 -> 2 at the origin; the classic increasing-limits "
       "configuration"},
      {"tanh-step", TanhStepProfile{1.0, 2.0, 0.0, 1.0}, ConstantProfile{0.0},
       "smooth monotone step 1 -> 2 with unit width"},
      {"sign-change", TanhStepProfile{-1.0, 1.0, 0.0, 1.0},
       ConstantProfile{0.0},
       "field changing sign, both vector-potential tails rise; bands diverge "
       "as xi -> +infinity"},
      {"bump-dip", BumpProfile{1.0, -3.0, -1.0, 1.0, 1},
       ConstantProfile{0.0},
       "unit field with a compactly supported dip to -2; the field may be "
       "negative on a compact set without losing confinement"},
      {"step-electric", StepProfile{1.0, 2.0, 0.0},
       StepProfile{0.5, 0.0, 0.0},
       "field step with an electric potential step 0.5 -> 0; shifts the "
       "left-side band tails"},
  };
  return catalog;
}

const CatalogEntry* find_catalog_entry(std::string_view name) {
  for (const CatalogEntry& e : builtin_catalog())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace iwatsuka
