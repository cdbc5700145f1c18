#include "iwatsuka/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iwatsuka {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

// log(cosh t) without overflow for large |t|
double logcosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// antiderivative of (1 - t^2)^m anchored at t = -1, clamped outside [-1, 1]
double bump_primitive_shape(int m, double t) {
  const double tc = std::clamp(t, -1.0, 1.0);
  double sum = 0.0;
  double binom = 1.0;  // C(m, j)
  for (int j = 0; j <= m; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binom * (std::pow(tc, 2 * j + 1) + 1.0) / (2 * j + 1);
    binom *= static_cast<double>(m - j) / (j + 1);
  }
  return sum;
}

}  // namespace

GaugeFunction::GaugeFunction(ProfileSpec field, double base_point)
    : field_(std::move(field)), base_point_(base_point) {
  validate_profile(field_);
  if (const auto* pw = std::get_if<PiecewiseConstantProfile>(&field_)) {
    // prefix_[i] = primitive at breakpoints[i], anchored at breakpoints[0]
    prefix_.assign(pw->breakpoints.size(), 0.0);
    for (std::size_t i = 1; i < pw->breakpoints.size(); ++i)
      prefix_[i] = prefix_[i - 1] +
                   pw->values[i] * (pw->breakpoints[i] - pw->breakpoints[i - 1]);
  } else if (const auto* t = std::get_if<TabulatedProfile>(&field_)) {
    // cumulative trapezoid, exact for the piecewise-linear interpolant
    cumulative_.assign(t->x.size(), 0.0);
    for (std::size_t i = 1; i < t->x.size(); ++i)
      cumulative_[i] = cumulative_[i - 1] + 0.5 * (t->y[i] + t->y[i - 1]) *
                                                (t->x[i] - t->x[i - 1]);
  }
  offset_ = primitive(base_point_);
}

double GaugeFunction::primitive(double x) const {
  return std::visit(
      Overload{
          [x](const ConstantProfile& c) { return c.value * x; },
          [x](const StepProfile& s) {
            return x < s.x_jump ? s.left * (x - s.x_jump)
                                : s.right * (x - s.x_jump);
          },
          [x](const TanhStepProfile& t) {
            const double mid = 0.5 * (t.left + t.right);
            const double amp = 0.5 * (t.right - t.left);
            const double u = (x - t.center) / t.width;
            return mid * (x - t.center) + amp * t.width * logcosh(u);
          },
          [x](const BumpProfile& b) {
            const double half = 0.5 * (b.support_right - b.support_left);
            const double mid = 0.5 * (b.support_left + b.support_right);
            const double t = (x - mid) / half;
            return b.base * x +
                   b.amplitude * half * bump_primitive_shape(b.exponent, t);
          },
          [this, x](const PiecewiseConstantProfile& pw) {
            const auto& bp = pw.breakpoints;
            if (x < bp.front()) return pw.values.front() * (x - bp.front());
            const auto it = std::upper_bound(bp.begin(), bp.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - bp.begin());
            // x is in [bp[i-1], bp[i]) (or beyond the last breakpoint)
            return prefix_[i - 1] + pw.values[i] * (x - bp[i - 1]);
          },
          [this, x](const TabulatedProfile& t) {
            if (x < t.x.front())
              return t.left_tail * (x - t.x.front());
            if (x > t.x.back())
              return cumulative_.back() + t.right_tail * (x - t.x.back());
            const auto it = std::lower_bound(t.x.begin(), t.x.end(), x);
            std::size_t i = static_cast<std::size_t>(it - t.x.begin());
            if (t.x[i] == x) return cumulative_[i];
            // trapezoid over the partial cell, exact for linear B
            const double yx = eval_profile(ProfileSpec(t), x);
            return cumulative_[i - 1] +
                   0.5 * (yx + t.y[i - 1]) * (x - t.x[i - 1]);
          },
      },
      field_);
}

GaugeFunction GaugeFunction::rebased(double new_base) const {
  GaugeFunction g = *this;
  g.base_point_ = new_base;
  g.offset_ = g.primitive(new_base);
  return g;
}

GaugeFunction rebase_gauge(const GaugeFunction& g, double new_base) {
  return g.rebased(new_base);
}

TurningPoints turning_points(const GaugeFunction& g, double xi,
                             Interval search_box, double root_tol_scale,
                             int scan_points) {
  TurningPoints out;
  out.xi = xi;
  const double tol = root_tol_scale * (1.0 + std::abs(xi));
  const auto f = [&](double x) { return xi + g(x); };

  const int n = std::max(scan_points, 8);
  double x_prev = search_box.lo;
  double f_prev = f(x_prev);
  for (int i = 1; i <= n; ++i) {
    const double x = search_box.lo + search_box.width() * i / n;
    const double fx = f(x);
    if (std::abs(f_prev) <= tol) {
      out.roots.push_back(x_prev);
    } else if (std::abs(fx) > tol && ((f_prev < 0.0) != (fx < 0.0))) {
      double a = x_prev, b = x, fa = f_prev;
      double mid = 0.5 * (a + b);
      for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (std::abs(fm) <= tol || mid == a || mid == b) break;
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      out.roots.push_back(mid);
    }
    x_prev = x;
    f_prev = fx;
  }
  if (std::abs(f_prev) <= tol) out.roots.push_back(x_prev);

  std::sort(out.roots.begin(), out.roots.end());
  // collapse near-duplicates from plateau nodes
  const double sep = search_box.width() / n * 0.5;
  std::vector<double> dedup;
  for (double r : out.roots)
    if (dedup.empty() || r - dedup.back() > sep) dedup.push_back(r);
  out.roots = std::move(dedup);
  out.unique = out.roots.size() == 1;
  return out;
}

TurningPoints turning_points_auto(const GaugeFunction& g, double xi,
                                  double root_tol_scale) {
  const double r_struct = std::max(1.0, structure_radius(g.field()));
  const ProfileTails tails = profile_tails(g.field());

  // Asymptotic sign of xi + A_y on each side, when the tail bounds pin it;
  // once the box end shows that sign beyond the field's structure, A_y is
  // monotone outside and no further roots exist there.
  const auto side_settled = [&](double x, bool right) {
    const double f = xi + g(x);
    const double under = right ? tails.under_plus : tails.under_minus;
    const double over = right ? tails.over_plus : tails.over_minus;
    if (right) {
      if (under > 0.0) return f > 0.0;   // A_y -> +infinity
      if (over < 0.0) return f < 0.0;    // A_y -> -infinity
    } else {
      if (under > 0.0) return f < 0.0;   // A_y -> -infinity as x -> -infinity
      if (over < 0.0) return f > 0.0;
    }
    return false;  // undetermined tail: only the cap bounds the search
  };

  for (double r = 2.0 * r_struct; r <= 65536.0; r *= 2.0) {
    if (side_settled(r, true) && side_settled(-r, false))
      return turning_points(g, xi, {-r, r}, root_tol_scale,
                            r > 512.0 ? 16384 : 8192);
  }
  return turning_points(g, xi, {-65536.0, 65536.0}, root_tol_scale, 65536);
}

}  // namespace iwatsuka
