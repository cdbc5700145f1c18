#include "iwatsuka/layer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iwatsuka {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

// Curve assembled from straight and circular-arc pieces: the tangent angle
// is continuous and piecewise linear in arc length, positions are closed
// form, curvature magnitude jumps at the interior joins.
struct TangentSegment {
  double length = 0.0;
  double rate = 0.0;  // d(phi)/ds, 0 for straight pieces
};

struct PiecewiseTangent {
  double s_begin = 0.0;
  double theta_begin = 0.0;
  std::vector<TangentSegment> segments;

  double s_end() const {
    double s = s_begin;
    for (const auto& seg : segments) s += seg.length;
    return s;
  }

  double phi(double s) const {
    double pos = s_begin;
    double angle = theta_begin;
    if (s <= pos) return angle;
    for (const auto& seg : segments) {
      const double t = std::min(s - pos, seg.length);
      if (t > 0.0) angle += seg.rate * t;
      pos += seg.length;
      if (s <= pos) break;
    }
    return angle;
  }

  double kappa(double s) const {
    double pos = s_begin;
    for (const auto& seg : segments) {
      if (s < pos + seg.length) return std::abs(seg.rate);
      pos += seg.length;
    }
    return segments.empty() ? 0.0 : std::abs(segments.back().rate);
  }

  std::pair<double, double> position(double s) const {
    double pos = s_begin;
    double angle = theta_begin;
    double x = 0.0, z = 0.0;
    for (const auto& seg : segments) {
      const double t = std::clamp(s - pos, 0.0, seg.length);
      if (t > 0.0) {
        if (seg.rate == 0.0) {
          x += t * std::cos(angle);
          z += t * std::sin(angle);
        } else {
          x += (std::sin(angle + seg.rate * t) - std::sin(angle)) / seg.rate;
          z -= (std::cos(angle + seg.rate * t) - std::cos(angle)) / seg.rate;
        }
      }
      angle += seg.rate * seg.length;
      pos += seg.length;
      if (s <= pos) break;
    }
    return {x, z};
  }

  std::vector<double> interior_joins() const {
    std::vector<double> joins;
    double pos = s_begin;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
      pos += segments[i].length;
      if (segments[i].rate != segments[i + 1].rate) joins.push_back(pos);
    }
    return joins;
  }
};

MaterializedCurve sample_piecewise(const PiecewiseTangent& c, double spacing,
                                   double theta_out) {
  if (!(spacing > 0.0))
    throw std::invalid_argument("curve: spacing must be > 0");
  const double total = c.s_end() - c.s_begin;
  const int n = std::max(5, static_cast<int>(std::llround(total / spacing)) + 1);
  MaterializedCurve m;
  m.s.resize(n);
  m.x.resize(n);
  m.z.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = c.s_begin + total * i / (n - 1);
    m.s[i] = s;
    const auto [x, z] = c.position(s);
    m.x[i] = x;
    m.z[i] = z;
  }
  m.joins = c.interior_joins();
  m.tail_theta = {c.theta_begin, theta_out};
  m.exact_xdot = [c](double s) { return std::cos(c.phi(s)); };
  m.exact_kappa = [c](double s) { return c.kappa(s); };
  m.exact_kappa_dot = [](double) { return 0.0; };   // away from joins
  m.exact_kappa_ddot = [](double) { return 0.0; };  // away from joins
  return m;
}

MaterializedCurve materialize_smooth(const SmoothBendCurve& c) {
  if (!(c.scale > 0.0))
    throw std::invalid_argument("smooth_bend: scale must be > 0");
  if (!(c.spacing > 0.0))
    throw std::invalid_argument("smooth_bend: spacing must be > 0");
  const double range = c.lead + 10.0 * c.scale;
  const int n =
      std::max(5, static_cast<int>(std::llround(2.0 * range / c.spacing)) + 1);

  const double half = 0.5 * c.dtheta;
  const auto phi = [&](double s) {
    return c.angle_in + half * (1.0 + std::tanh(s / c.scale));
  };

  // 5-point Gauss-Legendre per sample step for the positions
  static constexpr double gl_x[5] = {-0.9061798459386640, -0.5384693101056831,
                                     0.0, 0.5384693101056831,
                                     0.9061798459386640};
  static constexpr double gl_w[5] = {0.2369268850561891, 0.4786286704993665,
                                     0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};

  MaterializedCurve m;
  m.s.resize(n);
  m.x.resize(n);
  m.z.resize(n);
  double x = 0.0, z = 0.0;
  double prev = -range;
  for (int i = 0; i < n; ++i) {
    const double s = -range + 2.0 * range * i / (n - 1);
    if (i > 0) {
      const double hw = 0.5 * (s - prev);
      const double mid = 0.5 * (s + prev);
      for (int q = 0; q < 5; ++q) {
        const double p = phi(mid + hw * gl_x[q]);
        x += hw * gl_w[q] * std::cos(p);
        z += hw * gl_w[q] * std::sin(p);
      }
    }
    m.s[i] = s;
    m.x[i] = x;
    m.z[i] = z;
    prev = s;
  }
  m.tail_theta = {c.angle_in, c.angle_in + c.dtheta};
  const double cc = std::abs(c.dtheta) / (2.0 * c.scale);
  const double ell = c.scale;
  m.exact_xdot = [phi](double s) { return std::cos(phi(s)); };
  m.exact_kappa = [cc, ell](double s) {
    const double sech = 1.0 / std::cosh(s / ell);
    return cc * sech * sech;
  };
  m.exact_kappa_dot = [cc, ell](double s) {
    const double t = std::tanh(s / ell);
    const double sech2 = 1.0 - t * t;
    return -2.0 * cc / ell * sech2 * t;
  };
  m.exact_kappa_ddot = [cc, ell](double s) {
    const double t = std::tanh(s / ell);
    const double sech2 = 1.0 - t * t;
    return 2.0 * cc / (ell * ell) * sech2 * (2.0 * t * t - sech2);
  };
  return m;
}

}  // namespace

MaterializedCurve materialize(const CurveSpec& c) {
  return std::visit(
      Overload{
          [](const CurveSamples& s) {
            if (s.s.size() < 5)
              throw std::invalid_argument(
                  "curve samples: need at least 5 points");
            if (s.x.size() != s.s.size() || s.z.size() != s.s.size())
              throw std::invalid_argument(
                  "curve samples: s, x, z must have equal length");
            for (std::size_t i = 1; i < s.s.size(); ++i)
              if (!(s.s[i] > s.s[i - 1]))
                throw std::invalid_argument(
                    "curve samples: s must be strictly increasing");
            MaterializedCurve m;
            m.s = s.s;
            m.x = s.x;
            m.z = s.z;
            return m;
          },
          [](const LineCurve& l) {
            if (!(l.range > 0.0))
              throw std::invalid_argument("line: range must be > 0");
            PiecewiseTangent t;
            t.s_begin = -l.range;
            t.theta_begin = l.angle;
            t.segments = {{2.0 * l.range, 0.0}};
            return sample_piecewise(t, l.spacing, l.angle);
          },
          [](const CircularBendCurve& b) {
            if (!(b.radius > 0.0))
              throw std::invalid_argument("circular_bend: radius must be > 0");
            if (!(b.lead > 0.0))
              throw std::invalid_argument("circular_bend: lead must be > 0");
            const double dtheta = b.angle_out - b.angle_in;
            const double arc = b.radius * std::abs(dtheta);
            PiecewiseTangent t;
            t.s_begin = -b.lead;
            t.theta_begin = b.angle_in;
            t.segments = {{b.lead, 0.0},
                          {arc, dtheta == 0.0 ? 0.0
                                              : (dtheta > 0.0 ? 1.0 : -1.0) /
                                                    b.radius},
                          {b.lead, 0.0}};
            return sample_piecewise(t, b.spacing, b.angle_out);
          },
          [](const SmoothBendCurve& sb) { return materialize_smooth(sb); },
          [](const RacetrackCurve& r) {
            if (!(r.radius > 0.0))
              throw std::invalid_argument("racetrack: radius must be > 0");
            const double arc = r.radius * std::abs(r.dtheta);
            const double rate =
                r.dtheta == 0.0
                    ? 0.0
                    : (r.dtheta > 0.0 ? 1.0 : -1.0) / r.radius;
            PiecewiseTangent t;
            t.s_begin = -r.lead;
            t.theta_begin = 0.0;
            t.segments = {{r.lead, 0.0},
                          {arc, rate},
                          {r.middle, 0.0},
                          {arc, -rate},
                          {r.lead, 0.0}};
            return sample_piecewise(t, r.spacing, 0.0);
          },
      },
      c);
}

namespace {

std::vector<double> fd_first(const std::vector<double>& s,
                             const std::vector<double>& f) {
  const std::size_t n = s.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = s[i] - s[i - 1];
    const double hr = s[i + 1] - s[i];
    d[i] = (-hr / (hl * (hl + hr))) * f[i - 1] +
           ((hr - hl) / (hl * hr)) * f[i] +
           (hl / (hr * (hl + hr))) * f[i + 1];
  }
  d[0] = (f[1] - f[0]) / (s[1] - s[0]);
  d[n - 1] = (f[n - 1] - f[n - 2]) / (s[n - 1] - s[n - 2]);
  return d;
}

std::vector<double> fd_second(const std::vector<double>& s,
                              const std::vector<double>& f) {
  const std::size_t n = s.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = s[i] - s[i - 1];
    const double hr = s[i + 1] - s[i];
    d[i] = 2.0 * (f[i - 1] / (hl * (hl + hr)) - f[i] / (hl * hr) +
                  f[i + 1] / (hr * (hl + hr)));
  }
  // one-sided at the ends: 4-point second-order formula on (near-)uniform
  // grids, nearest interior value otherwise
  const auto uniform = [&](std::size_t a) {
    const double h1 = s[a + 1] - s[a];
    const double h2 = s[a + 2] - s[a + 1];
    const double h3 = s[a + 3] - s[a + 2];
    return std::abs(h2 - h1) < 1e-9 * h1 && std::abs(h3 - h1) < 1e-9 * h1;
  };
  if (n >= 4 && uniform(0)) {
    const double h = s[1] - s[0];
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
  } else {
    d[0] = d[1];
  }
  if (n >= 4 && uniform(n - 4)) {
    const double h = s[n - 1] - s[n - 2];
    d[n - 1] =
        (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
  } else {
    d[n - 1] = d[n - 2];
  }
  return d;
}

}  // namespace

CurveTables curvature(const CurveSpec& c, double arc_tol) {
  const MaterializedCurve m = materialize(c);
  CurveTables t;
  t.s = m.s;
  t.joins = m.joins;
  t.xdot = fd_first(m.s, m.x);
  t.zdot = fd_first(m.s, m.z);

  if (!m.exact_xdot) {
    // finite-difference unit-speed check for user samples; builtins are
    // arc-length parametrized by construction
    double worst = 0.0;
    double worst_s = m.s.front();
    for (std::size_t i = 0; i < m.s.size(); ++i) {
      const double dev =
          std::abs(t.xdot[i] * t.xdot[i] + t.zdot[i] * t.zdot[i] - 1.0);
      if (dev > worst) {
        worst = dev;
        worst_s = m.s[i];
      }
    }
    if (worst > arc_tol)
      throw std::invalid_argument(
          "curve is not parametrized by arc length: |x'^2 + z'^2 - 1| = " +
          format_double(worst) + " at s = " + format_double(worst_s) +
          " exceeds tolerance " + format_double(arc_tol));
  }

  const std::vector<double> xddot = fd_second(m.s, m.x);
  const std::vector<double> zddot = fd_second(m.s, m.z);
  t.kappa.resize(m.s.size());
  for (std::size_t i = 0; i < m.s.size(); ++i)
    t.kappa[i] = std::hypot(xddot[i], zddot[i]);
  t.kappa_dot = fd_first(m.s, t.kappa);
  t.kappa_ddot = fd_second(m.s, t.kappa);
  t.kappa_max = *std::max_element(t.kappa.begin(), t.kappa.end());
  return t;
}

EffectiveProfile effective_profile(const CurveSpec& c, double b0,
                                   double arc_tol) {
  if (!(b0 > 0.0))
    throw std::invalid_argument("effective_profile: B0 must be > 0");
  const MaterializedCurve m = materialize(c);
  const CurveTables t = curvature(c, arc_tol);

  EffectiveProfile e;
  e.b0 = b0;
  e.s = t.s;
  e.kappa = t.kappa;
  e.joins = t.joins;

  std::vector<double> b_vals(t.s.size()), w_vals(t.s.size());
  for (std::size_t i = 0; i < t.s.size(); ++i) {
    b_vals[i] = std::clamp(b0 * t.xdot[i], -b0, b0);
    w_vals[i] = -0.25 * t.kappa[i] * t.kappa[i];
  }

  TabulatedProfile bp{t.s, b_vals, b_vals.front(), b_vals.back()};
  TabulatedProfile wp{t.s, w_vals, w_vals.front(), w_vals.back()};

  if (m.tail_theta) {
    // straight or settled tails: exact limit values
    const double bm = b0 * std::cos(m.tail_theta->first);
    const double bpv = b0 * std::cos(m.tail_theta->second);
    bp.left_tail = bm;
    bp.right_tail = bpv;
    wp.left_tail = 0.0;
    wp.right_tail = 0.0;
    e.tails_exact = true;
    e.tails.b_under_plus = e.tails.b_over_plus = bpv;
    e.tails.b_under_minus = e.tails.b_over_minus = bm;
    e.tails.w_under_plus = e.tails.w_over_plus = 0.0;
    e.tails.w_under_minus = e.tails.w_over_minus = 0.0;
    e.tails.exact = true;
  }
  e.b_eff = bp;
  e.w_eff = wp;
  if (!m.tail_theta) {
    e.tails_exact = false;
    e.tails = tail_bounds(e.b_eff, e.w_eff);
  }
  return e;
}

std::string_view to_string(LayerClause c) {
  switch (c) {
    case LayerClause::CurvatureGap: return "curvature_gap";
    case LayerClause::CurvatureGapSwapped: return "curvature_gap_swapped";
    case LayerClause::SignSplit: return "sign_split";
    case LayerClause::SignSplitSwapped: return "sign_split_swapped";
    case LayerClause::None: return "none";
  }
  return "none";
}

LayerACReport layer_ac_check(const EffectiveProfile& e) {
  LayerACReport r;
  r.decision = ac_condition(e.tails);
  switch (r.decision.matched) {
    case ACCondition::Cond13:
      r.clause = LayerClause::CurvatureGap;
      r.scaled_margin = 4.0 * r.decision.margin;
      break;
    case ACCondition::Cond13Swapped:
      r.clause = LayerClause::CurvatureGapSwapped;
      r.scaled_margin = 4.0 * r.decision.margin;
      break;
    case ACCondition::Cond14:
      r.clause = LayerClause::SignSplit;
      r.scaled_margin = r.decision.margin;
      break;
    case ACCondition::Cond14Swapped:
      r.clause = LayerClause::SignSplitSwapped;
      r.scaled_margin = r.decision.margin;
      break;
    case ACCondition::None:
      r.clause = LayerClause::None;
      r.scaled_margin = 0.0;
      break;
  }
  return r;
}

namespace {

double interp(const std::vector<double>& s, const std::vector<double>& f,
              double at) {
  if (at <= s.front()) return f.front();
  if (at >= s.back()) return f.back();
  const auto it = std::lower_bound(s.begin(), s.end(), at);
  const std::size_t i = static_cast<std::size_t>(it - s.begin());
  if (s[i] == at) return f[i];
  const double w = (at - s[i - 1]) / (s[i] - s[i - 1]);
  return f[i - 1] + w * (f[i] - f[i - 1]);
}

}  // namespace

LayerPotentialValue layer_potential(const CurveTables& t,
                                    const LayerGeometry& geom, double s,
                                    double u) {
  if (!(geom.half_width > 0.0))
    throw std::invalid_argument("layer: half width a must be > 0");
  if (!(std::abs(u) < 1.0))
    throw std::invalid_argument("layer: u must lie in (-1, 1)");
  if (!(geom.half_width * t.kappa_max < 1.0))
    throw std::invalid_argument(
        "layer: need a * max|kappa| < 1 (layer would self-intersect)");

  const double a = geom.half_width;
  const double k = interp(t.s, t.kappa, s);
  const double kd = interp(t.s, t.kappa_dot, s);
  const double kdd = interp(t.s, t.kappa_ddot, s);
  const double f = 1.0 - a * u * k;
  if (!(f > 0.0))
    throw NumericalError("layer: f_a(s,u) <= 0, geometry invariant broken");

  const double f2 = f * f;
  const double f3 = f2 * f;
  const double f4 = f2 * f2;
  LayerPotentialValue out;
  out.value = -0.25 * k * k / f2 - 0.5 * a * u * kdd / f3 -
              1.25 * a * a * u * u * kd * kd / f4;

  const double mean_spacing =
      (t.s.back() - t.s.front()) / static_cast<double>(t.s.size() - 1);
  for (double j : t.joins)
    if (std::abs(s - j) <= 2.0 * mean_spacing) out.near_join = true;
  return out;
}

BandSweep layer_bands(const EffectiveProfile& e, std::span<const double> xi,
                      int k, const SolverOptions& opts) {
  FiberProblem p{e.b_eff, e.w_eff, e.tails};
  return sweep(p, xi, k, opts);
}

}  // namespace iwatsuka
