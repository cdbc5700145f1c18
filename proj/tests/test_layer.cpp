#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iwatsuka/layer.hpp"
#include "test_utils.hpp"

using namespace iwatsuka;

namespace {

constexpr double kPi = std::numbers::pi;

// circle of radius R sampled by arc length
CurveSamples circle_samples(double radius, double spacing, double length) {
  CurveSamples c;
  const int n = static_cast<int>(length / spacing) + 1;
  for (int i = 0; i < n; ++i) {
    const double s = spacing * i;
    c.s.push_back(s);
    c.x.push_back(radius * std::sin(s / radius));
    c.z.push_back(radius * (1.0 - std::cos(s / radius)));
  }
  return c;
}

}  // namespace

TEST_CASE("line curve has zero curvature") {
  const CurveTables t = curvature(LineCurve{0.3, 10.0, 0.01});
  for (double k : t.kappa) CHECK(std::abs(k) < 1e-8);
  CHECK(t.joins.empty());
}

TEST_CASE("sampled circle: curvature 1/R, unit speed accepted") {
  const CurveTables t = curvature(circle_samples(2.0, 2e-4, 4.0));
  for (std::size_t i = 5; i + 5 < t.kappa.size(); i += 100)
    CHECK(t.kappa[i] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("non-unit-speed samples are rejected with the offending location") {
  CurveSamples bad;
  for (int i = 0; i < 50; ++i) {
    const double s = 0.1 * i;
    bad.s.push_back(s);
    bad.x.push_back(s);  // speed sqrt(2)
    bad.z.push_back(s);
  }
  CHECK_THROWS_WITH_AS(curvature(bad), doctest::Contains("arc length"),
                       std::invalid_argument);
}

TEST_CASE("curve sample validation") {
  CurveSamples few{{0.0, 0.1}, {0.0, 0.1}, {0.0, 0.0}};
  CHECK_THROWS_AS(curvature(few), std::invalid_argument);
  CurveSamples unsorted{{0.0, 0.2, 0.1, 0.3, 0.4},
                        {0.0, 0.2, 0.1, 0.3, 0.4},
                        {0.0, 0.0, 0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(curvature(unsorted), std::invalid_argument);
}

TEST_CASE("circular bend: arc curvature away from the flagged joins") {
  const CircularBendCurve bend{2.0, 0.0, kPi / 3.0, 5.0, 0.01};
  const CurveTables t = curvature(bend);
  REQUIRE(t.joins.size() == 2);
  CHECK(t.joins[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.joins[1] == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));

  const MaterializedCurve m = materialize(CurveSpec{bend});
  for (std::size_t i = 0; i < t.s.size(); ++i) {
    const double s = t.s[i];
    const bool near_join = std::abs(s - t.joins[0]) < 0.05 ||
                           std::abs(s - t.joins[1]) < 0.05;
    if (near_join) continue;
    CHECK(t.kappa[i] ==
          doctest::Approx(m.exact_kappa(s)).epsilon(0).scale(1).epsilon(1e-4));
  }
}

TEST_CASE("finite-difference curvature is second order against the closed "
          "form") {
  const double r = 2.0;
  const auto worst_err = [&](double spacing) {
    const CurveTables t = curvature(circle_samples(r, spacing, 4.0), 1e-5);
    double worst = 0.0;
    for (std::size_t i = 5; i + 5 < t.kappa.size(); ++i)
      worst = std::max(worst, std::abs(t.kappa[i] - 1.0 / r));
    return worst;
  };
  const double e1 = worst_err(4e-3);
  const double e2 = worst_err(2e-3);
  const double e3 = worst_err(1e-3);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
  CHECK(e2 / e3 > 3.5);
  CHECK(e2 / e3 < 4.5);
}

TEST_CASE("effective profile of a line: constant field, zero potential") {
  const double theta = 0.4;
  const EffectiveProfile e = effective_profile(LineCurve{theta, 10.0, 0.01}, 2.0);
  CHECK(e.tails_exact);
  CHECK(e.tails.b_under_plus == doctest::Approx(2.0 * std::cos(theta)));
  CHECK(e.tails.b_under_minus == doctest::Approx(2.0 * std::cos(theta)));
  CHECK(e.tails.w_under_plus == 0.0);
  for (double s : {-5.0, 0.0, 5.0, 100.0}) {
    CHECK(eval_profile(e.b_eff, s) ==
          doctest::Approx(2.0 * std::cos(theta)).epsilon(1e-10));
    CHECK(std::abs(eval_profile(e.w_eff, s)) < 1e-12);
  }
}

TEST_CASE("effective profile of the 60-degree bend: exact tails, bounded "
          "field, attractive potential") {
  const CircularBendCurve bend{2.0, 0.0, kPi / 3.0, 5.0, 0.01};
  const EffectiveProfile e = effective_profile(bend, 1.0);
  CHECK(e.tails_exact);
  CHECK(e.tails.b_under_minus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.tails.b_over_minus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.tails.b_under_plus == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.tails.b_over_plus == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.tails.w_under_plus == 0.0);
  CHECK(e.tails.w_over_minus == 0.0);

  for (std::size_t i = 0; i < e.s.size(); ++i) {
    CHECK(std::abs(eval_profile(e.b_eff, e.s[i])) <= 1.0);
    CHECK(eval_profile(e.w_eff, e.s[i]) <= 1e-15);
  }
  // on the arc interior the potential is -kappa^2/4 = -1/16
  CHECK(eval_profile(e.w_eff, kPi / 3.0) ==
        doctest::Approx(-1.0 / 16.0).epsilon(1e-3));
}

TEST_CASE("layer AC verdict: 60-degree bend fires the curvature-gap clause "
          "with the scaled margin 4 B0 (x'-gap)") {
  const CircularBendCurve bend{2.0, 0.0, kPi / 3.0, 5.0, 0.01};
  const EffectiveProfile e = effective_profile(bend, 1.0);
  const LayerACReport r = layer_ac_check(e);
  CHECK(r.decision.verdict);
  const bool gap_type = r.clause == LayerClause::CurvatureGap ||
                        r.clause == LayerClause::CurvatureGapSwapped;
  CHECK(gap_type);
  CHECK(r.scaled_margin == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("layer AC verdict: 120-degree bend fires the sign-split clause") {
  const CircularBendCurve bend{2.0, 0.0, 2.0 * kPi / 3.0, 5.0, 0.01};
  const EffectiveProfile e = effective_profile(bend, 1.0);
  const LayerACReport r = layer_ac_check(e);
  CHECK(r.decision.verdict);
  const bool split_type = r.clause == LayerClause::SignSplit ||
                          r.clause == LayerClause::SignSplitSwapped;
  CHECK(split_type);
}

TEST_CASE("layer AC verdict: straight line stays undecided (strictness)") {
  const EffectiveProfile e = effective_profile(LineCurve{0.0, 10.0, 0.01}, 1.0);
  const LayerACReport r = layer_ac_check(e);
  CHECK_FALSE(r.decision.verdict);
  CHECK(r.clause == LayerClause::None);
}

TEST_CASE("layer AC edge case: a tail with x' exactly zero satisfies no "
          "displayed clause") {
  // cos(pi/2) rounds to 6e-17 in floating point, so the exact edge case is
  // built from the tail bounds directly
  TailBounds t;
  t.b_under_plus = 0.0;
  t.b_over_plus = 0.0;
  t.b_under_minus = 1.0;
  t.b_over_minus = 1.0;
  const ACDecision d = ac_condition(t);
  CHECK_FALSE(d.verdict);
  CHECK(d.matched == ACCondition::None);

  // through the curve pipeline the rounded tail is 6e-17, which the strict
  // inequalities treat as positive; the verdict is then formally true
  const CircularBendCurve bend{2.0, 0.0, kPi / 2.0, 5.0, 0.01};
  const EffectiveProfile e = effective_profile(bend, 1.0);
  CHECK(std::abs(e.tails.b_under_plus) < 1e-15);
}

TEST_CASE("layer AC check delegates exactly to the tail-bounds condition") {
  const std::vector<CurveSpec> curves = {
      CircularBendCurve{2.0, 0.0, kPi / 3.0, 5.0, 0.01},
      CircularBendCurve{2.0, 0.0, 2.0 * kPi / 3.0, 5.0, 0.01},
      LineCurve{0.0, 10.0, 0.01},
      SmoothBendCurve{0.0, kPi / 3.0, 1.0, 5.0, 0.01},
      RacetrackCurve{1.0, kPi / 4.0, 5.0, 2.0, 0.01},
  };
  for (const CurveSpec& c : curves) {
    const EffectiveProfile e = effective_profile(c, 1.0);
    const LayerACReport r = layer_ac_check(e);
    const ACDecision direct = ac_condition(e.tails);
    CHECK(r.decision.verdict == direct.verdict);
    CHECK(r.decision.matched == direct.matched);
  }
}

TEST_CASE("racetrack: equal tails, compact field excursion") {
  const RacetrackCurve rt{1.0, kPi / 4.0, 5.0, 2.0, 0.01};
  const EffectiveProfile e = effective_profile(rt, 1.0);
  CHECK(e.tails.b_under_plus == doctest::Approx(1.0));
  CHECK(e.tails.b_under_minus == doctest::Approx(1.0));
  // the chicane lowers the field to cos(45 deg) in the middle
  const double mid = 1.0 * kPi / 4.0 + 1.0;  // inside the straight middle
  CHECK(eval_profile(e.b_eff, mid) ==
        doctest::Approx(std::cos(kPi / 4.0)).epsilon(1e-4));
  CHECK_FALSE(layer_ac_check(e).decision.verdict);
}

TEST_CASE("layer potential: straight geometry gives zero") {
  const CurveTables t = curvature(LineCurve{0.0, 10.0, 0.01});
  const LayerPotentialValue v = layer_potential(t, LayerGeometry{0.1}, 1.0, 0.5);
  CHECK(std::abs(v.value) < 1e-6);
  CHECK_FALSE(v.near_join);
}

TEST_CASE("layer potential: constant-curvature interior matches the closed "
          "form") {
  const CurveTables t = curvature(circle_samples(2.0, 1e-3, 6.0), 1e-6);
  const double a = 0.1, u = 0.5;
  const LayerPotentialValue v = layer_potential(t, LayerGeometry{a}, 3.0, u);
  const double f = 1.0 - a * u * 0.5;
  const double expect = -0.25 * 0.25 / (f * f);
  CHECK(v.value == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("layer potential: smooth bend against the analytic-derivative "
          "oracle") {
  const SmoothBendCurve sb{0.0, kPi / 3.0, 1.0, 5.0, 0.005};
  const MaterializedCurve m = materialize(CurveSpec{sb});
  const CurveTables t = curvature(CurveSpec{sb});
  const double a = 0.1;
  const LayerGeometry geom{a};
  for (double s : {0.0, 0.5, -0.8, 1.7}) {
    for (double u : {0.5, -0.3}) {
      const double k = m.exact_kappa(s);
      const double kd = m.exact_kappa_dot(s);
      const double kdd = m.exact_kappa_ddot(s);
      const double f = 1.0 - a * u * k;
      const double oracle = -0.25 * k * k / (f * f) -
                            0.5 * a * u * kdd / (f * f * f) -
                            1.25 * a * a * u * u * kd * kd / (f * f * f * f);
      const LayerPotentialValue v = layer_potential(t, geom, s, u);
      CHECK(v.value == doctest::Approx(oracle).epsilon(1e-3));
    }
  }
}

TEST_CASE("layer potential converges to -kappa^2/4 as the width vanishes") {
  const SmoothBendCurve sb{0.0, kPi / 3.0, 1.0, 5.0, 0.005};
  const MaterializedCurve m = materialize(CurveSpec{sb});
  const CurveTables t = curvature(CurveSpec{sb});
  const double s = 0.4, u = 0.5;
  const double limit = -0.25 * m.exact_kappa(s) * m.exact_kappa(s);
  const double e1 =
      std::abs(layer_potential(t, LayerGeometry{2e-3}, s, u).value - limit);
  const double e2 =
      std::abs(layer_potential(t, LayerGeometry{1e-3}, s, u).value - limit);
  CHECK(e1 < 1e-2);
  CHECK(e2 < 0.6 * e1 + 1e-9);  // first correction is linear in a
}

TEST_CASE("layer potential flags evaluations near curvature joins") {
  const CircularBendCurve bend{2.0, 0.0, kPi / 3.0, 5.0, 0.01};
  const CurveTables t = curvature(bend);
  CHECK(layer_potential(t, LayerGeometry{0.1}, 0.005, 0.3).near_join);
  CHECK_FALSE(layer_potential(t, LayerGeometry{0.1}, 1.0, 0.3).near_join);
}

TEST_CASE("layer geometry invariants are enforced") {
  const CurveTables t = curvature(circle_samples(1.0, 1e-3, 3.0), 1e-5);
  CHECK_THROWS_AS(layer_potential(t, LayerGeometry{1.2}, 1.0, 0.5),
                  std::invalid_argument);  // a * kappa_max >= 1
  CHECK_THROWS_AS(layer_potential(t, LayerGeometry{-0.1}, 1.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(layer_potential(t, LayerGeometry{0.5}, 1.0, 1.5),
                  std::invalid_argument);
}

TEST_CASE("layer bands: straight line reproduces the flat Landau levels") {
  const EffectiveProfile e = effective_profile(LineCurve{0.0, 10.0, 0.01}, 1.0);
  const std::vector<double> xi{-3.0, 0.0, 3.0};
  const BandSweep s = layer_bands(e, xi, 3);
  for (int n = 0; n < 3; ++n)
    for (int i = 0; i < 3; ++i)
      CHECK(s.bands[n][i] == doctest::Approx(2.0 * n + 1.0).epsilon(2e-3));
}

TEST_CASE("layer bands: bend tails follow the side convention") {
  const CircularBendCurve bend{2.0, 0.0, kPi / 3.0, 5.0, 0.01};
  const EffectiveProfile e = effective_profile(bend, 1.0);
  const std::vector<double> xi{-40.0, 40.0};
  const BandSweep s = layer_bands(e, xi, 1);
  // xi -> -infinity pairs with the + tails (field 0.5); xi -> +infinity
  // with the - tails (field 1)
  CHECK(s.bands[0][0] == doctest::Approx(0.5).epsilon(5e-2));
  CHECK(s.bands[0][1] == doctest::Approx(1.0).epsilon(5e-2));
}

TEST_CASE("strong curvature binds the lowest band below both tail levels") {
  // kappa = 2.5 on the arc: the -kappa^2/4 dip pulls lambda_1 below the
  // smaller Landau tail at intermediate xi
  const CircularBendCurve bend{0.4, 0.0, kPi / 3.0, 5.0, 0.005};
  const EffectiveProfile e = effective_profile(bend, 1.0);
  const std::vector<double> xi = linspace(-2.0, 2.0, 17);
  const BandSweep s = layer_bands(e, xi, 1);
  double min_band = 1e300;
  for (double v : s.bands[0]) min_band = std::min(min_band, v);
  CHECK(min_band < 0.5 - 0.01);
}
