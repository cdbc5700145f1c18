#include <doctest.h>

#include <cmath>

#include "iwatsuka/comparison.hpp"
#include "iwatsuka/eigensolve.hpp"
#include "test_utils.hpp"

using namespace iwatsuka;

TEST_CASE("comparison potential: branch values and continuity at x0") {
  const ComparisonSpec s{1.0, 1.0, 0.0, 2.0};
  CHECK(comparison_potential(s, 3.0) == 1.0);

  const ComparisonSpec t{1.0, 0.5, 0.0, 2.0};
  CHECK(comparison_potential(t, -2.0) == doctest::Approx(9.0).epsilon(1e-15));

  // both branches meet at x0 with omega^2 (x0 - alpha)^2
  const ComparisonSpec u{1.5, 0.7, 0.3, 2.1};
  const double at_x0 = 1.5 * 1.5 * (0.3 - 2.1) * (0.3 - 2.1);
  CHECK(comparison_potential(u, 0.3) == doctest::Approx(at_x0).epsilon(1e-14));
  CHECK(comparison_potential(u, 0.3 - 1e-12) ==
        doctest::Approx(at_x0).epsilon(1e-9));
}

TEST_CASE("equal frequencies reduce to the pure harmonic oscillator") {
  for (double alpha : {-3.0, 0.0, 4.0}) {
    const ComparisonSpec s{1.0, 1.0, 0.0, alpha};
    const auto v = comparison_eigs(s, 3);
    for (int n = 0; n < 3; ++n)
      CHECK(v[n] == doctest::Approx(2.0 * n + 1.0).epsilon(1e-3));
  }
}

TEST_CASE("frequency scaling: omega = 2 gives sigma_n = 2(2n-1)") {
  const ComparisonSpec s{2.0, 2.0, 0.0, 0.0};
  const auto v = comparison_eigs(s, 2);
  CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(v[1] == doctest::Approx(6.0).epsilon(1e-3));
}

TEST_CASE("sigma_1 approaches the harmonic level as alpha grows") {
  const ComparisonSpec s{1.0, 0.5, 0.0, 16.0};
  const auto v = comparison_eigs(s, 1);
  CHECK(std::abs(v[0] - 1.0) < 1e-3);
}

TEST_CASE("convergence study: decreasing error column, mirrored omega_tilde "
          "converges to the same limit") {
  const std::vector<double> alphas{2.0, 4.0, 8.0, 16.0};
  const ConvergenceStudy st = convergence_study(1.0, 0.5, 0.0, alphas, 1);
  CHECK(st.rows.back().err[0] < 1e-3);
  CHECK(st.monotone_from[0] >= 0);
  CHECK(st.monotone_from[0] <= 1);
  CHECK(st.rows[0].err[0] > st.rows[1].err[0]);  // genuine decrease 2 -> 4

  // steeper left branch: same limit (omega_tilde only shapes the far side)
  const ConvergenceStudy st2 = convergence_study(1.0, 2.0, 0.0, alphas, 1);
  CHECK(st2.rows.back().err[0] < 1e-3);

  // equal frequencies: errors at the solver floor for every alpha
  const ConvergenceStudy st3 = convergence_study(1.0, 1.0, 0.0, alphas, 1);
  for (const ConvergenceRow& r : st3.rows) CHECK(r.err[0] < 1e-4);
}

TEST_CASE("convergence study validates its inputs") {
  CHECK_THROWS_AS(convergence_study(1.0, 0.5, 0.0, std::vector<double>{}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      convergence_study(1.0, 0.5, 0.0, std::vector<double>{4.0, 2.0}, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(comparison_eigs(ComparisonSpec{-1.0, 1.0, 0.0, 0.0}, 1),
                  std::invalid_argument);
}

TEST_CASE("sandwich envelopes: formulas, joins, and the vertex") {
  TailBounds t;
  t.b_under_plus = 2.0;
  t.b_over_plus = 2.0;
  t.b_under_minus = 1.0;
  t.b_over_minus = 1.0;

  SandwichEnvelope up{Side::Plus, Envelope::Under, 0.25, 1.0, 10.0};
  CHECK(sandwich_envelope_eval(up, t, 12.0) ==
        doctest::Approx(1.5 * 1.5 * 4.0).epsilon(1e-14));  // (b+ - 2eps)^2 dx^2

  // continuity at -K_eps
  const double inner_side = sandwich_envelope_eval(up, t, -1.0);
  const double outer_side = sandwich_envelope_eval(up, t, -1.0 - 1e-9);
  CHECK(inner_side == doctest::Approx(outer_side).epsilon(1e-6));

  // vertex at the turning point for the over envelope
  SandwichEnvelope op{Side::Plus, Envelope::Over, 0.25, 1.0, 10.0};
  CHECK(sandwich_envelope_eval(op, t, 10.0) == 0.0);

  // minus side mirrors the branch condition
  SandwichEnvelope um{Side::Minus, Envelope::Under, 0.25, 1.0, -10.0};
  CHECK(sandwich_envelope_eval(um, t, -12.0) ==
        doctest::Approx(0.5 * 0.5 * 4.0).epsilon(1e-14));
  const double m_inner = sandwich_envelope_eval(um, t, 1.0);
  const double m_outer = sandwich_envelope_eval(um, t, 1.0 + 1e-9);
  CHECK(m_inner == doctest::Approx(m_outer).epsilon(1e-6));
}

TEST_CASE("sandwich envelope rejects eps outside its admissible range") {
  TailBounds t;
  t.b_under_plus = 2.0;
  t.b_under_minus = 1.0;
  SandwichEnvelope p{Side::Plus, Envelope::Under, 0.5, 1.0, 10.0};
  CHECK_THROWS_AS(sandwich_envelope_eval(p, t, 0.0), std::invalid_argument);
  p.eps = 0.0;
  CHECK_THROWS_AS(sandwich_envelope_eval(p, t, 0.0), std::invalid_argument);
  p.eps = 0.25;
  p.k_eps = 0.0;
  CHECK_THROWS_AS(sandwich_envelope_eval(p, t, 0.0), std::invalid_argument);
}

TEST_CASE("under envelope stays below the over envelope pointwise") {
  test_utils::Rng rng(2712);
  for (int rep = 0; rep < 100; ++rep) {
    TailBounds t;
    t.b_under_plus = rng.uniform(0.5, 2.0);
    t.b_over_plus = t.b_under_plus + rng.uniform(0.0, 1.0);
    t.b_under_minus = rng.uniform(0.5, 2.0);
    t.b_over_minus = t.b_under_minus + rng.uniform(0.0, 1.0);
    const double eps =
        rng.uniform(0.01, 0.49) * std::min(t.b_under_plus, t.b_under_minus);
    const double k_eps = rng.uniform(0.1, 5.0);
    const double x_xi = rng.uniform(6.0, 30.0);
    SandwichEnvelope under{Side::Plus, Envelope::Under, eps, k_eps, x_xi};
    SandwichEnvelope over{Side::Plus, Envelope::Over, eps, k_eps, x_xi};
    for (int i = 0; i < 60; ++i) {
      const double x = rng.uniform(-50.0, 50.0);
      CHECK(sandwich_envelope_eval(under, t, x) <=
            sandwich_envelope_eval(over, t, x) + 1e-12);
    }
  }
}

TEST_CASE("operator lower bound holds for alpha > x0") {
  CHECK(operator_lower_bound_check(ComparisonSpec{1.0, 0.5, 0.0, 3.0}).ok);
  CHECK(operator_lower_bound_check(ComparisonSpec{1.0, 2.0, 0.0, 5.0}).ok);
  CHECK(operator_lower_bound_check(ComparisonSpec{1.0, 1.0, 0.0, 3.0}).ok);

  const LowerBoundCheck bad =
      operator_lower_bound_check(ComparisonSpec{1.0, 0.5, 0.0, -1.0});
  CHECK_FALSE(bad.precondition_ok);
}

TEST_CASE("spectrum is invariant under the centering shift") {
  // H and its shifted form are unitarily equivalent; solving the shifted
  // potential on the shifted box must give the same eigenvalues
  const ComparisonSpec s{1.0, 0.5, 0.0, 5.0};
  SolverOptions opts;
  opts.box = Interval{-6.0, 12.0};
  const auto direct = comparison_eigs(s, 3, opts);

  const auto v_shifted = [&s](double x) {
    if (x >= s.x0 - s.alpha) return s.omega * s.omega * x * x;
    const double u =
        s.omega_tilde * (x + s.alpha - s.x0) + s.omega * (s.x0 - s.alpha);
    return u * u;
  };
  const GridSpec grid = grid_for_interval({-6.0 - 5.0, 12.0 - 5.0},
                                          default_h_max(1.0));
  auto [diag, offdiag] = assemble_tridiagonal(v_shifted, grid);
  const auto shifted = lowest_eigenvalues(diag, offdiag, 3);
  for (int n = 0; n < 3; ++n)
    CHECK(direct[n] == doctest::Approx(shifted[n]).epsilon(1e-8));
}

TEST_CASE("sigma_n respects the operator lower bound spectrally") {
  test_utils::Rng rng(645);
  for (int rep = 0; rep < 6; ++rep) {
    const double omega = rng.uniform(0.5, 2.0);
    const double omega_tilde = rng.uniform(0.3, 2.5);
    const double x0 = rng.uniform(-1.0, 1.0);
    const double alpha = x0 + rng.uniform(0.5, 6.0);
    const ComparisonSpec s{omega, omega_tilde, x0, alpha};
    const auto v = comparison_eigs(s, 2);
    const double ratio = std::min(1.0, omega_tilde / omega);
    // slack covers the second-order discretization error of sigma_n
    for (int n = 0; n < 2; ++n)
      CHECK(v[n] >= ratio * ratio * (2.0 * n + 1.0) * omega - 1e-3);
  }
}
