#include "iwatsuka/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iwatsuka/eigensolve.hpp"

namespace iwatsuka {

void validate_comparison(const ComparisonSpec& s) {
  if (!(s.omega > 0.0) || !(s.omega_tilde > 0.0))
    throw std::invalid_argument(
        "comparison operator: omega and omega_tilde must be > 0");
}

double comparison_potential(const ComparisonSpec& s, double x) {
  if (x >= s.x0) {
    const double u = s.omega * (x - s.alpha);
    return u * u;
  }
  const double u = s.omega_tilde * (x - s.x0) + s.omega * (s.x0 - s.alpha);
  return u * u;
}

namespace {

// The potential minimum: the right-branch vertex alpha when alpha >= x0,
// otherwise the left-branch vertex.
double potential_vertex(const ComparisonSpec& s) {
  if (s.alpha >= s.x0) return s.alpha;
  return s.x0 - s.omega / s.omega_tilde * (s.x0 - s.alpha);
}

}  // namespace

std::vector<double> comparison_eigs(const ComparisonSpec& s, int k,
                                    const SolverOptions& opts) {
  validate_comparison(s);
  if (k < 1) throw std::invalid_argument("comparison_eigs: k must be >= 1");
  const auto v = [&s](double x) { return comparison_potential(s, x); };
  const double m = std::max(s.omega, s.omega_tilde);
  // the max-frequency parabola centered at the vertex dominates pointwise,
  // so (2k-1) max(omega, omega_tilde) bounds sigma_k from above
  const double lambda_est = (2.0 * k - 1.0) * m;
  const std::vector<double> seeds{potential_vertex(s), s.x0};
  return solve_potential_lowest(v, seeds, lambda_est, m, k, opts).values;
}

ConvergenceStudy convergence_study(double omega, double omega_tilde, double x0,
                                   std::span<const double> alphas, int k,
                                   const SolverOptions& opts) {
  if (alphas.empty())
    throw std::invalid_argument("convergence_study: empty alpha list");
  if (!std::is_sorted(alphas.begin(), alphas.end()))
    throw std::invalid_argument("convergence_study: alphas must be increasing");

  ConvergenceStudy st;
  st.omega = omega;
  st.omega_tilde = omega_tilde;
  st.x0 = x0;

  // Every alpha is solved on one common grid (hull of the endpoint boxes),
  // so the error column varies with alpha alone and not with the
  // discretization.
  const double m = std::max(omega, omega_tilde);
  const double lambda_est = (2.0 * k - 1.0) * m;
  const double h_max = opts.h_max > 0.0 ? opts.h_max : default_h_max(m);
  SolverOptions fixed = opts;
  if (!fixed.box) {
    const auto box_for = [&](double alpha) {
      ComparisonSpec spec{omega, omega_tilde, x0, alpha};
      const auto v = [&spec](double x) { return comparison_potential(spec, x); };
      const std::vector<double> seeds{potential_vertex(spec), x0};
      return select_box_for_potential(v, seeds, lambda_est, opts.margin, h_max,
                                      opts.scan_cap);
    };
    const GridSpec lo = box_for(alphas.front());
    const GridSpec hi = box_for(alphas.back());
    fixed.box = Interval{std::min(lo.left, hi.left),
                         std::max(lo.right, hi.right)};
  }

  for (double alpha : alphas) {
    ComparisonSpec spec{omega, omega_tilde, x0, alpha};
    ConvergenceRow row;
    row.alpha = alpha;
    row.sigma = comparison_eigs(spec, k, fixed);
    row.err.resize(k);
    for (int n = 0; n < k; ++n)
      row.err[n] = std::abs(row.sigma[n] - (2.0 * (n + 1) - 1.0) * omega);
    st.rows.push_back(std::move(row));
  }

  // Errors saturate at the solver's resolution once the junction effect
  // drops below it; the trend test allows that much slack.
  const GridSpec grid = grid_for_interval(*fixed.box, h_max);
  const double matrix_scale =
      2.0 / (grid.h() * grid.h()) +
      std::abs(comparison_potential(
          ComparisonSpec{omega, omega_tilde, x0, alphas.back()}, grid.left));
  const double eigen_res =
      opts.eigen_tol > 0.0 ? opts.eigen_tol : 1e-10 * matrix_scale;
  st.slack = 8.0 * eigen_res;
  st.monotone_from.assign(k, -1);
  const int rows = static_cast<int>(st.rows.size());
  for (int n = 0; n < k; ++n) {
    for (int from = 0; from < rows; ++from) {
      bool ok = true;
      for (int i = from; i + 1 < rows; ++i)
        if (st.rows[i + 1].err[n] > st.rows[i].err[n] + st.slack) {
          ok = false;
          break;
        }
      if (ok) {
        st.monotone_from[n] = from;
        break;
      }
    }
  }
  return st;
}

double sandwich_envelope_eval(const SandwichEnvelope& p, const TailBounds& t,
                            double x) {
  const double b_min = std::min(t.b_under_plus, t.b_under_minus);
  const double b_max = std::max(t.b_over_plus, t.b_over_minus);
  if (!(p.eps > 0.0) || !(p.eps < 0.5 * b_min))
    throw std::invalid_argument(
        "sandwich envelope: eps must lie in (0, min(b_under+, b_under-)/2)");
  if (!(p.k_eps > 0.0))
    throw std::invalid_argument("sandwich envelope: K_eps must be > 0");

  if (p.side == Side::Plus) {
    const double inner = p.envelope == Envelope::Under
                             ? t.b_under_plus - 2.0 * p.eps
                             : t.b_over_plus + 2.0 * p.eps;
    const double outer =
        p.envelope == Envelope::Under ? b_min - p.eps : b_max + p.eps;
    if (x >= -p.k_eps) {
      const double u = inner * (x - p.x_xi);
      return u * u;
    }
    const double u =
        outer * (x + p.k_eps) + inner * (-p.k_eps - p.x_xi);
    return u * u;
  }
  const double inner = p.envelope == Envelope::Under
                           ? t.b_under_minus - 2.0 * p.eps
                           : t.b_over_minus + 2.0 * p.eps;
  const double outer =
      p.envelope == Envelope::Under ? b_min - p.eps : b_max + p.eps;
  if (x <= p.k_eps) {
    const double u = inner * (x - p.x_xi);
    return u * u;
  }
  const double u = outer * (x - p.k_eps) + inner * (p.k_eps - p.x_xi);
  return u * u;
}

LowerBoundCheck operator_lower_bound_check(const ComparisonSpec& s,
                                           int grid_points) {
  validate_comparison(s);
  LowerBoundCheck r;
  if (!(s.alpha > s.x0)) {
    r.precondition_ok = false;
    r.ok = false;
    return r;
  }
  const double ratio = std::min(1.0, s.omega_tilde / s.omega);
  const double c = ratio * ratio * s.omega * s.omega;
  // shifted operator potential: x >= x0 - alpha harmonic, linear branch left
  const auto v_shifted = [&s](double x) {
    if (x >= s.x0 - s.alpha) {
      const double u = s.omega * x;
      return u * u;
    }
    const double u =
        s.omega_tilde * (x + s.alpha - s.x0) + s.omega * (s.x0 - s.alpha);
    return u * u;
  };
  const double reach =
      2.0 * std::abs(s.x0 - s.alpha) + 50.0 / std::sqrt(s.omega);
  for (int i = 0; i <= grid_points; ++i) {
    const double x = -reach + 2.0 * reach * i / grid_points;
    const double lhs = c * x * x;
    const double rhs = v_shifted(x);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-12) {
      r.ok = false;
      r.violating_x = x;
      return r;
    }
  }
  r.ok = true;
  return r;
}

}  // namespace iwatsuka
