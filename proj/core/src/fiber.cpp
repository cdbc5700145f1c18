#include "iwatsuka/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iwatsuka/eigensolve.hpp"

namespace iwatsuka {

void validate_grid(const GridSpec& g) {
  if (!(g.left < g.right))
    throw std::invalid_argument("grid: left must be < right");
  if (g.n_interior < 3)
    throw std::invalid_argument("grid: need at least 3 interior nodes");
}

double effective_potential(const GaugeFunction& g, const ProfileSpec& w,
                           double xi, double x) {
  const double a = xi + g(x);
  return a * a + eval_profile(w, x);
}

FiberMatrix assemble_fiber(const GaugeFunction& g, const ProfileSpec& w,
                           double xi, const GridSpec& grid) {
  validate_grid(grid);
  FiberMatrix m;
  m.grid = grid;
  m.xi = xi;
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  m.diag.resize(grid.n_interior);
  m.offdiag.assign(grid.n_interior - 1, -inv_h2);
  for (int j = 0; j < grid.n_interior; ++j)
    m.diag[j] = 2.0 * inv_h2 + effective_potential(g, w, xi, grid.node(j));
  return m;
}

double default_h_max(double b_char) {
  return std::max(1e-2 / std::sqrt(std::max(b_char, 1e-12)), 1e-3);
}

GridSpec grid_for_interval(const Interval& box, double h_max) {
  GridSpec g;
  g.left = box.lo;
  g.right = box.hi;
  g.n_interior = std::max(
      3, static_cast<int>(std::ceil((box.hi - box.lo) / h_max)) - 1);
  return g;
}

namespace {

GridSpec grid_for_box(double left, double right, double h_max) {
  return grid_for_interval(Interval{left, right}, h_max);
}

// Scan outward from `start` in direction `dir` until the potential clears
// `thresh` at three consecutive points; returns the outermost of the run.
double scan_endpoint(const std::function<double(double)>& v, double start,
                     double dir, double step, double thresh, double cap) {
  int hits = 0;
  double x = start;
  while (std::abs(x) <= cap) {
    x += dir * step;
    if (v(x) >= thresh) {
      if (++hits == 3) return x;
    } else {
      hits = 0;
    }
  }
  throw NumericalError(
      "potential is not confining within the scan cap; pass an explicit box");
}

}  // namespace

GridSpec select_box_for_potential(const std::function<double(double)>& v,
                                  std::span<const double> seeds,
                                  double lambda_est, double margin,
                                  double h_max, double scan_cap) {
  if (seeds.empty())
    throw std::invalid_argument("select_box: need at least one seed point");
  const double lo_seed = *std::min_element(seeds.begin(), seeds.end());
  const double hi_seed = *std::max_element(seeds.begin(), seeds.end());
  const double thresh = lambda_est + margin;
  // an eighth of the characteristic length implied by the h policy
  const double scan_step = 12.5 * h_max;
  const double left = scan_endpoint(v, lo_seed, -1.0, scan_step, thresh, scan_cap);
  const double right = scan_endpoint(v, hi_seed, +1.0, scan_step, thresh, scan_cap);
  return grid_for_box(left, right, h_max);
}

FiberSeeding fiber_seeding(const GaugeFunction& g, const ProfileSpec& w,
                           const TailBounds& tails, double xi, int n_bands) {
  if (n_bands < 1)
    throw std::invalid_argument("fiber seeding: n_bands must be >= 1");
  FiberSeeding out;
  out.b_char =
      std::max({std::abs(tails.b_under_plus), std::abs(tails.b_over_plus),
                std::abs(tails.b_under_minus), std::abs(tails.b_over_minus)});
  const auto v = [&](double x) { return effective_potential(g, w, xi, x); };

  out.seeds = turning_points_auto(g, xi).roots;
  if (out.seeds.empty()) {
    // no turning point: seed from the potential minimum over a coarse scan
    const double r = std::max(1.0, structure_radius(g.field()));
    double best_x = 0.0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4096; ++i) {
      const double x = -r + 2.0 * r * i / 4096;
      const double vx = v(x);
      if (vx < best_v) {
        best_v = vx;
        best_x = x;
      }
    }
    out.seeds.push_back(best_x);
  }

  double v_floor = std::numeric_limits<double>::infinity();
  for (double s : out.seeds) v_floor = std::min(v_floor, v(s));
  const double b_over = std::max(tails.b_over_plus, tails.b_over_minus);
  const double w_over = std::max(tails.w_over_plus, tails.w_over_minus);
  out.lambda_est = std::max(0.0, v_floor) +
                   (2.0 * n_bands - 1.0) * std::max(b_over, 0.0) + w_over;
  return out;
}

GridSpec select_box(const GaugeFunction& g, const ProfileSpec& w,
                    const TailBounds& tails, double xi, const BoxOptions& o) {
  const FiberSeeding seeding = fiber_seeding(g, w, tails, xi, o.n_bands);
  const double h_max =
      o.h_max > 0.0 ? o.h_max : default_h_max(seeding.b_char);
  const auto v = [&](double x) { return effective_potential(g, w, xi, x); };
  return select_box_for_potential(v, seeding.seeds, seeding.lambda_est,
                                  o.margin, h_max, o.scan_cap);
}

std::pair<std::vector<double>, std::vector<double>> assemble_tridiagonal(
    const std::function<double(double)>& v, const GridSpec& grid) {
  validate_grid(grid);
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  std::vector<double> diag(grid.n_interior);
  std::vector<double> offdiag(grid.n_interior - 1, -inv_h2);
  for (int j = 0; j < grid.n_interior; ++j)
    diag[j] = 2.0 * inv_h2 + v(grid.node(j));
  return {std::move(diag), std::move(offdiag)};
}

PotentialSolve solve_potential_lowest(const std::function<double(double)>& v,
                                      std::span<const double> seeds,
                                      double lambda_est, double b_char, int k,
                                      const SolverOptions& opts) {
  const double h_max = opts.h_max > 0.0 ? opts.h_max : default_h_max(b_char);
  GridSpec grid;
  bool fixed_box = false;
  if (opts.box) {
    grid = grid_for_box(opts.box->lo, opts.box->hi, h_max);
    fixed_box = true;
  } else {
    grid = select_box_for_potential(v, seeds, lambda_est, opts.margin, h_max,
                                    opts.scan_cap);
  }

  for (int attempt = 0;; ++attempt) {
    auto [diag, offdiag] = assemble_tridiagonal(v, grid);
    std::vector<double> values =
        lowest_eigenvalues(diag, offdiag, k, opts.eigen_tol);
    if (fixed_box) return {std::move(values), grid};
    const double needed = values.back() + opts.margin;
    if (v(grid.left) >= needed && v(grid.right) >= needed)
      return {std::move(values), grid};
    if (attempt >= 40)
      throw NumericalError(
          "box validation did not converge; potential may not be confining");
    const double c = 0.5 * (grid.left + grid.right);
    const double w = grid.right - grid.left;
    grid = grid_for_box(c - w, c + w, h_max);
  }
}

}  // namespace iwatsuka
