#include "iwatsuka/bands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "iwatsuka/eigensolve.hpp"

namespace iwatsuka {

FiberProblem make_problem(ProfileSpec field, ProfileSpec potential,
                          const TailSampling& sampling) {
  validate_profile(field);
  validate_profile(potential);
  TailBounds t = tail_bounds(field, potential, sampling);
  return FiberProblem{std::move(field), std::move(potential), t};
}

namespace {

// Confinement of the fiber potentials follows from the tail signs: both
// A_y tails escaping (b_under > 0 on both sides), or one of the
// sign-changing configurations where A_y diverges to the same side.
bool confining(const TailBounds& t) {
  if (t.b_under_plus > 0.0 && t.b_under_minus > 0.0) return true;
  if (t.b_under_plus > 0.0 && t.b_over_minus < 0.0) return true;
  if (t.b_under_minus > 0.0 && t.b_over_plus < 0.0) return true;
  return false;
}

double b_char_of(const TailBounds& t) {
  return std::max({std::abs(t.b_under_plus), std::abs(t.b_over_plus),
                   std::abs(t.b_under_minus), std::abs(t.b_over_minus)});
}

struct SingleSolve {
  std::vector<double> values;
  XiSolveMeta meta;
};

SingleSolve solve_fiber(const GaugeFunction& g, const FiberProblem& p,
                        double xi, int k, const SolverOptions& opts) {
  const auto v = [&](double x) {
    return effective_potential(g, p.potential, xi, x);
  };
  FiberSeeding seeding;
  if (!opts.box) {
    seeding = fiber_seeding(g, p.potential, p.tails, xi, k);
  } else {
    seeding.seeds.push_back(0.5 * (opts.box->lo + opts.box->hi));
    seeding.b_char = b_char_of(p.tails);
  }

  PotentialSolve s = solve_potential_lowest(v, seeding.seeds,
                                            seeding.lambda_est,
                                            seeding.b_char, k, opts);

  SingleSolve out;
  out.values = std::move(s.values);
  out.meta = XiSolveMeta{xi, Interval{s.grid.left, s.grid.right}, s.grid.h(),
                         s.grid.n_interior};

  // simplicity at the discrete level
  auto [diag, offdiag] = assemble_tridiagonal(v, s.grid);
  const double scale = tridiag_scale(diag, offdiag);
  const double gap_tol = opts.gap_tol_scale * std::max(scale, 1.0);
  for (std::size_t n = 1; n < out.values.size(); ++n) {
    if (out.values[n] - out.values[n - 1] <= gap_tol)
      throw NumericalError("eigenvalue collision at xi = " +
                           format_double(xi) + ": bands " + std::to_string(n) +
                           " and " + std::to_string(n + 1) + " closer than " +
                           format_double(gap_tol));
  }
  return out;
}

}  // namespace

BandSweep sweep(const FiberProblem& problem, std::span<const double> xi_grid,
                int k, const SolverOptions& opts) {
  if (xi_grid.empty())
    throw std::invalid_argument("sweep: empty xi grid");
  if (k < 1) throw std::invalid_argument("sweep: k must be >= 1");
  if (!confining(problem.tails))
    throw NumericalError(
        "fiber potentials are not confining for these tail bounds; need "
        "b_under > 0 on both sides or a sign-changing configuration");

  const GaugeFunction g(problem.field);
  const int count = static_cast<int>(xi_grid.size());
  std::vector<SingleSolve> solves(count);

  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    for (int i = 0; i < count; ++i)
      solves[i] = solve_fiber(g, problem, xi_grid[i], k, opts);
  } else {
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          solves[i] = solve_fiber(g, problem, xi_grid[i], k, opts);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  BandSweep s;
  s.xi_grid.assign(xi_grid.begin(), xi_grid.end());
  s.k = k;
  s.bands.assign(k, std::vector<double>(count));
  s.meta.resize(count);
  for (int i = 0; i < count; ++i) {
    for (int n = 0; n < k; ++n) s.bands[n][i] = solves[i].values[n];
    s.meta[i] = solves[i].meta;
  }
  return s;
}

BandDiagnostics diagnose(const BandSweep& s, const TailBounds& t,
                         double tail_tol, double osc_tol) {
  if (s.xi_grid.empty()) throw std::invalid_argument("diagnose: empty sweep");
  BandDiagnostics d;
  d.tail_tol = tail_tol;
  d.osc_tol = osc_tol;

  const int count = static_cast<int>(s.xi_grid.size());
  d.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i)
    for (int n = 0; n + 1 < s.k; ++n)
      d.min_gap = std::min(d.min_gap, s.bands[n + 1][i] - s.bands[n][i]);
  if (s.k < 2) d.min_gap = std::numeric_limits<double>::infinity();

  d.oscillation.resize(s.k);
  for (int n = 0; n < s.k; ++n) {
    const auto [mn, mx] =
        std::minmax_element(s.bands[n].begin(), s.bands[n].end());
    d.oscillation[n] = *mx - *mn;
  }

  d.lipschitz_max = 0.0;
  for (int n = 0; n < s.k; ++n)
    for (int i = 0; i + 1 < count; ++i) {
      const double dxi = s.xi_grid[i + 1] - s.xi_grid[i];
      if (dxi > 0.0)
        d.lipschitz_max = std::max(
            d.lipschitz_max,
            std::abs(s.bands[n][i + 1] - s.bands[n][i]) / dxi);
    }
  // first-order perturbation bound: dlambda/dxi = <psi, 2(xi+A_y) psi> and
  // on the classically allowed region (xi+A_y)^2 <= lambda - W_min
  {
    const double w_min =
        std::min({t.w_under_plus, t.w_under_minus, 0.0});
    double lam_max = 0.0;
    for (int n = 0; n < s.k; ++n)
      for (int i = 0; i < count; ++i)
        lam_max = std::max(lam_max, std::abs(s.bands[n][i]));
    d.lipschitz_bound = 2.0 * std::sqrt(std::max(0.0, lam_max - w_min));
  }

  // side convention: xi -> -infinity pairs with the + tails
  const double xi_lo = s.xi_grid.front();
  const double xi_hi = s.xi_grid.back();
  for (int n = 0; n < s.k; ++n) {
    const double odd = 2.0 * (n + 1) - 1.0;
    TailEntry plus;
    plus.band = n + 1;
    plus.side = Side::Plus;
    plus.xi = xi_lo;
    plus.estimate = s.bands[n].front();
    plus.lo = t.b_under_plus * odd + t.w_under_plus;
    plus.hi = t.b_over_plus * odd + t.w_over_plus;
    plus.applicable = t.b_under_plus > 0.0;
    plus.inside = plus.applicable && plus.estimate >= plus.lo - tail_tol &&
                  plus.estimate <= plus.hi + tail_tol;
    plus.residual = std::max({plus.lo - plus.estimate,
                              plus.estimate - plus.hi, 0.0});
    d.tail_report.push_back(plus);

    TailEntry minus;
    minus.band = n + 1;
    minus.side = Side::Minus;
    minus.xi = xi_hi;
    minus.estimate = s.bands[n].back();
    minus.lo = t.b_under_minus * odd + t.w_under_minus;
    minus.hi = t.b_over_minus * odd + t.w_over_minus;
    minus.applicable = t.b_under_minus > 0.0;
    minus.inside = minus.applicable && minus.estimate >= minus.lo - tail_tol &&
                   minus.estimate <= minus.hi + tail_tol;
    minus.residual = std::max({minus.lo - minus.estimate,
                               minus.estimate - minus.hi, 0.0});
    d.tail_report.push_back(minus);
  }

  for (int n = 0; n < s.k; ++n) {
    const double odd = 2.0 * (n + 1) - 1.0;
    NonconstancyEntry e;
    e.band = n + 1;
    const double plus_lo = t.b_under_plus * odd + t.w_under_plus;
    const double plus_hi = t.b_over_plus * odd + t.w_over_plus;
    const double minus_lo = t.b_under_minus * odd + t.w_under_minus;
    const double minus_hi = t.b_over_minus * odd + t.w_over_minus;
    // the interval criterion presumes the tail sandwich on both sides
    const bool applicable = t.b_under_plus > 0.0 && t.b_under_minus > 0.0;
    e.by_criterion =
        applicable && ((minus_hi < plus_lo) || (plus_hi < minus_lo));
    e.by_oscillation = d.oscillation[n] > osc_tol;
    e.nonconstant = e.by_criterion || e.by_oscillation;
    d.nonconstancy.push_back(e);
  }
  return d;
}

namespace {

// Smallest K such that the sampled profiles stay inside their eps-widened
// tail envelopes beyond K on both sides.
double find_k_eps(const FiberProblem& p, double eps) {
  const double r_struct = std::max({1.0, structure_radius(p.field),
                                    structure_radius(p.potential)});
  const double window = std::max(100.0, 2.0 * r_struct);
  const int n_check = 4096;
  const TailBounds& t = p.tails;

  const auto tail_ok = [&](double k) {
    for (int i = 0; i <= n_check; ++i) {
      const double xp = k + window * i / n_check;
      const double b = eval_profile(p.field, xp);
      const double w = eval_profile(p.potential, xp);
      if (!(b > t.b_under_plus - eps && b < t.b_over_plus + eps)) return false;
      if (!(w > t.w_under_plus - eps && w < t.w_over_plus + eps)) return false;
      const double xm = -k - window * i / n_check;
      const double bm = eval_profile(p.field, xm);
      const double wm = eval_profile(p.potential, xm);
      if (!(bm > t.b_under_minus - eps && bm < t.b_over_minus + eps))
        return false;
      if (!(wm > t.w_under_minus - eps && wm < t.w_over_minus + eps))
        return false;
    }
    return true;
  };

  for (double k = 0.25; k <= 32.0; k += 0.25)
    if (tail_ok(k)) return k;
  for (double k = 64.0; k <= 65536.0; k *= 2.0)
    if (tail_ok(k)) return k;
  throw NumericalError(
      "no K_eps witness found within the scan cap; eps may be too small for "
      "these profiles");
}

SandwichReport mirror(SandwichReport r) {
  r.side = Side::Minus;
  r.x_xi = -r.x_xi;
  if (r.violating_x) r.violating_x = -*r.violating_x;
  return r;
}

}  // namespace

SandwichReport sandwich_check(const FiberProblem& problem, double xi,
                              double eps, int k, const SolverOptions& opts) {
  const TailBounds& t = problem.tails;
  const double eps_cap = 0.5 * std::min(t.b_under_plus, t.b_under_minus);
  if (!(eps > 0.0) || !(eps < eps_cap))
    throw std::invalid_argument(
        "sandwich_check: eps must lie in (0, min(b_under+, b_under-)/2)");

  if (xi > 0.0) {
    // the xi -> +infinity side is the reflection x -> -x of the + side
    FiberProblem reflected{reflect_profile(problem.field),
                           reflect_profile(problem.potential),
                           swap_sides(problem.tails)};
    return mirror(sandwich_check(reflected, -xi, eps, k, opts));
  }

  SandwichReport rep;
  rep.eps = eps;
  rep.side = Side::Plus;

  const GaugeFunction g(problem.field);
  TurningPoints tp = turning_points_auto(g, xi);
  if (tp.roots.empty()) {
    rep.ok = false;
    rep.reason = "no turning point found";
    return rep;
  }
  // xi -> -infinity sends the well to x = +infinity; with several roots the
  // largest one is the relevant center (the pointwise check still decides)
  rep.x_xi = tp.roots.back();
  rep.k_eps = find_k_eps(problem, eps);
  if (!(rep.x_xi > rep.k_eps)) {
    rep.ok = false;
    rep.reason = "xi is not beyond xi_eps: turning point x_xi <= K_eps";
    return rep;
  }

  SandwichEnvelope under{Side::Plus, Envelope::Under, eps, rep.k_eps, rep.x_xi};
  SandwichEnvelope over{Side::Plus, Envelope::Over, eps, rep.k_eps, rep.x_xi};

  const auto v_fiber = [&](double x) {
    return effective_potential(g, problem.potential, xi, x);
  };
  const auto v_under = [&](double x) {
    return sandwich_envelope_eval(under, t, x) + t.w_under_plus - eps;
  };
  const auto v_over = [&](double x) {
    return sandwich_envelope_eval(over, t, x) + t.w_over_plus + eps;
  };

  // shared grid: box validated for the under operator, whose states are the
  // widest of the three
  const double b_char = b_char_of(t);
  std::vector<double> seeds{rep.x_xi};
  const double lambda_est =
      (2.0 * k - 1.0) * std::max({t.b_over_plus, t.b_over_minus, 0.0}) +
      std::max(t.w_over_plus, t.w_over_minus);
  PotentialSolve under_solve =
      solve_potential_lowest(v_under, seeds, lambda_est, b_char, k, opts);
  const GridSpec grid = under_solve.grid;

  // pointwise inequality on every node
  for (int j = 0; j < grid.n_interior; ++j) {
    const double x = grid.node(j);
    const double vu = v_under(x);
    const double vf = v_fiber(x);
    const double vo = v_over(x);
    if (!(vu <= vf && vf <= vo)) {
      rep.ok = false;
      rep.reason = "pointwise potential inequality fails";
      rep.violating_node = j;
      rep.violating_x = x;
      return rep;
    }
  }

  // fiber and over operators on the exact same grid
  const auto solve_on_grid = [&](const std::function<double(double)>& v) {
    auto [dd, ee] = assemble_tridiagonal(v, grid);
    return lowest_eigenvalues(dd, ee, k, opts.eigen_tol);
  };
  rep.under_values = under_solve.values;
  rep.fiber_values = solve_on_grid(v_fiber);
  rep.over_values = solve_on_grid(v_over);

  // discrete minimax ordering, with slack for the bisection widths
  auto [diag, offdiag] = assemble_tridiagonal(v_fiber, grid);
  const double scale = tridiag_scale(diag, offdiag);
  const double tol =
      opts.eigen_tol > 0.0 ? opts.eigen_tol : 1e-10 * std::max(scale, 1.0);
  for (int n = 0; n < k; ++n) {
    if (!(rep.under_values[n] <= rep.fiber_values[n] + 2.0 * tol &&
          rep.fiber_values[n] <= rep.over_values[n] + 2.0 * tol)) {
      rep.ok = false;
      rep.reason = "eigenvalue ordering violated for band " +
                   std::to_string(n + 1);
      return rep;
    }
  }
  rep.ok = true;
  return rep;
}

namespace {

nlohmann::json tails_to_json(const TailBounds& t) {
  nlohmann::json j;
  j["b_under_plus"] = t.b_under_plus;
  j["b_over_plus"] = t.b_over_plus;
  j["b_under_minus"] = t.b_under_minus;
  j["b_over_minus"] = t.b_over_minus;
  j["w_under_plus"] = t.w_under_plus;
  j["w_over_plus"] = t.w_over_plus;
  j["w_under_minus"] = t.w_under_minus;
  j["w_over_minus"] = t.w_over_minus;
  j["provenance"] = t.exact ? "exact" : "sampled";
  if (!t.exact) {
    j["window"] = t.window;
    j["n_points"] = t.n_points;
  }
  return j;
}

}  // namespace

void export_sweep(const BandSweep& s, const BandDiagnostics& d,
                  const ExportContext& ctx,
                  const std::filesystem::path& directory) {
  if (s.xi_grid.empty())
    throw std::invalid_argument("export_sweep: empty sweep");
  std::filesystem::create_directories(directory);

  {
    std::ofstream csv(directory / "bands.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot open bands.csv for writing");
    csv << "xi";
    for (int n = 1; n <= s.k; ++n) csv << ",lambda_" << n;
    csv << "\n";
    for (std::size_t i = 0; i < s.xi_grid.size(); ++i) {
      csv << format_double(s.xi_grid[i]);
      for (int n = 0; n < s.k; ++n)
        csv << "," << format_double(s.bands[n][i]);
      csv << "\n";
    }
  }

  nlohmann::json j;
  j["schema"] = 1;
  j["k"] = s.k;
  j["tail_bounds"] = tails_to_json(ctx.tails);
  j["ac"] = {{"verdict", ctx.ac.verdict},
             {"condition", std::string(to_string(ctx.ac.matched))},
             {"margin", ctx.ac.margin},
             {"heuristic", !ctx.tails.exact}};
  j["solver"] = {{"h_max", ctx.options.h_max},
                 {"margin", ctx.options.margin},
                 {"eigen_tol", ctx.options.eigen_tol},
                 {"box_tol", ctx.options.box_tol},
                 {"gap_tol_scale", ctx.options.gap_tol_scale},
                 {"threads", ctx.options.threads}};
  j["side_convention"] =
      "xi -> -infinity pairs with the + tail bounds, xi -> +infinity with -";
  j["diagnostics"] = {{"min_gap", d.min_gap},
                      {"oscillation", d.oscillation},
                      {"lipschitz_max", d.lipschitz_max},
                      {"lipschitz_bound", d.lipschitz_bound},
                      {"tail_tol", d.tail_tol},
                      {"osc_tol", d.osc_tol}};
  if (d.sandwich_ok) j["diagnostics"]["sandwich_ok"] = *d.sandwich_ok;
  auto& tail = j["diagnostics"]["tail_report"] = nlohmann::json::array();
  for (const TailEntry& e : d.tail_report)
    tail.push_back({{"band", e.band},
                    {"side", e.side == Side::Plus ? "plus" : "minus"},
                    {"xi", e.xi},
                    {"estimate", e.estimate},
                    {"interval", {e.lo, e.hi}},
                    {"applicable", e.applicable},
                    {"inside", e.inside},
                    {"residual", e.residual}});
  auto& nc = j["diagnostics"]["nonconstancy"] = nlohmann::json::array();
  for (const NonconstancyEntry& e : d.nonconstancy)
    nc.push_back({{"band", e.band},
                  {"by_criterion", e.by_criterion},
                  {"by_oscillation", e.by_oscillation},
                  {"nonconstant", e.nonconstant}});
  if (ctx.sandwich) {
    const SandwichReport& r = *ctx.sandwich;
    nlohmann::json sj = {{"ok", r.ok},
                         {"eps", r.eps},
                         {"k_eps", r.k_eps},
                         {"x_xi", r.x_xi},
                         {"side", r.side == Side::Plus ? "plus" : "minus"}};
    if (!r.ok) sj["reason"] = r.reason;
    if (r.violating_x) sj["violating_x"] = *r.violating_x;
    j["sandwich"] = sj;
  }
  auto& per_xi = j["per_xi"] = nlohmann::json::array();
  for (const XiSolveMeta& m : s.meta)
    per_xi.push_back({{"xi", m.xi},
                      {"box", {m.box.lo, m.box.hi}},
                      {"h", m.h},
                      {"n_interior", m.n_interior}});

  std::ofstream meta(directory / "meta.json", std::ios::binary);
  if (!meta) throw ConfigError("cannot open meta.json for writing");
  meta << j.dump(2) << "\n";
}

}  // namespace iwatsuka
