#include "iwatsuka/workflows.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "iwatsuka/bands.hpp"
#include "iwatsuka/comparison.hpp"
#include "iwatsuka/layer.hpp"

namespace iwatsuka {

using nlohmann::json;

namespace {

FiberProblem resolve_problem(const RunConfig& cfg) {
  if (cfg.builtin) {
    const CatalogEntry* e = find_catalog_entry(*cfg.builtin);
    if (!e) throw ConfigError("unknown builtin profile pair: " + *cfg.builtin);
    return make_problem(e->field, e->potential);
  }
  if (!cfg.field) throw ConfigError("no field profile configured");
  ProfileSpec w =
      cfg.potential ? *cfg.potential : ProfileSpec(ConstantProfile{0.0});
  return make_problem(*cfg.field, w);
}

json decision_json(const ACDecision& d, bool heuristic) {
  json j;
  j["verdict"] = d.verdict;
  j["condition"] = std::string(to_string(d.matched));
  j["margin"] = d.margin;
  j["heuristic"] = heuristic;
  json all = json::array();
  for (ACCondition c : d.all_matched) all.push_back(std::string(to_string(c)));
  j["all_matched"] = all;
  return j;
}

void print_band_summary(std::ostream& out, const BandSweep& s,
                        const BandDiagnostics& d, const ACDecision& ac) {
  const auto tail_text = [](const TailEntry& e) {
    if (!e.applicable) return std::string(" (divergent side, no tail bound)");
    std::string txt = " in [" + format_double(e.lo) + ", " +
                      format_double(e.hi) + "]";
    if (!e.inside) txt += " OUTSIDE";
    return txt;
  };
  for (int n = 0; n < s.k; ++n) {
    const TailEntry& plus = d.tail_report[2 * n];
    const TailEntry& minus = d.tail_report[2 * n + 1];
    const NonconstancyEntry& nc = d.nonconstancy[n];
    out << "band " << (n + 1) << ": lambda(xi_min)="
        << format_double(plus.estimate) << tail_text(plus)
        << ", lambda(xi_max)=" << format_double(minus.estimate)
        << tail_text(minus) << ", nonconstant="
        << (nc.nonconstant ? "yes" : "no")
        << (nc.by_criterion ? " (tail criterion)" : "")
        << (nc.by_oscillation ? " (oscillation)" : "") << "\n";
  }
  out << "AC verdict: " << (ac.verdict ? "true" : "false") << " ("
      << to_string(ac.matched) << ", margin " << format_double(ac.margin)
      << ")\n";
}

int run_bands(const RunConfig& cfg, std::ostream& out) {
  FiberProblem problem = resolve_problem(cfg);
  const ACDecision ac = ac_condition(problem.tails);
  const std::vector<double> xi = linspace(cfg.xi.min, cfg.xi.max, cfg.xi.count);
  BandSweep s = sweep(problem, xi, cfg.k, cfg.solver);
  BandDiagnostics d = diagnose(s, problem.tails, cfg.tail_tol, cfg.osc_tol);

  ExportContext ctx{problem.tails, ac, cfg.solver, std::nullopt};
  if (cfg.sandwich) {
    ctx.sandwich = sandwich_check(problem, cfg.sandwich->xi, cfg.sandwich->eps,
                                  cfg.sandwich->k, cfg.solver);
    d.sandwich_ok = ctx.sandwich->ok;
  }

  print_band_summary(out, s, d, ac);
  if (!cfg.out_dir.empty()) {
    export_sweep(s, d, ctx, cfg.out_dir);
    if (cfg.plot)
      emit_plot_script(cfg.out_dir / "bands.csv", cfg.out_dir / "meta.json",
                       cfg.out_dir / "bands.gp");
  }
  return 0;
}

int run_accheck(const RunConfig& cfg, std::ostream& out) {
  FiberProblem problem = resolve_problem(cfg);
  const ACDecision ac = ac_condition(problem.tails);
  json j = decision_json(ac, !problem.tails.exact);
  out << j.dump() << "\n";
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(cfg.out_dir / "accheck.json", std::ios::binary);
    if (!f) throw ConfigError("cannot open accheck.json for writing");
    f << j.dump(2) << "\n";
  }
  return 0;
}

int run_comparison(const RunConfig& cfg, std::ostream& out) {
  const ComparisonConfig& c = cfg.comparison;
  ConvergenceStudy st = convergence_study(c.omega, c.omega_tilde, c.x0,
                                          c.alphas, cfg.k, cfg.solver);
  for (const ConvergenceRow& r : st.rows) {
    out << "alpha " << format_double(r.alpha) << ":";
    for (int n = 0; n < cfg.k; ++n)
      out << " sigma_" << (n + 1) << "=" << format_double(r.sigma[n])
          << " (err " << format_double(r.err[n]) << ")";
    out << "\n";
  }
  for (int n = 0; n < cfg.k; ++n)
    out << "band " << (n + 1) << ": error non-increasing from row "
        << st.monotone_from[n] << " on (slack " << format_double(st.slack)
        << ")\n";

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream csv(cfg.out_dir / "comparison.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot open comparison.csv for writing");
    csv << "alpha";
    for (int n = 1; n <= cfg.k; ++n) csv << ",sigma_" << n;
    for (int n = 1; n <= cfg.k; ++n) csv << ",err_" << n;
    csv << "\n";
    for (const ConvergenceRow& r : st.rows) {
      csv << format_double(r.alpha);
      for (int n = 0; n < cfg.k; ++n) csv << "," << format_double(r.sigma[n]);
      for (int n = 0; n < cfg.k; ++n) csv << "," << format_double(r.err[n]);
      csv << "\n";
    }
    json j;
    j["schema"] = 1;
    j["omega"] = st.omega;
    j["omega_tilde"] = st.omega_tilde;
    j["x0"] = st.x0;
    j["k"] = cfg.k;
    j["slack"] = st.slack;
    j["monotone_from"] = st.monotone_from;
    std::ofstream meta(cfg.out_dir / "meta.json", std::ios::binary);
    meta << j.dump(2) << "\n";
  }
  return 0;
}

int run_layer(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.layer) throw ConfigError("layer workflow requires a layer section");
  const LayerConfig& lc = *cfg.layer;
  EffectiveProfile e = effective_profile(lc.curve, lc.b0);
  LayerACReport rep = layer_ac_check(e);

  out << "layer AC verdict: " << (rep.decision.verdict ? "true" : "false")
      << " (clause " << to_string(rep.clause);
  if (rep.clause == LayerClause::CurvatureGap ||
      rep.clause == LayerClause::CurvatureGapSwapped)
    out << ", scaled margin " << format_double(rep.scaled_margin);
  out << ")\n";
  if (!e.tails_exact)
    out << "note: tail bounds sampled from the curve data (heuristic)\n";

  std::optional<BandSweep> s;
  std::optional<BandDiagnostics> d;
  if (lc.run_bands) {
    const std::vector<double> xi =
        linspace(cfg.xi.min, cfg.xi.max, cfg.xi.count);
    s = layer_bands(e, xi, cfg.k, cfg.solver);
    d = diagnose(*s, e.tails, cfg.tail_tol, cfg.osc_tol);
    print_band_summary(out, *s, *d, rep.decision);
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    {
      std::ofstream csv(cfg.out_dir / "effective_profile.csv",
                        std::ios::binary);
      if (!csv)
        throw ConfigError("cannot open effective_profile.csv for writing");
      csv << "s,b_eff,w_eff,kappa\n";
      for (std::size_t i = 0; i < e.s.size(); ++i)
        csv << format_double(e.s[i]) << ","
            << format_double(eval_profile(e.b_eff, e.s[i])) << ","
            << format_double(eval_profile(e.w_eff, e.s[i])) << ","
            << format_double(e.kappa[i]) << "\n";
    }
    if (s) {
      ExportContext ctx{e.tails, rep.decision, cfg.solver, std::nullopt};
      export_sweep(*s, *d, ctx, cfg.out_dir);
      // layer verdict details into the sweep meta
      std::ifstream meta_in(cfg.out_dir / "meta.json");
      json j = json::parse(meta_in);
      meta_in.close();
      j["layer"] = {{"clause", std::string(to_string(rep.clause))},
                    {"scaled_margin", rep.scaled_margin},
                    {"b0", e.b0},
                    {"tails_exact", e.tails_exact},
                    {"joins", e.joins}};
      std::ofstream meta_out(cfg.out_dir / "meta.json", std::ios::binary);
      meta_out << j.dump(2) << "\n";
      if (cfg.plot)
        emit_plot_script(cfg.out_dir / "bands.csv", cfg.out_dir / "meta.json",
                         cfg.out_dir / "bands.gp");
    } else {
      json j;
      j["schema"] = 1;
      j["ac"] = decision_json(rep.decision, !e.tails_exact);
      j["layer"] = {{"clause", std::string(to_string(rep.clause))},
                    {"scaled_margin", rep.scaled_margin},
                    {"b0", e.b0},
                    {"tails_exact", e.tails_exact},
                    {"joins", e.joins}};
      std::ofstream meta(cfg.out_dir / "meta.json", std::ios::binary);
      meta << j.dump(2) << "\n";
    }
  }
  return 0;
}

int run_gauge_debug(const RunConfig& cfg, std::ostream& out) {
  FiberProblem problem = resolve_problem(cfg);
  const GaugeFunction g(problem.field, cfg.gauge_debug.base_point);
  const std::vector<double> xs = linspace(
      cfg.gauge_debug.x_min, cfg.gauge_debug.x_max, cfg.gauge_debug.count);

  std::ostringstream csv;
  csv << "x,b,a_y\n";
  for (double x : xs)
    csv << format_double(x) << "," << format_double(eval_profile(problem.field, x))
        << "," << format_double(g(x)) << "\n";

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(cfg.out_dir / "gauge.csv", std::ios::binary);
    if (!f) throw ConfigError("cannot open gauge.csv for writing");
    f << csv.str();
  } else {
    out << csv.str();
  }
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.workflow) {
      case Workflow::Bands: return run_bands(cfg, out);
      case Workflow::ACCheck: return run_accheck(cfg, out);
      case Workflow::Comparison: return run_comparison(cfg, out);
      case Workflow::Layer: return run_layer(cfg, out);
      case Workflow::GaugeDebug: return run_gauge_debug(cfg, out);
    }
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

void emit_plot_script(const std::filesystem::path& bands_csv,
                      const std::filesystem::path& meta_json,
                      const std::filesystem::path& out_path) {
  if (!std::filesystem::exists(bands_csv))
    throw ConfigError("plot: missing input file " + bands_csv.string());
  if (!std::filesystem::exists(meta_json))
    throw ConfigError("plot: missing input file " + meta_json.string());

  std::ifstream meta_in(meta_json);
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("plot: meta.json is not valid JSON: ") +
                      e.what());
  }
  const int k = meta.at("k").get<int>();

  // guide levels b_under (2n-1) + w_under per side, deduplicated
  std::vector<double> guides;
  if (meta.contains("tail_bounds")) {
    const json& t = meta["tail_bounds"];
    for (int n = 1; n <= k; ++n) {
      const double odd = 2.0 * n - 1.0;
      for (const char* side : {"plus", "minus"}) {
        const double level =
            t[std::string("b_under_") + side].get<double>() * odd +
            t[std::string("w_under_") + side].get<double>();
        bool seen = false;
        for (double g : guides)
          if (std::abs(g - level) < 1e-12) seen = true;
        if (!seen) guides.push_back(level);
      }
    }
  }

  const std::string csv_name = bands_csv.filename().string();
  std::ostringstream s;
  s << "# dispersion curves; run: gnuplot " << out_path.filename().string()
    << "\n";
  s << "set datafile separator ','\n";
  s << "set xlabel 'xi'\n";
  s << "set ylabel 'lambda_n(xi)'\n";
  s << "set key left top\n";
  s << "plot \\\n";
  for (int n = 1; n <= k; ++n) {
    s << "  '" << csv_name << "' skip 1 using 1:" << (n + 1)
      << " with lines title 'lambda_" << n << "'";
    if (n < k || !guides.empty()) s << ", \\\n";
  }
  for (std::size_t i = 0; i < guides.size(); ++i) {
    s << "  " << format_double(guides[i])
      << " with lines dashtype 2 linecolor 'gray' title 'tail level "
      << format_double(guides[i]) << "'";
    if (i + 1 < guides.size()) s << ", \\\n";
  }
  s << "\n";

  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigError("plot: cannot open " + out_path.string());
  f << s.str();
}

}  // namespace iwatsuka
