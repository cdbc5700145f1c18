// Batch front end: bands, accheck, comparison, layer, gauge-debug.
// Each subcommand takes a JSON run configuration (--config) and/or the
// common override flags; exit codes: 0 success, 1 numerical failure,
// 2 configuration error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "iwatsuka/workflows.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string builtin;
  std::optional<int> k;
  std::optional<double> xi_min, xi_max;
  std::optional<int> xi_count;
  std::optional<double> h_max, margin;
  std::optional<int> threads;
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration file");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--k", f.k, "number of bands");
  cmd->add_option("--xi-min", f.xi_min, "quasi-momentum grid start");
  cmd->add_option("--xi-max", f.xi_max, "quasi-momentum grid end");
  cmd->add_option("--xi-count", f.xi_count, "quasi-momentum grid points");
  cmd->add_option("--h-max", f.h_max, "grid spacing cap");
  cmd->add_option("--margin", f.margin, "box confinement margin");
  cmd->add_option("--threads", f.threads, "solver worker threads");
  cmd->add_flag("--plot", f.plot, "emit a gnuplot script next to bands.csv");
}

int apply_and_run(iwatsuka::Workflow wf, const CommonFlags& f) {
  iwatsuka::RunConfig cfg;
  if (!f.config_path.empty()) {
    cfg = iwatsuka::parse_config(f.config_path);
  } else {
    cfg.workflow = wf;
  }
  cfg.workflow = wf;
  if (!f.builtin.empty()) cfg.builtin = f.builtin;
  if (f.k) cfg.k = *f.k;
  if (f.xi_min) cfg.xi.min = *f.xi_min;
  if (f.xi_max) cfg.xi.max = *f.xi_max;
  if (f.xi_count) cfg.xi.count = *f.xi_count;
  if (f.h_max) cfg.solver.h_max = *f.h_max;
  if (f.margin) cfg.solver.margin = *f.margin;
  if (f.threads) cfg.solver.threads = *f.threads;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (f.plot) cfg.plot = true;
  return iwatsuka::run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure and absolute-continuity toolkit for "
               "y-translation-invariant 2D magnetic Schrodinger operators"};
  app.require_subcommand(1);

  CommonFlags bands_f, ac_f, cmp_f, layer_f, gauge_f;

  CLI::App* bands = app.add_subcommand(
      "bands", "sweep the band functions lambda_n(xi) and export CSV/JSON");
  add_common(bands, bands_f);
  bands->add_option("--builtin", bands_f.builtin,
                    "catalog profile pair (landau, iwatsuka-step, ...)");

  CLI::App* accheck = app.add_subcommand(
      "accheck", "evaluate the absolute-continuity conditions on tail bounds");
  add_common(accheck, ac_f);
  accheck->add_option("--builtin", ac_f.builtin, "catalog profile pair");

  CLI::App* comparison = app.add_subcommand(
      "comparison", "comparison-operator eigenvalue convergence study");
  add_common(comparison, cmp_f);
  std::optional<double> omega, omega_tilde, x0;
  std::vector<double> alphas;
  comparison->add_option("--omega", omega, "harmonic branch frequency");
  comparison->add_option("--omega-tilde", omega_tilde, "left branch slope");
  comparison->add_option("--x0", x0, "junction point");
  comparison->add_option("--alpha", alphas, "well centers (repeatable)");

  CLI::App* layer = app.add_subcommand(
      "layer", "thin curved layer: effective profiles, AC verdict, bands");
  add_common(layer, layer_f);

  CLI::App* gauge = app.add_subcommand(
      "gauge-debug", "print the vector potential A_y on a grid as CSV");
  add_common(gauge, gauge_f);
  gauge->add_option("--builtin", gauge_f.builtin, "catalog profile pair");
  std::optional<double> gx_min, gx_max, gbase;
  std::optional<int> gcount;
  gauge->add_option("--x-min", gx_min, "grid start");
  gauge->add_option("--x-max", gx_max, "grid end");
  gauge->add_option("--count", gcount, "grid points");
  gauge->add_option("--base-point", gbase, "gauge base point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bands->parsed()) return apply_and_run(iwatsuka::Workflow::Bands, bands_f);
    if (accheck->parsed())
      return apply_and_run(iwatsuka::Workflow::ACCheck, ac_f);
    if (comparison->parsed()) {
      iwatsuka::RunConfig cfg;
      if (!cmp_f.config_path.empty())
        cfg = iwatsuka::parse_config(cmp_f.config_path);
      cfg.workflow = iwatsuka::Workflow::Comparison;
      if (cmp_f.k) cfg.k = *cmp_f.k;
      if (omega) cfg.comparison.omega = *omega;
      if (omega_tilde) cfg.comparison.omega_tilde = *omega_tilde;
      if (x0) cfg.comparison.x0 = *x0;
      if (!alphas.empty()) cfg.comparison.alphas = alphas;
      if (!cmp_f.out_dir.empty()) cfg.out_dir = cmp_f.out_dir;
      if (cmp_f.h_max) cfg.solver.h_max = *cmp_f.h_max;
      if (cmp_f.threads) cfg.solver.threads = *cmp_f.threads;
      return iwatsuka::run(cfg);
    }
    if (layer->parsed()) return apply_and_run(iwatsuka::Workflow::Layer, layer_f);
    if (gauge->parsed()) {
      iwatsuka::RunConfig cfg;
      if (!gauge_f.config_path.empty())
        cfg = iwatsuka::parse_config(gauge_f.config_path);
      cfg.workflow = iwatsuka::Workflow::GaugeDebug;
      if (!gauge_f.builtin.empty()) cfg.builtin = gauge_f.builtin;
      if (gx_min) cfg.gauge_debug.x_min = *gx_min;
      if (gx_max) cfg.gauge_debug.x_max = *gx_max;
      if (gcount) cfg.gauge_debug.count = *gcount;
      if (gbase) cfg.gauge_debug.base_point = *gbase;
      if (!gauge_f.out_dir.empty()) cfg.out_dir = gauge_f.out_dir;
      return iwatsuka::run(cfg);
    }
  } catch (const iwatsuka::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
