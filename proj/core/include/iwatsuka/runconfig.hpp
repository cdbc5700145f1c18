#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "iwatsuka/fiber.hpp"
#include "iwatsuka/layer.hpp"
#include "iwatsuka/profiles.hpp"

namespace iwatsuka {

enum class Workflow { Bands, ACCheck, Comparison, Layer, GaugeDebug };

std::string_view to_string(Workflow w);

struct XiGridSpec {
  double min = -40.0;
  double max = 40.0;
  int count = 161;
};

struct ComparisonConfig {
  double omega = 1.0;
  double omega_tilde = 0.5;
  double x0 = 0.0;
  std::vector<double> alphas{2.0, 4.0, 8.0, 16.0};
};

struct SandwichConfig {
  double xi = 0.0;
  double eps = 0.1;
  int k = 2;
};

struct LayerConfig {
  CurveSpec curve = LineCurve{};
  double b0 = 1.0;
  bool run_bands = true;
};

struct GaugeDebugConfig {
  double x_min = -10.0;
  double x_max = 10.0;
  int count = 201;
  double base_point = 0.0;
};

struct RunConfig {
  Workflow workflow = Workflow::Bands;
  // Either a catalog name or explicit profiles (field required, potential
  // defaults to zero); the layer workflow uses `layer` instead.
  std::optional<std::string> builtin;
  std::optional<ProfileSpec> field;
  std::optional<ProfileSpec> potential;
  XiGridSpec xi;
  int k = 3;
  SolverOptions solver;
  double tail_tol = 5e-2;
  double osc_tol = 1e-3;
  ComparisonConfig comparison;
  std::optional<SandwichConfig> sandwich;
  std::optional<LayerConfig> layer;
  GaugeDebugConfig gauge_debug;
  std::filesystem::path out_dir;  // empty = no file outputs (stdout only)
  bool plot = false;
};

// JSON run configuration with a versioned "schema" field; unknown keys are
// rejected with a message naming the key. Throws ConfigError.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(const std::string& text);

}  // namespace iwatsuka
