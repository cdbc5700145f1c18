#include "iwatsuka/runconfig.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "iwatsuka/common.hpp"

namespace iwatsuka {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      std::string msg = where + ": unknown key \"" + key + "\"; allowed keys:";
      for (const auto& k : allowed) msg += " " + k;
      throw ConfigError(msg);
    }
  }
}

double get_number(const json& j, const std::string& where,
                  const std::string& key) {
  if (!j.contains(key))
    throw ConfigError(where + ": missing required key \"" + key + "\"");
  if (!j[key].is_number())
    throw ConfigError(where + ": key \"" + key + "\" must be a number");
  return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& where,
                     const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number())
    throw ConfigError(where + ": key \"" + key + "\" must be a number");
  return j[key].get<double>();
}

int get_int_or(const json& j, const std::string& where, const std::string& key,
               int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer())
    throw ConfigError(where + ": key \"" + key + "\" must be an integer");
  return j[key].get<int>();
}

std::vector<double> get_array(const json& j, const std::string& where,
                              const std::string& key) {
  if (!j.contains(key) || !j[key].is_array())
    throw ConfigError(where + ": key \"" + key + "\" must be an array");
  std::vector<double> v;
  for (const auto& e : j[key]) {
    if (!e.is_number())
      throw ConfigError(where + ": array \"" + key +
                        "\" must contain only numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

std::vector<std::pair<double, double>> read_two_column_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (ss >> a >> b) rows.emplace_back(a, b);
  }
  if (rows.size() < 2)
    throw ConfigError("CSV file " + path.string() +
                      " must contain at least two numeric rows");
  return rows;
}

ProfileSpec parse_profile(const json& j, const std::string& where) {
  static const char* kKinds =
      "constant, step, tanh_step, bump, piecewise_constant, tabulated";
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError(where + ": profile must be an object with a \"kind\" "
                              "field; allowed kinds: " + std::string(kKinds));
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "constant") {
      require_keys(j, where, {"kind", "value"});
      ProfileSpec p = ConstantProfile{get_number(j, where, "value")};
      validate_profile(p);
      return p;
    }
    if (kind == "step") {
      require_keys(j, where, {"kind", "left", "right", "x_jump"});
      ProfileSpec p = StepProfile{get_number(j, where, "left"),
                                  get_number(j, where, "right"),
                                  get_number_or(j, where, "x_jump", 0.0)};
      validate_profile(p);
      return p;
    }
    if (kind == "tanh_step") {
      require_keys(j, where, {"kind", "left", "right", "center", "width"});
      ProfileSpec p = TanhStepProfile{get_number(j, where, "left"),
                                      get_number(j, where, "right"),
                                      get_number_or(j, where, "center", 0.0),
                                      get_number_or(j, where, "width", 1.0)};
      validate_profile(p);
      return p;
    }
    if (kind == "bump") {
      require_keys(j, where, {"kind", "base", "amplitude", "support_left",
                              "support_right", "exponent"});
      ProfileSpec p = BumpProfile{get_number(j, where, "base"),
                                  get_number(j, where, "amplitude"),
                                  get_number(j, where, "support_left"),
                                  get_number(j, where, "support_right"),
                                  get_int_or(j, where, "exponent", 1)};
      validate_profile(p);
      return p;
    }
    if (kind == "piecewise_constant") {
      require_keys(j, where, {"kind", "breakpoints", "values"});
      ProfileSpec p = PiecewiseConstantProfile{
          get_array(j, where, "breakpoints"), get_array(j, where, "values")};
      validate_profile(p);
      return p;
    }
    if (kind == "tabulated") {
      require_keys(j, where, {"kind", "x_samples", "y_samples", "csv",
                              "left_tail", "right_tail"});
      if (j.contains("csv") &&
          (j.contains("x_samples") || j.contains("y_samples")))
        throw ConfigError(where +
                          ": give either inline x_samples/y_samples or a "
                          "\"csv\" path, not both");
      TabulatedProfile t;
      if (j.contains("csv")) {
        if (!j["csv"].is_string())
          throw ConfigError(where + ": \"csv\" must be a file path string");
        for (const auto& [x, y] :
             read_two_column_csv(j["csv"].get<std::string>())) {
          t.x.push_back(x);
          t.y.push_back(y);
        }
      } else {
        t.x = get_array(j, where, "x_samples");
        t.y = get_array(j, where, "y_samples");
      }
      t.left_tail = get_number(j, where, "left_tail");
      t.right_tail = get_number(j, where, "right_tail");
      ProfileSpec p = t;
      validate_profile(p);
      return p;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown profile kind \"" + kind +
                    "\"; allowed kinds: " + std::string(kKinds));
}

CurveSpec parse_curve(const json& j, const std::string& where) {
  static const char* kBuiltins = "line, circular_bend, smooth_bend, racetrack";
  const double deg = std::numbers::pi / 180.0;
  try {
    if (j.contains("builtin")) {
      const std::string name = j["builtin"].get<std::string>();
      if (name == "line") {
        require_keys(j, where, {"builtin", "angle_deg", "range", "spacing"});
        LineCurve c;
        c.angle = get_number_or(j, where, "angle_deg", 0.0) * deg;
        c.range = get_number_or(j, where, "range", c.range);
        c.spacing = get_number_or(j, where, "spacing", c.spacing);
        return c;
      }
      if (name == "circular_bend") {
        require_keys(j, where, {"builtin", "radius", "angle_in_deg",
                                "angle_out_deg", "lead", "spacing"});
        CircularBendCurve c;
        c.radius = get_number(j, where, "radius");
        c.angle_in = get_number_or(j, where, "angle_in_deg", 0.0) * deg;
        c.angle_out = get_number(j, where, "angle_out_deg") * deg;
        c.lead = get_number_or(j, where, "lead", c.lead);
        c.spacing = get_number_or(j, where, "spacing", c.spacing);
        return c;
      }
      if (name == "smooth_bend") {
        require_keys(j, where, {"builtin", "angle_in_deg", "dtheta_deg",
                                "scale", "lead", "spacing"});
        SmoothBendCurve c;
        c.angle_in = get_number_or(j, where, "angle_in_deg", 0.0) * deg;
        c.dtheta = get_number(j, where, "dtheta_deg") * deg;
        c.scale = get_number_or(j, where, "scale", c.scale);
        c.lead = get_number_or(j, where, "lead", c.lead);
        c.spacing = get_number_or(j, where, "spacing", c.spacing);
        return c;
      }
      if (name == "racetrack") {
        require_keys(j, where, {"builtin", "radius", "dtheta_deg", "lead",
                                "middle", "spacing"});
        RacetrackCurve c;
        c.radius = get_number(j, where, "radius");
        c.dtheta = get_number(j, where, "dtheta_deg") * deg;
        c.lead = get_number_or(j, where, "lead", c.lead);
        c.middle = get_number_or(j, where, "middle", c.middle);
        c.spacing = get_number_or(j, where, "spacing", c.spacing);
        return c;
      }
      throw ConfigError(where + ": unknown builtin curve \"" + name +
                        "\"; allowed: " + std::string(kBuiltins));
    }
    if (j.contains("csv")) {
      require_keys(j, where, {"csv"});
      std::ifstream in(j["csv"].get<std::string>());
      if (!in)
        throw ConfigError(where + ": cannot open curve CSV " +
                          j["csv"].get<std::string>());
      CurveSamples c;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 's') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double s, x, z;
        if (ss >> s >> x >> z) {
          c.s.push_back(s);
          c.x.push_back(x);
          c.z.push_back(z);
        }
      }
      return c;
    }
    if (j.contains("s")) {
      require_keys(j, where, {"s", "x", "z"});
      return CurveSamples{get_array(j, where, "s"), get_array(j, where, "x"),
                          get_array(j, where, "z")};
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where +
                    ": curve must specify \"builtin\" (one of: " +
                    std::string(kBuiltins) +
                    "), a \"csv\" path, or inline \"s\"/\"x\"/\"z\" arrays");
}

}  // namespace

std::string_view to_string(Workflow w) {
  switch (w) {
    case Workflow::Bands: return "bands";
    case Workflow::ACCheck: return "accheck";
    case Workflow::Comparison: return "comparison";
    case Workflow::Layer: return "layer";
    case Workflow::GaugeDebug: return "gauge-debug";
  }
  return "bands";
}

RunConfig parse_config_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  require_keys(j, "config",
               {"schema", "workflow", "profiles", "xi", "k", "solver",
                "tail_tol", "osc_tol", "comparison", "sandwich", "layer",
                "gauge_debug", "output"});
  if (get_int_or(j, "config", "schema", -1) != 1)
    throw ConfigError("config: missing or unsupported \"schema\" (expected 1)");

  RunConfig cfg;
  if (!j.contains("workflow") || !j["workflow"].is_string())
    throw ConfigError("config: missing \"workflow\" string");
  const std::string wf = j["workflow"].get<std::string>();
  if (wf == "bands") cfg.workflow = Workflow::Bands;
  else if (wf == "accheck") cfg.workflow = Workflow::ACCheck;
  else if (wf == "comparison") cfg.workflow = Workflow::Comparison;
  else if (wf == "layer") cfg.workflow = Workflow::Layer;
  else if (wf == "gauge-debug") cfg.workflow = Workflow::GaugeDebug;
  else
    throw ConfigError("config: unknown workflow \"" + wf +
                      "\"; allowed: bands, accheck, comparison, layer, "
                      "gauge-debug");

  if (j.contains("profiles")) {
    const json& p = j["profiles"];
    require_keys(p, "profiles", {"builtin", "b", "w"});
    if (p.contains("builtin")) {
      cfg.builtin = p["builtin"].get<std::string>();
      if (!find_catalog_entry(*cfg.builtin)) {
        std::string msg = "profiles: unknown builtin \"" + *cfg.builtin +
                          "\"; available:";
        for (const auto& e : builtin_catalog()) msg += " " + e.name;
        throw ConfigError(msg);
      }
    }
    if (p.contains("b")) cfg.field = parse_profile(p["b"], "profiles.b");
    if (p.contains("w")) cfg.potential = parse_profile(p["w"], "profiles.w");
    if (!cfg.builtin && !cfg.field)
      throw ConfigError("profiles: need \"builtin\" or an explicit \"b\"");
  }

  if (j.contains("xi")) {
    const json& x = j["xi"];
    require_keys(x, "xi", {"min", "max", "count"});
    cfg.xi.min = get_number_or(x, "xi", "min", cfg.xi.min);
    cfg.xi.max = get_number_or(x, "xi", "max", cfg.xi.max);
    cfg.xi.count = get_int_or(x, "xi", "count", cfg.xi.count);
    if (cfg.xi.count < 1) throw ConfigError("xi: count must be >= 1");
    if (cfg.xi.count > 1 && !(cfg.xi.min < cfg.xi.max))
      throw ConfigError("xi: need min < max");
  }

  cfg.k = get_int_or(j, "config", "k", cfg.k);
  if (cfg.k < 1) throw ConfigError("config: k must be >= 1");

  if (j.contains("solver")) {
    const json& s = j["solver"];
    require_keys(s, "solver",
                 {"h_max", "margin", "box", "eigen_tol", "box_tol",
                  "gap_tol_scale", "scan_cap", "threads"});
    cfg.solver.h_max = get_number_or(s, "solver", "h_max", cfg.solver.h_max);
    cfg.solver.margin = get_number_or(s, "solver", "margin", cfg.solver.margin);
    cfg.solver.eigen_tol =
        get_number_or(s, "solver", "eigen_tol", cfg.solver.eigen_tol);
    cfg.solver.box_tol = get_number_or(s, "solver", "box_tol", cfg.solver.box_tol);
    cfg.solver.gap_tol_scale =
        get_number_or(s, "solver", "gap_tol_scale", cfg.solver.gap_tol_scale);
    cfg.solver.scan_cap =
        get_number_or(s, "solver", "scan_cap", cfg.solver.scan_cap);
    cfg.solver.threads = get_int_or(s, "solver", "threads", cfg.solver.threads);
    if (cfg.solver.h_max < 0.0 || cfg.solver.eigen_tol < 0.0 ||
        cfg.solver.box_tol <= 0.0 || cfg.solver.gap_tol_scale <= 0.0)
      throw ConfigError("solver: tolerances must be positive");
    if (cfg.solver.threads < 1)
      throw ConfigError("solver: threads must be >= 1");
    if (s.contains("box")) {
      const auto box = get_array(s, "solver", "box");
      if (box.size() != 2 || !(box[0] < box[1]))
        throw ConfigError("solver: box must be [left, right] with left < right");
      cfg.solver.box = Interval{box[0], box[1]};
    }
  }
  cfg.tail_tol = get_number_or(j, "config", "tail_tol", cfg.tail_tol);
  cfg.osc_tol = get_number_or(j, "config", "osc_tol", cfg.osc_tol);
  if (cfg.tail_tol <= 0.0 || cfg.osc_tol <= 0.0)
    throw ConfigError("config: tail_tol and osc_tol must be positive");

  if (j.contains("comparison")) {
    const json& c = j["comparison"];
    require_keys(c, "comparison", {"omega", "omega_tilde", "x0", "alphas"});
    cfg.comparison.omega =
        get_number_or(c, "comparison", "omega", cfg.comparison.omega);
    cfg.comparison.omega_tilde = get_number_or(c, "comparison", "omega_tilde",
                                               cfg.comparison.omega_tilde);
    cfg.comparison.x0 = get_number_or(c, "comparison", "x0", cfg.comparison.x0);
    if (c.contains("alphas"))
      cfg.comparison.alphas = get_array(c, "comparison", "alphas");
    if (!(cfg.comparison.omega > 0.0) || !(cfg.comparison.omega_tilde > 0.0))
      throw ConfigError("comparison: omega and omega_tilde must be > 0");
  }

  if (j.contains("sandwich")) {
    const json& s = j["sandwich"];
    require_keys(s, "sandwich", {"xi", "eps", "k"});
    SandwichConfig sc;
    sc.xi = get_number(s, "sandwich", "xi");
    sc.eps = get_number_or(s, "sandwich", "eps", sc.eps);
    sc.k = get_int_or(s, "sandwich", "k", sc.k);
    if (!(sc.eps > 0.0)) throw ConfigError("sandwich: eps must be > 0");
    if (sc.k < 1) throw ConfigError("sandwich: k must be >= 1");
    cfg.sandwich = sc;
  }

  if (j.contains("layer")) {
    const json& l = j["layer"];
    require_keys(l, "layer", {"curve", "b0", "run_bands"});
    LayerConfig lc;
    if (!l.contains("curve"))
      throw ConfigError("layer: missing \"curve\"");
    lc.curve = parse_curve(l["curve"], "layer.curve");
    lc.b0 = get_number_or(l, "layer", "b0", lc.b0);
    if (!(lc.b0 > 0.0)) throw ConfigError("layer: b0 must be > 0");
    if (l.contains("run_bands")) {
      if (!l["run_bands"].is_boolean())
        throw ConfigError("layer: run_bands must be a boolean");
      lc.run_bands = l["run_bands"].get<bool>();
    }
    cfg.layer = lc;
  } else if (cfg.workflow == Workflow::Layer) {
    throw ConfigError("layer workflow requires a \"layer\" section");
  }

  if (j.contains("gauge_debug")) {
    const json& g = j["gauge_debug"];
    require_keys(g, "gauge_debug", {"x_min", "x_max", "count", "base_point"});
    cfg.gauge_debug.x_min =
        get_number_or(g, "gauge_debug", "x_min", cfg.gauge_debug.x_min);
    cfg.gauge_debug.x_max =
        get_number_or(g, "gauge_debug", "x_max", cfg.gauge_debug.x_max);
    cfg.gauge_debug.count =
        get_int_or(g, "gauge_debug", "count", cfg.gauge_debug.count);
    cfg.gauge_debug.base_point = get_number_or(g, "gauge_debug", "base_point",
                                               cfg.gauge_debug.base_point);
    if (cfg.gauge_debug.count < 2 ||
        !(cfg.gauge_debug.x_min < cfg.gauge_debug.x_max))
      throw ConfigError("gauge_debug: need x_min < x_max and count >= 2");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    require_keys(o, "output", {"dir", "plot"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string())
        throw ConfigError("output: dir must be a string");
      cfg.out_dir = o["dir"].get<std::string>();
    }
    if (o.contains("plot")) {
      if (!o["plot"].is_boolean())
        throw ConfigError("output: plot must be a boolean");
      cfg.plot = o["plot"].get<bool>();
    }
  }

  const bool needs_profiles = cfg.workflow == Workflow::Bands ||
                              cfg.workflow == Workflow::ACCheck ||
                              cfg.workflow == Workflow::GaugeDebug;
  if (needs_profiles && !cfg.builtin && !cfg.field)
    throw ConfigError(std::string(to_string(cfg.workflow)) +
                      " workflow requires a \"profiles\" section");
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

}  // namespace iwatsuka
