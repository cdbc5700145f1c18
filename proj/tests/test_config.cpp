#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "iwatsuka/runconfig.hpp"
#include "iwatsuka/workflows.hpp"

using namespace iwatsuka;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("iwk_cfg_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal bands config fills the documented defaults") {
  const RunConfig cfg = parse_config_string(
      R"({"schema":1,"workflow":"bands","profiles":{"builtin":"iwatsuka-step"}})");
  CHECK(cfg.workflow == Workflow::Bands);
  CHECK(cfg.k == 3);
  CHECK(cfg.xi.min == -40.0);
  CHECK(cfg.xi.max == 40.0);
  CHECK(cfg.xi.count == 161);
  REQUIRE(cfg.builtin.has_value());
  CHECK(*cfg.builtin == "iwatsuka-step");
}

TEST_CASE("schema violations are rejected with the offending key") {
  CHECK_THROWS_WITH_AS(
      parse_config_string(
          R"({"schema":1,"workflow":"bands","profiles":{"builtin":"landau"},"xi":{"min":0,"max":1,"count":0}})"),
      doctest::Contains("count"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_string(
          R"({"schema":1,"workflow":"bands","profiles":{"builtin":"landau"},"frobnicate":1})"),
      doctest::Contains("frobnicate"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_string(
          R"({"schema":1,"workflow":"bands","profiles":{"b":{"kind":"pentagon"}}})"),
      doctest::Contains("constant, step, tanh_step"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_string(R"({"workflow":"bands"})"),
                       doctest::Contains("schema"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("not json at all"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_string(
          R"({"schema":1,"workflow":"bands","profiles":{"builtin":"nope"}})"),
      doctest::Contains("landau"), ConfigError);
}

TEST_CASE("explicit profiles parse into their variants") {
  const RunConfig cfg = parse_config_string(R"({
    "schema": 1,
    "workflow": "bands",
    "profiles": {
      "b": {"kind": "step", "left": 1.0, "right": 2.0, "x_jump": 0.0},
      "w": {"kind": "constant", "value": -0.25}
    },
    "xi": {"min": -10, "max": 10, "count": 11},
    "k": 2
  })");
  REQUIRE(cfg.field.has_value());
  CHECK(std::get<StepProfile>(*cfg.field).right == 2.0);
  REQUIRE(cfg.potential.has_value());
  CHECK(std::get<ConstantProfile>(*cfg.potential).value == -0.25);
}

TEST_CASE("tabulated profile can reference an external two-column CSV") {
  TempDir tmp;
  const fs::path csv = tmp.path / "field.csv";
  {
    std::ofstream f(csv);
    f << "# x,b\n-1.0,1.0\n0.0,1.5\n1.0,2.0\n";
  }
  std::ostringstream cfg_text;
  cfg_text << R"({"schema":1,"workflow":"accheck","profiles":{"b":{"kind":"tabulated","csv":")"
           << csv.string() << R"(","left_tail":1.0,"right_tail":2.0}}})";
  const RunConfig cfg = parse_config_string(cfg_text.str());
  REQUIRE(cfg.field.has_value());
  const auto& t = std::get<TabulatedProfile>(*cfg.field);
  CHECK(t.x.size() == 3);
  CHECK(t.y[1] == 1.5);
  CHECK(t.left_tail == 1.0);
}

TEST_CASE("tabulated profile rejects mixing inline samples with a csv") {
  CHECK_THROWS_WITH_AS(
      parse_config_string(
          R"({"schema":1,"workflow":"accheck","profiles":{"b":{"kind":"tabulated",
              "csv":"x.csv","x_samples":[0,1],"y_samples":[1,2],
              "left_tail":1,"right_tail":2}}})"),
      doctest::Contains("not both"), ConfigError);
}

TEST_CASE("verdicts from sampled tail bounds are flagged heuristic") {
  RunConfig cfg = parse_config_string(
      R"({"schema":1,"workflow":"accheck","profiles":{"b":{"kind":"tabulated",
          "x_samples":[-1.0,0.0,1.0],"y_samples":[1.0,1.5,2.0],
          "left_tail":1.0,"right_tail":2.0}}})");
  std::ostringstream out, err;
  REQUIRE(run(cfg, out, err) == 0);
  CHECK(out.str().find("\"heuristic\":true") != std::string::npos);
  CHECK(out.str().find("\"verdict\":true") != std::string::npos);
}

TEST_CASE("missing config file maps to a config error") {
  CHECK_THROWS_AS(parse_config("/definitely/not/a/file.json"), ConfigError);
}

TEST_CASE("accheck workflow prints the verdict JSON on stdout") {
  RunConfig cfg = parse_config_string(
      R"({"schema":1,"workflow":"accheck","profiles":{"builtin":"iwatsuka-step"}})");
  std::ostringstream out, err;
  const int code = run(cfg, out, err);
  CHECK(code == 0);
  CHECK(out.str().find("\"verdict\":true") != std::string::npos);
  CHECK(out.str().find("cond_1_3") != std::string::npos);
}

TEST_CASE("bands workflow writes deterministic artifacts") {
  TempDir tmp;
  std::ostringstream cfg_text;
  cfg_text << R"({"schema":1,"workflow":"bands",
    "profiles":{"builtin":"landau"},
    "xi":{"min":-3,"max":3,"count":3},"k":2,
    "output":{"dir":")"
           << (tmp.path / "out").string() << R"(","plot":true}})";
  RunConfig cfg = parse_config_string(cfg_text.str());

  std::ostringstream out1, err1;
  REQUIRE(run(cfg, out1, err1) == 0);
  const std::string csv1 = slurp(tmp.path / "out" / "bands.csv");
  const std::string meta1 = slurp(tmp.path / "out" / "meta.json");
  const std::string plot1 = slurp(tmp.path / "out" / "bands.gp");

  std::ostringstream out2, err2;
  REQUIRE(run(cfg, out2, err2) == 0);
  CHECK(slurp(tmp.path / "out" / "bands.csv") == csv1);
  CHECK(slurp(tmp.path / "out" / "meta.json") == meta1);
  CHECK(slurp(tmp.path / "out" / "bands.gp") == plot1);

  CHECK(csv1.rfind("xi,lambda_1,lambda_2", 0) == 0);
  CHECK(plot1.find("bands.csv") != std::string::npos);
  CHECK(plot1.find("dashtype 2") != std::string::npos);  // tail guide lines
  CHECK(out1.str() == out2.str());
}

TEST_CASE("bands workflow can attach a sandwich witness to the run") {
  TempDir tmp;
  std::ostringstream cfg_text;
  cfg_text << R"({"schema":1,"workflow":"bands",
    "profiles":{"builtin":"iwatsuka-step"},
    "xi":{"min":-40,"max":40,"count":5},"k":2,
    "sandwich":{"xi":-40.0,"eps":0.1,"k":2},
    "output":{"dir":")"
           << (tmp.path / "out").string() << R"("}})";
  RunConfig cfg = parse_config_string(cfg_text.str());
  std::ostringstream out, err;
  REQUIRE(run(cfg, out, err) == 0);
  const std::string meta = slurp(tmp.path / "out" / "meta.json");
  CHECK(meta.find("\"sandwich\"") != std::string::npos);
  CHECK(meta.find("\"ok\": true") != std::string::npos);
}

TEST_CASE("numerical failures exit with code 1") {
  RunConfig cfg = parse_config_string(
      R"({"schema":1,"workflow":"bands",
          "profiles":{"b":{"kind":"constant","value":0.0}},
          "xi":{"min":-1,"max":1,"count":3},"k":1,
          "solver":{"scan_cap":64}})");
  std::ostringstream out, err;
  CHECK(run(cfg, out, err) == 1);
  CHECK(err.str().find("confining") != std::string::npos);
}

TEST_CASE("comparison workflow writes the study CSV") {
  TempDir tmp;
  std::ostringstream cfg_text;
  cfg_text << R"({"schema":1,"workflow":"comparison",
    "comparison":{"omega":1.0,"omega_tilde":0.5,"x0":0.0,"alphas":[2,4,8]},
    "k":2,"output":{"dir":")"
           << (tmp.path / "out").string() << R"("}})";
  RunConfig cfg = parse_config_string(cfg_text.str());
  std::ostringstream out, err;
  REQUIRE(run(cfg, out, err) == 0);
  const std::string csv = slurp(tmp.path / "out" / "comparison.csv");
  CHECK(csv.rfind("alpha,sigma_1,sigma_2,err_1,err_2", 0) == 0);
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 4);  // header + 3 alphas
}

TEST_CASE("layer workflow emits the effective-profile CSV and the verdict") {
  TempDir tmp;
  std::ostringstream cfg_text;
  cfg_text << R"({"schema":1,"workflow":"layer",
    "layer":{"curve":{"builtin":"circular_bend","radius":2.0,
             "angle_in_deg":0,"angle_out_deg":60,"lead":5.0,"spacing":0.01},
             "b0":1.0,"run_bands":false},
    "output":{"dir":")"
           << (tmp.path / "out").string() << R"("}})";
  RunConfig cfg = parse_config_string(cfg_text.str());
  std::ostringstream out, err;
  REQUIRE(run(cfg, out, err) == 0);
  CHECK(out.str().find("layer AC verdict: true") != std::string::npos);
  const std::string csv = slurp(tmp.path / "out" / "effective_profile.csv");
  CHECK(csv.rfind("s,b_eff,w_eff,kappa", 0) == 0);
  const std::string meta = slurp(tmp.path / "out" / "meta.json");
  CHECK(meta.find("curvature_gap") != std::string::npos);
}

TEST_CASE("layer workflow requires a layer section") {
  CHECK_THROWS_WITH_AS(parse_config_string(R"({"schema":1,"workflow":"layer"})"),
                       doctest::Contains("layer"), ConfigError);
}

TEST_CASE("gauge-debug workflow prints x, B, A_y columns") {
  RunConfig cfg = parse_config_string(
      R"({"schema":1,"workflow":"gauge-debug",
          "profiles":{"builtin":"iwatsuka-step"},
          "gauge_debug":{"x_min":-2.0,"x_max":3.0,"count":6}})");
  std::ostringstream out, err;
  REQUIRE(run(cfg, out, err) == 0);
  CHECK(out.str().rfind("x,b,a_y", 0) == 0);
  CHECK(out.str().find("\n3,2,6\n") != std::string::npos);
}

TEST_CASE("plot emission requires its inputs") {
  TempDir tmp;
  CHECK_THROWS_AS(emit_plot_script(tmp.path / "missing.csv",
                                   tmp.path / "missing.json",
                                   tmp.path / "plot.gp"),
                  ConfigError);
}
