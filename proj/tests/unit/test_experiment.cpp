#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rigidlab/errors.hpp"
#include "rigidlab/experiment.hpp"

using namespace rigidlab;

namespace {

ParseError parse_failure(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("config parsed without error");
  return ParseError("", 0, "");
}

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("rigidlab-test-" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* rotation_config = R"({
  "suites": ["rigidity"],
  "resolutions": [8, 16],
  "cases": [{"id": "rot", "kind": "rotation", "dim": 2, "domain": "square", "rotation": [0.4, 0, 0]},
            {"id": "rot3", "kind": "rotation", "dim": 3, "domain": "cube", "rotation": [0.1, -0.2, 0.3]}]
})";

const char* skew_config = R"({
  "suites": ["korn"],
  "resolutions": [8, 16],
  "cases": [{"id": "skew", "kind": "rotation", "dim": 3, "domain": "cube", "rotation": [0.1, -0.2, 0.3],
             "linear": true}]
})";

}  // namespace

TEST_CASE("config parsing accepts a complete config") {
  const ExperimentConfig cfg = parse_config(R"({
    "suites": ["hodge", "whitney", "refine"],
    "resolutions": [8, 16, 32],
    "cases": [{"kind": "screw-dislocation-3d", "burgers": [1, 0, 0]}],
    "domains": ["square", "ball"],
    "whitney_dim": 3,
    "tolerances": {"solver": 1e-9, "check": 1e-7},
    "output_dir": "out",
    "refine": {"metric": "korn_ratio", "log_fit": true}
  })");
  CHECK(cfg.suites.size() == 3);
  CHECK(cfg.resolutions == std::vector<int>{8, 16, 32});
  REQUIRE(cfg.cases.size() == 1);
  CHECK(cfg.cases[0].id == "case-0");
  CHECK(cfg.cases[0].kind == CaseKind::screw_dislocation_3d);
  CHECK(cfg.domains == std::vector<std::string>{"square", "ball"});
  CHECK(cfg.whitney_dim == 3);
  CHECK(cfg.solver_tolerance == 1e-9);
  CHECK(cfg.check_tolerance == 1e-7);
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.refine_metric == "korn_ratio");
  CHECK(cfg.refine_log_fit);
}

TEST_CASE("decreasing resolutions report their line and field") {
  const ParseError e = parse_failure("{\n  \"suites\": [\"whitney\"],\n  \"resolutions\": [64, 32]\n}");
  CHECK(e.line() == 3);
  CHECK(e.field() == "resolutions[1]");
}

TEST_CASE("config errors carry field paths") {
  CHECK(parse_failure(R"({"resolutions": [8]})").field() == "suites");
  CHECK(parse_failure(R"({"suites": ["bogus"], "resolutions": [8]})").field() == "suites[0]");
  CHECK(parse_failure(R"({"suites": ["rigidity"], "resolutions": [8]})").field() == "cases");
  CHECK(parse_failure(R"({"suites": ["whitney"], "resolutions": [2]})").field() == "resolutions[0]");
  CHECK(parse_failure(R"({"suites": ["whitney"], "resolutions": [8], "domains": ["torus"]})").field() ==
        "domains[0]");
  CHECK(parse_failure(R"({"suites": ["whitney"], "resolutions": [8], "tolerances": {"check": -1}})").field() ==
        "tolerances.check");
  CHECK(parse_failure(R"({"suites": ["whitney"], "resolutions": [8], "refine": {"metric": "x"}})").field() ==
        "refine.metric");
  CHECK(parse_failure(R"({"suites": ["refine"], "resolutions": [8, 16], "cases": [{}]})").field() == "resolutions");
  const ParseError kind = parse_failure("{\"suites\": [\"korn\"], \"resolutions\": [8],\n\"cases\": [{}, {\"kind\": \"x\"}]}");
  CHECK(kind.field() == "cases[1].kind");
  CHECK(kind.line() == 2);
  const ParseError syntax = parse_failure("{\n\"suites\": [\n}");
  CHECK(syntax.line() == 3);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InputError);
}

TEST_CASE("constant rotations yield zero left-hand sides and exit 0") {
  RunOptions opts;
  opts.out_dir = temp_dir("rotation");
  const RunResult r = run_experiment(parse_config(rotation_config), opts);
  CHECK(r.exit_status == 0);
  CHECK(r.summary["checks"]["failed"] == 0);
  REQUIRE(r.summary["reports"].size() == 4);
  for (const auto& rep : r.summary["reports"]) CHECK(rep["lhs"].get<double>() <= 1e-13);
  CHECK(r.csv.rfind(std::string(csv_header()) + "\n", 0) == 0);
  for (const char* f : {"records.jsonl", "table.csv", "summary.json", "metadata.json"})
    CHECK(std::filesystem::exists(opts.out_dir + "/" + f));
  CHECK(slurp(opts.out_dir + "/table.csv") == r.csv);

  const RunResult k = run_experiment(parse_config(skew_config), RunOptions{"", 1, std::nullopt, false});
  CHECK(k.exit_status == 0);
  REQUIRE(k.summary["reports"].size() == 2);
  for (const auto& rep : k.summary["reports"]) CHECK(rep["lhs"].get<double>() <= 1e-13);
}

TEST_CASE("output is independent of the thread count") {
  ExperimentConfig cfg = parse_config(R"({
    "suites": ["rigidity", "hodge", "whitney"],
    "resolutions": [8, 16],
    "cases": [{"id": "mix", "kind": "mixture", "dim": 2, "domain": "square", "seed": 5, "amplitude": 0.05,
               "dislocations": 2},
              {"id": "grad", "kind": "gradient", "dim": 2, "domain": "lshape", "seed": 2, "amplitude": 0.1}]
  })");
  RunOptions one, three;
  one.write_files = three.write_files = false;
  one.threads = 1;
  three.threads = 3;
  const RunResult a = run_experiment(cfg, one);
  const RunResult b = run_experiment(cfg, three);
  CHECK(a.csv == b.csv);
  CHECK(a.records == b.records);
}

TEST_CASE("counterexample suite reports a growing ratio") {
  const RunResult r = run_experiment(parse_config(R"({"suites": ["counterexample2d"], "resolutions": [32, 64, 128]})"),
                                     RunOptions{"", 1, std::nullopt, false});
  CHECK(r.exit_status == 0);
  const auto& ce = r.summary["counterexample2d"];
  CHECK(ce["strictly_increasing"].get<bool>());
  const auto ratios = ce["ratios"].get<std::vector<double>>();
  REQUIRE(ratios.size() == 3);
  CHECK(ratios[0] < ratios[1]);
  CHECK(ratios[1] < ratios[2]);
  CHECK(ce["log_fit"]["slope"].get<double>() > 0.0);
  // One CSV row per resolution.
  CHECK(std::count(r.csv.begin(), r.csv.end(), '\n') == 4);
}

TEST_CASE("failed jobs become error records and a nonzero status") {
  ExperimentConfig cfg = parse_config(R"({
    "suites": ["rigidity"], "resolutions": [8],
    "cases": [{"id": "off", "kind": "screw-dislocation-3d", "position": [2, 2, 0.5]}]
  })");
  const RunResult r = run_experiment(cfg, RunOptions{"", 1, std::nullopt, false});
  CHECK(r.exit_status == 1);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].contains("error"));
  CHECK(r.csv.find("rigidity,off,3,8,error") != std::string::npos);
}

TEST_CASE("refinement study") {
  CaseSpec rot;
  rot.dim = 2;
  rot.domain = "square";
  rot.rotation = {0.3, 0.0, 0.0};
  const RefineTable t = refine_study(rot, {8, 16, 32}, "rigidity_ratio");
  CHECK(t.values == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(t.drift_percent == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(refine_study(rot, {8, 16}, "rigidity_ratio"), InputError);
  CHECK_THROWS_AS(evaluate_metric(rot, 8, "nope"), InputError);

  CaseSpec screw;
  screw.kind = CaseKind::screw_dislocation_3d;
  screw.burgers = {1.0, 0.0, 0.0};
  screw.position = {0.5, 0.5, 0.5};
  const RefineTable s = refine_study(screw, {8, 16, 32}, "rigidity_ratio", true);
  REQUIRE(s.log_fit);
  for (std::size_t q = 0; q < 2; ++q)
    CHECK(s.drift_percent[q] == doctest::Approx(100.0 * std::abs(s.values[q + 1] - s.values[q]) / s.values[q]));
}

TEST_CASE("affine fit") {
  const AffineFit f = fit_affine({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  const AffineFit g = fit_affine({0, 1, 2}, {0, 1, 0});
  CHECK(g.slope == doctest::Approx(0.0));
  CHECK(g.r2 == doctest::Approx(0.0));
  CHECK_THROWS_AS(fit_affine({1}, {1}), InputError);
  CHECK_THROWS_AS(fit_affine({1, 1}, {0, 2}), InputError);
}

TEST_CASE("output directory falls back to RIGIDLAB_OUT") {
  const std::string dir = temp_dir("env");
  setenv("RIGIDLAB_OUT", dir.c_str(), 1);
  run_experiment(parse_config(R"({"suites": ["whitney"], "resolutions": [16], "domains": ["square"]})"), RunOptions{});
  unsetenv("RIGIDLAB_OUT");
  CHECK(std::filesystem::exists(dir + "/summary.json"));
}
