#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rigidlab/generators.hpp"
#include "rigidlab/report.hpp"

namespace rigidlab {

enum class Suite { hodge, rigidity, korn, counterexample2d, whitney, refine };
const char* to_string(Suite s);

struct ExperimentConfig {
  std::vector<Suite> suites;
  std::vector<CaseSpec> cases;
  std::vector<int> resolutions;
  std::vector<std::string> domains{"square", "lshape", "ball"};
  /// Dimension of the domains used by the whitney suite.
  int whitney_dim = 2;
  double solver_tolerance = 1e-10;
  double check_tolerance = 1e-8;
  std::string output_dir;
  std::string refine_metric = "rigidity_ratio";
  bool refine_log_fit = false;
  /// Seed of a generated corpus ("corpus": {"dim", "seed", "linear"}) if one was requested.
  std::optional<std::uint64_t> corpus_seed;
  int corpus_dim = 3;
  bool corpus_linear = false;
};

/// Parses the JSON-syntax config. Throws ParseError carrying the line and field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct RunOptions {
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  bool write_files = true;
};

struct RunResult {
  int exit_status = 0;
  std::vector<nlohmann::json> records;
  std::string csv;
  nlohmann::json summary;
};

/// Runs the selected suites. Records are merged in job order, so output is independent of
/// the thread count. Writes records.jsonl, table.csv, summary.json and metadata.json.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

/// Least-squares line y = slope x + intercept with its coefficient of determination.
struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y);

struct RefineTable {
  std::string metric;
  std::vector<int> resolutions;
  std::vector<double> values;
  /// |v_{k+1} - v_k| / |v_k| in percent.
  std::vector<double> drift_percent;
  /// Fit of value^2 against log N when requested.
  std::optional<AffineFit> log_fit;
};

/// Metric values: rigidity_ratio, korn_ratio, lemma_bb_ratio, div_curl_ratio.
double evaluate_metric(const CaseSpec& spec, int resolution, const std::string& metric);

/// Needs at least three resolutions.
RefineTable refine_study(const CaseSpec& spec, const std::vector<int>& resolutions, const std::string& metric,
                         bool log_fit = false);

/// Fixed CSV header used by table.csv.
const char* csv_header();

}  // namespace rigidlab
