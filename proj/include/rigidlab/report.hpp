#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rigidlab/covering.hpp"
#include "rigidlab/hodge.hpp"

namespace rigidlab {

enum class Theorem { rigidity, korn };
const char* to_string(Theorem t);

/// Both sides of the rigidity (or Korn) inequality with s = n/(n-1):
///   lhs = ||beta - R||_s,  rhs_elastic = ||dist(beta, SO(n))||_s  (or ||beta + beta^T||_s),
///   rhs_incompat = |Curl beta|(Omega),  ratio = lhs / (rhs_elastic + rhs_incompat).
struct InequalityReport {
  Theorem theorem = Theorem::rigidity;
  int n = 0;
  Index3 cells{0, 0, 0};
  double spacing = 0.0;
  double exponent = 0.0;
  double lhs = 0.0;
  double rhs_elastic = 0.0;
  double rhs_incompat = 0.0;
  double ratio = 0.0;
  Mat fitted;
  bool ambiguous = false;
  /// max |curl beta - rasterized m| h / max |beta| on domain edges (staggered fields).
  double consistency = 0.0;
  std::string provenance;
};

struct ReportOptions {
  bool check_consistency = true;
  double consistency_tolerance = 1e-8;
  /// Drop the incompatibility term (classical inequality).
  bool include_incompat = true;
  /// Override the exponent (defaults to n/(n-1)).
  std::optional<double> exponent;
};

InequalityReport rigidity_report(const TensorField& beta, const IncompatibilityMeasure& m,
                                 const ReportOptions& opts = {});
InequalityReport korn_report(const TensorField& beta, const IncompatibilityMeasure& m, const ReportOptions& opts = {});

/// Report with a prescribed rotation (rigidity) or antisymmetric matrix (Korn).
InequalityReport report_with(Theorem t, const TensorField& beta, const IncompatibilityMeasure& m, const Mat& fitted,
                             const ReportOptions& opts = {});

/// Measured discrepancy between the discrete curl of beta and the rasterized measure.
double consistency_discrepancy(const TensorField& beta, const IncompatibilityMeasure& m);

struct CubeDiagnostic {
  int cube = 0;
  Mat rotation;
  double local_lhs = 0.0;
};

struct PipelineResult {
  InequalityReport constructive;
  InequalityReport direct;
  std::optional<HodgeSplit> hodge;
  std::vector<CubeDiagnostic> cubes;
  /// Largest violation of the overlap comparison
  /// int_{Qj cap Qk} |Rj - Rk|^s <= 2^{s-1} (int |beta - Rj|^s + int |beta - Rk|^s), relative.
  double overlap_violation = 0.0;
  double poincare_ratio = 0.0;
  double glue_identity_residual = 0.0;
  Mat poincare_mean;
};

/// Constructive rotation from the proof. Cubes: Hodge split and rotation fit on Du.
/// Masks: Whitney cover, per-cube fits, gluing, weighted Poincare mean, projection.
PipelineResult theorem1_pipeline(const TensorField& beta, const IncompatibilityMeasure& m,
                                 const ReportOptions& opts = {});

struct ConstantEstimate {
  double max_ratio = 0.0;
  int argmax = -1;
  std::vector<InequalityReport> table;
};

/// Empirical lower bound for C: the largest ratio over the reports.
ConstantEstimate estimate_constant(std::vector<InequalityReport> reports);

}  // namespace rigidlab
