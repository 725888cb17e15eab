#include "rigidlab/report.hpp"

#include <cmath>

#include "rigidlab/errors.hpp"

namespace rigidlab {

const char* to_string(Theorem t) { return t == Theorem::korn ? "korn" : "rigidity"; }

double consistency_discrepancy(const TensorField& beta, const IncompatibilityMeasure& m) {
  if (beta.placement() != Placement::staggered) return 0.0;
  const Domain& dom = beta.domain();
  const Grid& g = dom.grid();
  const int n = g.dim;
  const auto cb = curl_edges(beta);
  const auto cm = rasterize(m);
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (double v : beta(i, j).values()) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < pair_count(n); ++p) {
      const auto [j, k] = pair_axes(n, p);
      const Array3& a = cb[i * pair_count(n) + p];
      const Array3& b = cm[i * pair_count(n) + p];
      for_each_index(a.extents(), [&](int q, int r, int s) {
        const Index3 e{q, r, s};
        for (int dj = -1; dj <= 0; ++dj)
          for (int dk = -1; dk <= 0; ++dk) {
            Index3 c = e;
            c[j] += dj;
            c[k] += dk;
            if (c[j] < 0 || c[k] < 0 || c[j] >= g.cells[j] || c[k] >= g.cells[k] || !dom.inside(c)) return;
          }
        worst = std::max(worst, std::abs(a(e) - b(e)));
      });
    }
  if (scale == 0.0) {
    double mmax = 0.0;
    for (const auto& a : cm)
      for (double v : a.values()) mmax = std::max(mmax, std::abs(v));
    return mmax;
  }
  return worst * g.min_spacing() / scale;
}

namespace {

double elastic_term(Theorem t, const TensorField& beta, double s) {
  const Domain& dom = beta.domain();
  const Grid& g = dom.grid();
  std::vector<double> mags(g.num_cells(), 0.0);
  std::size_t l = 0;
  for_each_index(g.cells, [&](int i, int j, int k) {
    const std::size_t cell = l++;
    if (!dom.inside(cell)) return;
    const Mat b = beta.cell_value(i, j, k);
    mags[cell] = t == Theorem::rigidity ? dist_SO(b) : (b + b.transpose()).norm();
  });
  return lp_norm_of_magnitudes(mags, dom, NormSpec{s, false, nullptr});
}

double safe_ratio(double lhs, double rhs, double scale) {
  const double tiny = 1e-13 * std::max(scale, 1e-300);
  if (rhs <= tiny) {
    if (lhs <= tiny) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return lhs / rhs;
}

void fill_header(InequalityReport& r, Theorem t, const TensorField& beta, double s) {
  r.theorem = t;
  r.n = beta.dim();
  r.cells = beta.grid().cells;
  r.spacing = beta.grid().min_spacing();
  r.exponent = s;
}

double exponent_of(const TensorField& beta, const ReportOptions& opts) {
  return opts.exponent ? *opts.exponent : critical_exponent(beta.dim());
}

double field_scale(const TensorField& beta, double s) { return lp_norm(beta, NormSpec{s, false, nullptr}); }

void check(const TensorField& beta, const IncompatibilityMeasure& m, const ReportOptions& opts,
           InequalityReport& r) {
  if (!(beta.grid() == m.domain().grid())) throw ShapeError("measure and field live on different grids");
  if (!opts.check_consistency) return;
  r.consistency = consistency_discrepancy(beta, m);
  if (r.consistency > opts.consistency_tolerance)
    throw ConsistencyError("measure inconsistent with the field's curl: discrepancy " + std::to_string(r.consistency));
}

}  // namespace

InequalityReport report_with(Theorem t, const TensorField& beta, const IncompatibilityMeasure& m, const Mat& fitted,
                             const ReportOptions& opts) {
  beta.validate();
  InequalityReport r;
  const double s = exponent_of(beta, opts);
  fill_header(r, t, beta, s);
  check(beta, m, opts, r);
  const MatrixSamples samples = collect_samples(beta);
  r.fitted = fitted;
  r.lhs = lp_distance(samples, fitted, s);
  r.rhs_elastic = elastic_term(t, beta, s);
  r.rhs_incompat = opts.include_incompat ? total_variation(m, beta.domain()) : 0.0;
  r.ratio = safe_ratio(r.lhs, r.rhs_elastic + r.rhs_incompat, field_scale(beta, s));
  return r;
}

InequalityReport rigidity_report(const TensorField& beta, const IncompatibilityMeasure& m, const ReportOptions& opts) {
  const double s = exponent_of(beta, opts);
  const RotationFit fit = fit_rotation(beta, NormSpec{s, false, nullptr});
  InequalityReport r = report_with(Theorem::rigidity, beta, m, fit.rotation, opts);
  r.ambiguous = fit.ambiguous;
  return r;
}

InequalityReport korn_report(const TensorField& beta, const IncompatibilityMeasure& m, const ReportOptions& opts) {
  const double s = exponent_of(beta, opts);
  const Mat a = fit_antisymmetric(beta, NormSpec{s, false, nullptr});
  return report_with(Theorem::korn, beta, m, a, opts);
}

PipelineResult theorem1_pipeline(const TensorField& beta, const IncompatibilityMeasure& m, const ReportOptions& opts) {
  const double s = exponent_of(beta, opts);
  PipelineResult out;
  out.direct = rigidity_report(beta, m, opts);
  const Domain& dom = beta.domain();
  if (dom.is_cube() && beta.placement() == Placement::staggered) {
    out.hodge = hodge_split(beta);
    const RotationFit fit = fit_rotation(out.hodge->gradient_part, NormSpec{s, false, nullptr});
    out.constructive = report_with(Theorem::rigidity, beta, m, fit.rotation, opts);
    out.constructive.ambiguous = fit.ambiguous;
    return out;
  }

  const WhitneyCover cover = whitney_cover(beta.domain_ptr());
  const PartitionOfUnity pou = partition_of_unity(cover);
  std::vector<Mat> rotations;
  std::vector<MatrixSamples> local;
  for (std::size_t j = 0; j < cover.cubes.size(); ++j) {
    const CellBox box = cover.cubes[j].outer;
    local.push_back(collect_samples(beta, NormSpec{}, &box));
    const RotationFit fit = fit_rotation(local.back(), s);
    rotations.push_back(fit.rotation);
    out.cubes.push_back({static_cast<int>(j), fit.rotation, lp_distance(local.back(), fit.rotation, s)});
  }
  const double cs = std::pow(2.0, s - 1.0);
  for (std::size_t j = 0; j < cover.cubes.size(); ++j)
    for (int k : cover.cubes[j].neighbors) {
      if (k <= static_cast<int>(j)) continue;
      const auto& a = cover.cubes[j].outer;
      const auto& b = cover.cubes[k].outer;
      CellBox inter;
      for (int q = 0; q < 3; ++q) {
        inter.lo[q] = std::max(a.lo[q], b.lo[q]);
        inter.hi[q] = std::min(a.hi[q], b.hi[q]);
      }
      const MatrixSamples ov = collect_samples(beta, NormSpec{}, &inter);
      double w = 0.0;
      for (double x : ov.weights) w += x;
      const double left = w * std::pow((rotations[j] - rotations[k]).norm(), s);
      const double right = cs * (lp_objective(ov, rotations[j], s) + lp_objective(ov, rotations[k], s));
      if (left > right) out.overlap_violation = std::max(out.overlap_violation, (left - right) / std::max(right, 1e-300));
    }
  const GluedField glued = glue_rotations(cover, pou, rotations, &beta);
  out.glue_identity_residual = glued.identity_residual;
  const PoincareResult pr = weighted_poincare(glued.value, s, &glued.gradient);
  out.poincare_ratio = pr.ratio;
  out.poincare_mean = pr.mean;
  const Projection proj = project_SO(pr.mean);
  out.constructive = report_with(Theorem::rigidity, beta, m, proj.rotation, opts);
  out.constructive.ambiguous = proj.ambiguous;
  return out;
}

ConstantEstimate estimate_constant(std::vector<InequalityReport> reports) {
  if (reports.empty()) throw InputError("empty corpus");
  ConstantEstimate e;
  for (std::size_t c = 0; c < reports.size(); ++c)
    if (e.argmax < 0 || reports[c].ratio > e.max_ratio) {
      e.max_ratio = reports[c].ratio;
      e.argmax = static_cast<int>(c);
    }
  e.table = std::move(reports);
  return e;
}

}  // namespace rigidlab
