#include "rigidlab/fitting.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "rigidlab/errors.hpp"

namespace rigidlab {

MatrixSamples collect_samples(const TensorField& f, const NormSpec& spec, const CellBox* box) {
  const Domain& dom = f.domain();
  const Grid& g = dom.grid();
  if (spec.weight && spec.weight->extents() != g.cells) throw ShapeError("weight is not on the field's grid");
  MatrixSamples s;
  s.n = f.dim();
  const double vol = g.cell_volume();
  std::size_t l = 0;
  for_each_index(g.cells, [&](int i, int j, int k) {
    const std::size_t cell = l++;
    if (!dom.inside(cell)) return;
    if (box && !box->contains(i, j, k)) return;
    s.values.push_back(f.cell_value(i, j, k));
    s.weights.push_back(spec.weight ? vol * (*spec.weight)[cell] : vol);
  });
  return s;
}

Projection project_SO(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat u = svd.matrixU();
  const Mat v = svd.matrixV();
  const Vec sigma = svd.singularValues();
  const double d = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  u.col(n - 1) *= d;
  Projection p;
  p.rotation = u * v.transpose();
  const double gap = sigma(n - 2) + d * sigma(n - 1);
  p.ambiguous = gap <= 1e-12 * std::max(1.0, sigma(0));
  return p;
}

double dist_SO(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sigma = svd.singularValues();
  const double d = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double target = i == n - 1 ? d : 1.0;
    s += (sigma(i) - target) * (sigma(i) - target);
  }
  return std::sqrt(s);
}

double lp_objective(const MatrixSamples& s, const Mat& m, double p) {
  std::vector<double> terms(s.values.size());
  for (std::size_t c = 0; c < s.values.size(); ++c) {
    const double d = (s.values[c] - m).norm();
    terms[c] = s.weights[c] * (p == 2.0 ? d * d : std::pow(d, p));
  }
  return pairwise_sum(terms);
}

double lp_distance(const MatrixSamples& s, const Mat& m, double p) {
  if (!(p >= 1.0)) throw InputError("norm exponent must be >= 1");
  return std::pow(lp_objective(s, m, p), 1.0 / p);
}

namespace {

// Accumulates deviations from the first sample, so constant data give their value exactly.
Mat weighted_mean(const MatrixSamples& s) {
  if (s.values.empty()) throw InputError("no samples to fit");
  const Mat& ref = s.values.front();
  Mat m = Mat::Zero(s.n, s.n);
  double w = 0.0;
  for (std::size_t c = 0; c < s.values.size(); ++c) {
    m += s.weights[c] * (s.values[c] - ref);
    w += s.weights[c];
  }
  if (w == 0.0) throw InputError("no samples to fit");
  return ref + m / w;
}

// Minimizes sum_c w_c |A_c - M(theta)|^p for M(theta) = M0 + sum_k theta_k E_k by damped
// Newton; the objective is convex in theta for p >= 1.
Mat newton_fit(const MatrixSamples& s, double p, const Mat& m0, const std::vector<Mat>& basis) {
  const int k = static_cast<int>(basis.size());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
  auto build = [&](const Eigen::VectorXd& t) {
    Mat m = m0;
    for (int q = 0; q < k; ++q) m += t(q) * basis[q];
    return m;
  };
  double scale = 0.0;
  for (const auto& v : s.values) scale = std::max(scale, v.norm());
  scale = std::max(scale, 1.0);
  double f = lp_objective(s, m0, p);
  for (int iter = 0; iter < 200; ++iter) {
    const Mat m = build(theta);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k, k);
    const double floor = 1e-14 * scale;
    for (std::size_t c = 0; c < s.values.size(); ++c) {
      const Mat d = s.values[c] - m;
      const double r = std::max(d.norm(), floor);
      const double a = s.weights[c] * p * std::pow(r, p - 2.0);
      Eigen::VectorXd proj(k);
      for (int q = 0; q < k; ++q) proj(q) = (d.array() * basis[q].array()).sum();
      grad -= a * proj;
      for (int q = 0; q < k; ++q)
        for (int t = 0; t < k; ++t) {
          const double ee = (basis[q].array() * basis[t].array()).sum();
          hess(q, t) += a * (ee + (p - 2.0) * proj(q) * proj(t) / (r * r));
        }
    }
    hess.diagonal().array() += 1e-300;
    Eigen::VectorXd step = -hess.ldlt().solve(grad);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd trial = theta + lambda * step;
      const double ft = lp_objective(s, build(trial), p);
      if (ft < f) {
        theta = trial;
        f = ft;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved || lambda * step.norm() < 1e-14 * scale) break;
  }
  return build(theta);
}

}  // namespace

RotationFit fit_rotation(const MatrixSamples& s, double p) {
  const int n = s.n;
  if (n != 2 && n != 3) throw DimensionError("rotation fit needs n = 2 or 3");
  if (!(p >= 1.0)) throw InputError("norm exponent must be >= 1");
  const Projection start = project_SO(weighted_mean(s));
  RotationFit fit;
  fit.rotation = start.rotation;
  fit.ambiguous = start.ambiguous;
  fit.objective = lp_objective(s, fit.rotation, p);
  fit.evaluations = 1;
  if (p == 2.0) return fit;

  const int k = skew_parameter_count(n);
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  auto eval = [&](const std::array<double, 3>& t) {
    ++fit.evaluations;
    return lp_objective(s, start.rotation * rotation_from_parameters(n, std::span<const double>(t.data(), k)), p);
  };
  double step = 0.25;
  double best = fit.objective;
  while (step >= 1e-9) {
    bool improved = false;
    for (int q = 0; q < k; ++q)
      for (double sign : {1.0, -1.0}) {
        auto t = theta;
        t[q] += sign * step;
        const double v = eval(t);
        if (v < best) {
          best = v;
          theta = t;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  fit.rotation = start.rotation * rotation_from_parameters(n, std::span<const double>(theta.data(), k));
  fit.objective = best;
  return fit;
}

RotationFit fit_rotation(const TensorField& beta, const NormSpec& spec, const CellBox* box) {
  return fit_rotation(collect_samples(beta, NormSpec{spec.p, false, spec.weight}, box), spec.p);
}

Mat fit_antisymmetric(const MatrixSamples& s, double p) {
  if (!(p >= 1.0)) throw InputError("norm exponent must be >= 1");
  const Mat start = skew_part(weighted_mean(s));
  if (p == 2.0) return start;
  const int k = skew_parameter_count(s.n);
  std::vector<Mat> basis;
  for (int q = 0; q < k; ++q) {
    std::array<double, 3> t{0.0, 0.0, 0.0};
    t[q] = 1.0;
    basis.push_back(skew_from_parameters(s.n, std::span<const double>(t.data(), k)));
  }
  const Mat a = newton_fit(s, p, start, basis);
  return skew_part(a);
}

Mat fit_antisymmetric(const TensorField& beta, const NormSpec& spec, const CellBox* box) {
  return fit_antisymmetric(collect_samples(beta, NormSpec{spec.p, false, spec.weight}, box), spec.p);
}

Mat fit_constant(const MatrixSamples& s, double p) {
  if (!(p >= 1.0)) throw InputError("norm exponent must be >= 1");
  const Mat start = weighted_mean(s);
  if (p == 2.0) return start;
  std::vector<Mat> basis;
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) {
      Mat e = Mat::Zero(s.n, s.n);
      e(i, j) = 1.0;
      basis.push_back(e);
    }
  return newton_fit(s, p, start, basis);
}

}  // namespace rigidlab
