#pragma once

#include <vector>

#include "rigidlab/norms.hpp"

namespace rigidlab {

/// Cell-center values of a field over the domain (optionally a box), with quadrature weights.
struct MatrixSamples {
  int n = 0;
  std::vector<Mat> values;
  std::vector<double> weights;
};

MatrixSamples collect_samples(const TensorField& f, const NormSpec& spec = {}, const CellBox* box = nullptr);

/// Frobenius distance to SO(n).
double dist_SO(const Mat& m);

struct Projection {
  Mat rotation;
  /// The nearest rotation is not unique (rank deficiency after the determinant correction).
  bool ambiguous = false;
};

/// Nearest rotation: U diag(1,..,1,sign det(UV^T)) V^T.
Projection project_SO(const Mat& m);

/// (sum_c w_c |A_c - M|^p)^{1/p}.
double lp_distance(const MatrixSamples& s, const Mat& m, double p);

struct RotationFit {
  Mat rotation;
  bool ambiguous = false;
  int evaluations = 0;
  double objective = 0.0;
};

/// argmin over R in SO(n) of ||beta - R||_{L^p}. p = 2: Procrustes on the mean.
/// Otherwise compass search over R0 exp(W(theta)) from the Procrustes start, halving the
/// step until it falls below 1e-9.
RotationFit fit_rotation(const MatrixSamples& s, double p);
RotationFit fit_rotation(const TensorField& beta, const NormSpec& spec, const CellBox* box = nullptr);

/// argmin over antisymmetric A of ||beta - A||_{L^p}. p = 2: skew part of the mean;
/// otherwise damped Newton on the skew parameters from that start.
Mat fit_antisymmetric(const MatrixSamples& s, double p);
Mat fit_antisymmetric(const TensorField& beta, const NormSpec& spec, const CellBox* box = nullptr);

/// argmin over constant M of ||beta - M||_{L^p}; the mean for p = 2.
Mat fit_constant(const MatrixSamples& s, double p);

/// Objective sum_c w_c |A_c - M|^p used by the minimizers.
double lp_objective(const MatrixSamples& s, const Mat& m, double p);

}  // namespace rigidlab
