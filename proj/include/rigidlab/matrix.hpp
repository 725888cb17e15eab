#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>

namespace rigidlab {

/// Small dense matrices (n <= 3) without heap allocation.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Alternating symbol on {0,1,2}.
constexpr int levi_civita(int l, int j, int k) {
  if (l == j || j == k || l == k) return 0;
  return ((j - l + 3) % 3 == 1) ? 1 : -1;
}

/// Third-order tensor m_{ijk} (n <= 3), as carried by the row-wise Curl.
struct Tensor3 {
  int n = 3;
  std::array<double, 27> v{};

  double& operator()(int i, int j, int k) { return v[(i * 3 + j) * 3 + k]; }
  double operator()(int i, int j, int k) const { return v[(i * 3 + j) * 3 + k]; }

  /// Frobenius norm over all n^3 entries.
  double frobenius() const;
  /// Frobenius norm over the independent entries j < k; equals frobenius()/sqrt(2)
  /// for tensors antisymmetric in (j,k). This is the pointwise norm used for TV.
  double norm() const;
};

/// Number of independent entries of an antisymmetric n x n matrix.
constexpr int skew_parameter_count(int n) { return n * (n - 1) / 2; }

/// Antisymmetric matrix from its parameters: n=2 -> [[0,-t],[t,0]];
/// n=3 -> cross-product matrix of the rotation vector.
Mat skew_from_parameters(int n, std::span<const double> theta);
/// Inverse of skew_from_parameters applied to the antisymmetric part of m.
std::array<double, 3> parameters_from_skew(const Mat& m);
/// exp of skew_from_parameters: planar rotation by angle, or Rodrigues' formula.
Mat rotation_from_parameters(int n, std::span<const double> theta);
/// Rotation parameters (angle / rotation vector) of a rotation matrix.
std::array<double, 3> parameters_from_rotation(const Mat& r);

double frobenius(const Mat& m);
Mat sym_part(const Mat& m);
Mat skew_part(const Mat& m);

}  // namespace rigidlab
