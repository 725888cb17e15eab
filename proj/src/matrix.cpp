#include "rigidlab/matrix.hpp"

#include <cmath>

#include "rigidlab/errors.hpp"

namespace rigidlab {

double Tensor3::frobenius() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += (*this)(i, j, k) * (*this)(i, j, k);
  return std::sqrt(s);
}

double Tensor3::norm() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) s += (*this)(i, j, k) * (*this)(i, j, k);
  return std::sqrt(s);
}

Mat skew_from_parameters(int n, std::span<const double> theta) {
  Mat w = Mat::Zero(n, n);
  if (n == 2) {
    w(0, 1) = -theta[0];
    w(1, 0) = theta[0];
    return w;
  }
  if (n != 3) throw DimensionError("skew parameters need n = 2 or 3");
  w(0, 1) = -theta[2];
  w(1, 0) = theta[2];
  w(0, 2) = theta[1];
  w(2, 0) = -theta[1];
  w(1, 2) = -theta[0];
  w(2, 1) = theta[0];
  return w;
}

std::array<double, 3> parameters_from_skew(const Mat& m) {
  if (m.rows() == 2) return {0.5 * (m(1, 0) - m(0, 1)), 0.0, 0.0};
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

Mat rotation_from_parameters(int n, std::span<const double> theta) {
  if (n == 2) {
    const double c = std::cos(theta[0]), s = std::sin(theta[0]);
    Mat r(2, 2);
    r << c, -s, s, c;
    return r;
  }
  if (n != 3) throw DimensionError("rotation parameters need n = 2 or 3");
  const double angle = std::sqrt(theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2]);
  const Mat k = skew_from_parameters(3, theta);
  Mat r = Mat::Identity(3, 3);
  if (angle < 1e-8) {
    r += k + 0.5 * k * k;
    return r;
  }
  r += (std::sin(angle) / angle) * k + ((1.0 - std::cos(angle)) / (angle * angle)) * (k * k);
  return r;
}

std::array<double, 3> parameters_from_rotation(const Mat& r) {
  if (r.rows() == 2) return {std::atan2(r(1, 0), r(0, 0)), 0.0, 0.0};
  const Eigen::Matrix3d m = r;
  const Eigen::AngleAxisd aa(m);
  const Eigen::Vector3d v = aa.angle() * aa.axis();
  return {v[0], v[1], v[2]};
}

double frobenius(const Mat& m) { return m.norm(); }

Mat sym_part(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat skew_part(const Mat& m) { return 0.5 * (m - m.transpose()); }

}  // namespace rigidlab
