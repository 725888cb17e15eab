#pragma once

/// Brute-force reference minimizers shared by the unit and acceptance tests. They use
/// parameter grids and golden-section line searches, independent of the library's
/// Procrustes, compass and Newton code paths.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "rigidlab/fitting.hpp"

namespace oracle {

using rigidlab::Mat;
using rigidlab::MatrixSamples;

/// Minimizes a unimodal f on [a, b].
inline double golden_section(const std::function<long double(double)>& f, double a, double b, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  long double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// sum_c w_c |A_c - M|^p in extended precision, so that line searches resolve the
/// minimizer well below the square root of double rounding.
inline long double objective(const MatrixSamples& s, const Mat& m, double p) {
  long double total = 0.0L;
  for (std::size_t c = 0; c < s.values.size(); ++c) {
    long double d2 = 0.0L;
    for (int i = 0; i < s.n; ++i)
      for (int j = 0; j < s.n; ++j) {
        const long double e = static_cast<long double>(s.values[c](i, j)) - m(i, j);
        d2 += e * e;
      }
    total += s.weights[c] * std::pow(d2, static_cast<long double>(p) / 2.0L);
  }
  return total;
}

struct GridMinimum {
  std::array<double, 3> theta{};
  double value = 0.0;
};

/// Minimizes f over rotation parameters: a full grid of spacing `step` over the
/// parameter box, then repeated 5^d grids centered at the incumbent with halved spacing
/// until the spacing drops below `resolution`.
inline GridMinimum rotation_grid_search(int n, const std::function<double(const std::array<double, 3>&)>& f,
                                        double step, double resolution) {
  const double pi = std::numbers::pi;
  const int d = rigidlab::skew_parameter_count(n);
  GridMinimum best{{0, 0, 0}, f({0, 0, 0})};
  const int m = static_cast<int>(std::ceil(pi / step));
  std::array<int, 3> idx{0, 0, 0};
  const int total = static_cast<int>(std::pow(2 * m + 1, d));
  for (int t = 0; t < total; ++t) {
    int r = t;
    std::array<double, 3> th{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      idx[a] = r % (2 * m + 1) - m;
      r /= 2 * m + 1;
      th[a] = idx[a] * step;
    }
    const double v = f(th);
    if (v < best.value) best = {th, v};
  }
  for (double h = step / 2; h >= resolution; h /= 2) {
    const std::array<double, 3> c = best.theta;
    const int cells = static_cast<int>(std::pow(5, d));
    for (int t = 0; t < cells; ++t) {
      int r = t;
      std::array<double, 3> th = c;
      for (int a = 0; a < d; ++a) {
        th[a] += (r % 5 - 2) * h;
        r /= 5;
      }
      const double v = f(th);
      if (v < best.value) best = {th, v};
    }
  }
  return best;
}

/// Rotation minimizing the L^p objective by grid search.
inline Mat grid_rotation(const MatrixSamples& s, double p, double step, double resolution) {
  auto obj = [&](const std::array<double, 3>& th) {
    return rigidlab::lp_objective(s, rigidlab::rotation_from_parameters(s.n, th), p);
  };
  return rigidlab::rotation_from_parameters(s.n, rotation_grid_search(s.n, obj, step, resolution).theta);
}

/// Distance to SO(n) by grid search over rotations.
inline double grid_dist_SO(const Mat& m, double step, double resolution) {
  const int n = static_cast<int>(m.rows());
  auto obj = [&](const std::array<double, 3>& th) {
    return (m - rigidlab::rotation_from_parameters(n, th)).norm();
  };
  return rotation_grid_search(n, obj, step, resolution).value;
}

/// Antisymmetric minimizer by cyclic golden-section search on each free entry.
inline Mat coordinate_antisymmetric(const MatrixSamples& s, double p, int sweeps = 200) {
  const int n = s.n;
  const int d = rigidlab::skew_parameter_count(n);
  std::array<double, 3> th{0, 0, 0};
  double bound = 0.0;
  for (const Mat& v : s.values) bound = std::max(bound, v.norm());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double moved = 0.0;
    for (int a = 0; a < d; ++a) {
      auto f = [&](double t) {
        std::array<double, 3> x = th;
        x[a] = t;
        return objective(s, rigidlab::skew_from_parameters(n, x), p);
      };
      const double t = golden_section(f, -bound - 1.0, bound + 1.0, 1e-13);
      moved = std::max(moved, std::abs(t - th[a]));
      th[a] = t;
    }
    if (moved < 1e-12) break;
  }
  return rigidlab::skew_from_parameters(n, th);
}

/// Samples of a noisy rotation field R0 (I + eps N(x)) with uniform weights.
inline MatrixSamples noisy_rotation_samples(int n, int count, double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  const std::array<double, 3> th{ang(rng), 0.6 * u(rng), 0.9 * u(rng)};
  const Mat r0 = rigidlab::rotation_from_parameters(n, th);
  MatrixSamples s;
  s.n = n;
  for (int c = 0; c < count; ++c) {
    Mat noise(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) noise(i, j) = u(rng);
    s.values.push_back(r0 * (Mat::Identity(n, n) + eps * noise));
    s.weights.push_back(1.0 / count);
  }
  return s;
}

/// Samples of a random matrix field with uniform weights.
inline MatrixSamples random_samples(int n, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixSamples s;
  s.n = n;
  for (int c = 0; c < count; ++c) {
    Mat v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(i, j) = g(rng);
    s.values.push_back(v);
    s.weights.push_back(1.0 / count);
  }
  return s;
}

}  // namespace oracle
