#pragma once

#include <memory>
#include <vector>

#include "rigidlab/fields.hpp"

namespace rigidlab {

/// Exponent (or weak-L^p flag) plus an optional cell-centered weight.
struct NormSpec {
  double p = 2.0;
  bool weak = false;
  std::shared_ptr<const Array3> weight;

  /// L^{1*} with 1* = n/(n-1).
  static NormSpec critical(int n);
};

/// Sobolev-conjugate exponent 1* = n/(n-1).
double critical_exponent(int n);

/// Midpoint-rule L^p norm of the pointwise Frobenius norm over the domain cells:
/// (sum_cells w |f|^p h^n)^{1/p}. With spec.weak, returns the weak-L^p quasinorm
/// sup_t t * |{|f| > t}|^{1/p}, computed exactly from the sorted samples.
double lp_norm(const TensorField& f, const NormSpec& spec);

/// Same, for nonnegative per-cell magnitudes (indexed like the grid cells).
double lp_norm_of_magnitudes(std::span<const double> magnitudes, const Domain& dom,
                             const NormSpec& spec, const CellBox* box = nullptr);

/// Pointwise Frobenius magnitudes of a field at cell centers.
std::vector<double> cell_magnitudes(const TensorField& f);

}  // namespace rigidlab
