#pragma once

#include <string>
#include <vector>

#include "rigidlab/fitting.hpp"

namespace rigidlab {

/// Q = center + (-r, r)^n; the inner cube Q^ (half-side r/2) is a dyadic cell block.
struct WhitneyCube {
  Point3 center{0.0, 0.0, 0.0};
  double half_side = 0.0;
  int generation = 0;
  CellBox inner;
  CellBox outer;
  /// Grid-sampled dist(Q, boundary): least boundary distance over the cells of Q.
  double distance = 0.0;
  std::vector<int> neighbors;
};

struct WhitneyCover {
  DomainPtr domain;
  std::vector<WhitneyCube> cubes;
  /// Acceptance window dist in [lower * r, upper * r].
  double lower = 1.5;
  double upper = 6.0;
  /// Domain cells left uncovered by truncation at the 2h floor, and their volume fraction.
  std::size_t uncovered_cells = 0;
  double uncovered_fraction = 0.0;
  /// Cells at least this far from the boundary are always covered.
  double collar = 0.0;
  /// Per grid cell: the cube that absorbs a domain cell missed by every inner cube
  /// (nearest covered cell along grid paths through the domain), otherwise -1.
  /// Counting these cells with their owner's inner and outer cubes keeps the lower
  /// bound of the covering chain exact up to the boundary.
  std::vector<int> owner;
};

/// Dyadic Whitney decomposition of a domain on an N^n grid with N a power of two.
/// Throws ResolutionError if more than 1e-3 of the cells beyond the collar are uncovered.
WhitneyCover whitney_cover(const DomainPtr& dom);

/// Cell-exact checks of the covering properties.
struct CoverCheck {
  bool chain = true;
  bool distance_window = true;
  double max_neighbor_ratio = 1.0;
  int max_multiplicity = 0;
  int max_inner_multiplicity = 0;
  std::size_t chain_violations = 0;
};

CoverCheck check_cover(const WhitneyCover& cover);

/// One line per cube: index, center, half-side, generation, distance, neighbour list.
std::string export_cover(const WhitneyCover& cover);

/// phi_j = B_j / sum_k B_k with B(t) = prod_i max(0, 1 - |t_i|)^2, t = (x - x_j)/r_j,
/// sampled at cell centers together with the exact gradient.
struct PartitionOfUnity {
  struct Entry {
    int cube;
    double value;
    std::array<double, 3> gradient;
  };
  /// CSR over grid cells.
  std::vector<std::size_t> start;
  std::vector<Entry> entries;
  /// Cells that lie in no cube and were assigned wholesale to their owner.
  std::vector<std::uint8_t> fallback;
  /// max |D phi_j| r_j over covered cells.
  double gradient_bound = 0.0;
  /// max |sum_j phi_j - 1| and max |sum_j D phi_j| over domain cells.
  double sum_defect = 0.0;
  double gradient_sum_defect = 0.0;

  std::span<const Entry> at(std::size_t cell) const {
    return {entries.data() + start[cell], entries.data() + start[cell + 1]};
  }
};

PartitionOfUnity partition_of_unity(const WhitneyCover& cover);

/// Global constant c_pou asserted for max |D phi_j| r_j on every cover.
inline constexpr double partition_gradient_constant = 8.0;

/// R(x) = sum_j phi_j R_j with its gradient DR = sum_j D phi_j R_j.
struct GluedField {
  TensorField value;
  /// Per cell, gradient(i, j, k) = d_k R_ij.
  std::vector<Tensor3> gradient;
  /// max |sum_j D phi_j R_j - sum_j D phi_j (R_j - M(x))| with M = beta (or I).
  double identity_residual = 0.0;
};

GluedField glue_rotations(const WhitneyCover& cover, const PartitionOfUnity& pou, const std::vector<Mat>& rotations,
                          const TensorField* beta = nullptr);

struct PoincareResult {
  Mat mean;
  double ratio = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  /// Field constant: both sides vanish.
  bool exact_constant = false;
};

/// R_* = argmin_M ||f - M||_{L^s} and ||f - R_*||^s_{L^s} / int dist^s |Df|^s. Df is taken
/// from `gradient` when given (per cell), otherwise from differences between domain cells.
PoincareResult weighted_poincare(const TensorField& f, double s, const std::vector<Tensor3>* gradient = nullptr);

}  // namespace rigidlab
