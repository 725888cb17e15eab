#pragma once

#include <vector>

#include "rigidlab/domain.hpp"
#include "rigidlab/matrix.hpp"

namespace rigidlab {

/// Where the entries of a matrix field are sampled.
///  - cell_centered: every entry at cell centers.
///  - staggered: row-wise face placement; entry (i,j) lives on faces normal to axis j,
///    so each row is a face-normal vector field and D(cell values) lands exactly there.
enum class Placement { cell_centered, staggered };

const char* to_string(Placement p);

/// Half-open box of cell indices [lo, hi).
struct CellBox {
  Index3 lo{0, 0, 0};
  Index3 hi{0, 0, 0};
  bool contains(int i, int j, int k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
  }
};

/// Vector field with one scalar per row, sampled at cell centers (e.g. a displacement u).
struct CellVectorField {
  DomainPtr domain;
  std::vector<Array3> rows;

  explicit CellVectorField(DomainPtr dom);
  int dim() const;
};

/// Matrix-valued field beta : Omega -> R^{n x n} on a regular grid.
class TensorField {
 public:
  TensorField(DomainPtr domain, Placement placement);
  static TensorField constant(DomainPtr domain, const Mat& value, Placement placement);

  int dim() const { return domain_->dim(); }
  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const Grid& grid() const { return domain_->grid(); }
  Placement placement() const { return placement_; }

  Array3& operator()(int i, int j) { return comp_[i * dim() + j]; }
  const Array3& operator()(int i, int j) const { return comp_[i * dim() + j]; }

  /// Value at a cell center; staggered entries average their two faces.
  Mat cell_value(int c0, int c1, int c2) const;
  TensorField to_cell_centered() const;

  /// Throws ShapeError unless both fields share domain grid and placement.
  void check_compatible(const TensorField& other) const;
  /// Throws ShapeError on wrong component shapes, InputError on non-finite entries.
  void validate() const;

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);
  /// Constant row mixing: (R beta)(x) = R beta(x).
  TensorField left_multiplied(const Mat& r) const;
  /// Same samples reinterpreted on another domain with an identically shaped grid.
  TensorField rebased(DomainPtr other) const;

  double max_abs_difference(const TensorField& o) const;

 private:
  DomainPtr domain_;
  Placement placement_;
  std::vector<Array3> comp_;
};

TensorField operator+(TensorField a, const TensorField& b);
TensorField operator-(TensorField a, const TensorField& b);
TensorField operator*(double s, TensorField a);

}  // namespace rigidlab
