#pragma once

#include <vector>

#include "rigidlab/fields.hpp"

namespace rigidlab {

/// Point incompatibility in 2D: Curl beta_{i01} = -burgers_i * delta_position,
/// i.e. the counterclockwise circulation of row i around the point is burgers_i.
struct SingularPoint {
  Point3 position{0.0, 0.0, 0.0};
  std::array<double, 3> burgers{0.0, 0.0, 0.0};
};

/// Straight dislocation segment in 3D carrying the weight matrix burgers (x) tangent.
/// The circulation of row i around the oriented segment (right-hand rule) is burgers_i.
struct SingularSegment {
  Point3 start{0.0, 0.0, 0.0};
  Point3 end{0.0, 0.0, 0.0};
  std::array<double, 3> burgers{0.0, 0.0, 0.0};

  double length() const;
  Mat weight(int n) const;
};

/// Discrete Curl beta: an absolutely continuous part plus concentrated points/segments.
///
/// The ac part stores, per row i and index pair (j<k), the entry m_{ijk}; the entry
/// m_{ikj} = -m_{ijk} is implied, so antisymmetry holds bit-exactly. With staggered
/// placement the values sit on grid edges (nodes in 2D), otherwise at cell centers.
class IncompatibilityMeasure {
 public:
  explicit IncompatibilityMeasure(DomainPtr domain);

  int dim() const { return domain_->dim(); }
  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }

  bool has_ac() const { return !ac_.empty(); }
  Placement ac_placement() const { return ac_placement_; }
  /// Allocates a zero ac part with the given placement.
  void init_ac(Placement placement);
  Array3& ac(int row, int pair) { return ac_[row * pair_count(dim()) + pair]; }
  const Array3& ac(int row, int pair) const { return ac_[row * pair_count(dim()) + pair]; }

  /// Full n x n x n tensor of the ac part at a cell center (edge values are averaged
  /// over the edges of the cell, counting undefined boundary edges as zero).
  Tensor3 cell_tensor(int c0, int c1, int c2) const;

  std::vector<SingularPoint> points;
  std::vector<SingularSegment> segments;

  bool empty() const;
  IncompatibilityMeasure& operator+=(const IncompatibilityMeasure& o);
  /// Measure of the row-mixed field R beta.
  IncompatibilityMeasure rotated_rows(const Mat& r) const;

 private:
  DomainPtr domain_;
  Placement ac_placement_ = Placement::staggered;
  std::vector<Array3> ac_;
};

/// |Curl beta|(Omega): TV of the ac part (cell sum of pointwise norms times cell volume)
/// plus |burgers| for each point and |burgers (x) t| * length for each segment.
/// Pointwise norms count each independent (j<k) entry once; see Tensor3::norm.
double total_variation(const IncompatibilityMeasure& m, const Domain& dom);
/// TV restricted to the cells of `box`; segments are clipped, points counted if inside.
double total_variation(const IncompatibilityMeasure& m, const Domain& dom, const CellBox* box);

/// Edge-based discrete curl data (row-major [row][pair]) of the measure: the staggered
/// ac part plus conservative rasterization of the singular part. A segment crossing the
/// dual plaquette of an interior edge deposits -eps_{ljk} sign(t_l) b_i / (h_j h_k),
/// which makes lattice circulations exact.
std::vector<Array3> rasterize(const IncompatibilityMeasure& m);

}  // namespace rigidlab
