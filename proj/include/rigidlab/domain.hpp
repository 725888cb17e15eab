#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rigidlab/grid.hpp"

namespace rigidlab {

enum class DomainKind { unit_cube, scaled_cube, mask };

class Domain;
using DomainPtr = std::shared_ptr<const Domain>;

/// A bounded connected region discretized on a regular grid.
///
/// Cubes cover their whole grid. Masked regions resolve the boundary at voxel
/// resolution; whether the region is Lipschitz is the caller's responsibility.
class Domain {
 public:
  static DomainPtr unit_cube(int dim, int n);
  /// The cube center + (-half_side, half_side)^dim with n cells per axis.
  static DomainPtr scaled_cube(int dim, const Point3& center, double half_side, int n);
  static DomainPtr from_mask(const Grid& grid, std::vector<std::uint8_t> mask);

  /// Unit box with the quadrant {x0 > 1/2, x1 > 1/2} removed (a prism in 3D).
  static DomainPtr l_shape(int dim, int n);
  /// Cells of the unit box whose centers lie in the ball of radius 0.45 about the box center.
  static DomainPtr ball(int dim, int n);
  /// Unit cube expressed as a mask, for exercising mask code paths on a cube.
  static DomainPtr square_mask(int dim, int n);
  /// Named constructor used by configs: "cube", "square", "lshape", "ball".
  static DomainPtr named(const std::string& name, int dim, int n);

  int dim() const { return grid_.dim; }
  DomainKind kind() const { return kind_; }
  bool is_cube() const { return kind_ != DomainKind::mask; }
  const Grid& grid() const { return grid_; }

  bool inside(std::size_t cell) const { return mask_[cell] != 0; }
  bool inside(int i, int j, int k) const { return mask_[linear(i, j, k)] != 0; }
  bool inside(const Index3& c) const { return inside(c[0], c[1], c[2]); }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::size_t active_cells() const { return active_; }
  double volume() const { return active_ * grid_.cell_volume(); }

  /// Distance from each cell center to the boundary; zero on the complement.
  const Array3& boundary_distance() const { return distance_; }

  std::size_t linear(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * grid_.cells[1] + j) * grid_.cells[2] + k;
  }

 private:
  Domain(DomainKind kind, Grid grid, std::vector<std::uint8_t> mask);
  void compute_distance();

  DomainKind kind_;
  Grid grid_;
  std::vector<std::uint8_t> mask_;
  std::size_t active_ = 0;
  Array3 distance_;
};

/// The boundary-distance weight field dist(x, boundary) sampled at cell centers.
const Array3& boundary_distance(const Domain& dom);

/// Exact squared Euclidean distance transform (separable lower-envelope method).
/// `source` marks zero-distance cells; spacing is per axis. Returns squared distances.
Array3 squared_distance_transform(const Index3& extents, const std::vector<std::uint8_t>& source,
                                  const Point3& spacing);

}  // namespace rigidlab
