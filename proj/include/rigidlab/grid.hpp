#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rigidlab {

using Index3 = std::array<int, 3>;
using Point3 = std::array<double, 3>;

/// Dense row-major 3D array. Two-dimensional data uses a trailing extent of 1.
class Array3 {
 public:
  Array3() = default;
  explicit Array3(Index3 extents, double fill = 0.0);

  const Index3& extents() const { return ext_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t linear(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ext_[1] + j) * ext_[2] + k;
  }
  std::size_t linear(const Index3& c) const { return linear(c[0], c[1], c[2]); }

  double& operator()(int i, int j, int k) { return data_[linear(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[linear(i, j, k)]; }
  double& operator()(const Index3& c) { return data_[linear(c)]; }
  double operator()(const Index3& c) const { return data_[linear(c)]; }
  double& operator[](std::size_t l) { return data_[l]; }
  double operator[](std::size_t l) const { return data_[l]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  void fill(double v);

  bool operator==(const Array3&) const = default;

 private:
  Index3 ext_{0, 0, 0};
  std::vector<double> data_;
};

/// Regular grid over an axis-aligned box. Axis 2 is inert (one cell) when dim == 2.
///
/// Staggered layout: cell (i,j,k) has center origin + (idx + 1/2) h. A face normal
/// to axis a sits at node index a and cell indices in the other axes; an edge of
/// pair (a,b) sits at node indices in a and b and the cell index in the third axis.
struct Grid {
  int dim = 3;
  Index3 cells{1, 1, 1};
  Point3 origin{0.0, 0.0, 0.0};
  Point3 spacing{1.0, 1.0, 1.0};

  static Grid uniform(int dim, int n, Point3 origin, double side);

  std::size_t num_cells() const;
  double cell_volume() const;
  double min_spacing() const;
  Point3 upper() const;
  Index3 face_extents(int axis) const;
  Index3 edge_extents(int a, int b) const;
  Point3 cell_center(int i, int j, int k) const;
  Point3 cell_center(const Index3& c) const { return cell_center(c[0], c[1], c[2]); }
  bool contains_point(const Point3& p, double slack = 0.0) const;

  bool operator==(const Grid&) const = default;
};

/// Unit vector along `axis` as an index offset.
inline Index3 unit_offset(int axis) {
  Index3 e{0, 0, 0};
  e[axis] = 1;
  return e;
}

template <class F>
void for_each_index(const Index3& ext, F&& f) {
  for (int i = 0; i < ext[0]; ++i)
    for (int j = 0; j < ext[1]; ++j)
      for (int k = 0; k < ext[2]; ++k) f(i, j, k);
}

/// Pairwise (cascade) summation; deterministic for a fixed input order.
double pairwise_sum(std::span<const double> terms);

/// Independent index pairs (a<b) of the last two Curl indices: one pair in 2D, three in 3D.
int pair_count(int dim);
std::array<int, 2> pair_axes(int dim, int pair);
int pair_index(int dim, int a, int b);

}  // namespace rigidlab
