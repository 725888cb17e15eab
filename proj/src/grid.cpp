#include "rigidlab/grid.hpp"

#include <algorithm>

#include "rigidlab/errors.hpp"

namespace rigidlab {

Array3::Array3(Index3 extents, double fill)
    : ext_(extents),
      data_(static_cast<std::size_t>(extents[0]) * extents[1] * extents[2], fill) {
  if (extents[0] < 0 || extents[1] < 0 || extents[2] < 0)
    throw ShapeError("Array3: negative extent");
}

void Array3::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Grid Grid::uniform(int dim, int n, Point3 origin, double side) {
  if (dim != 2 && dim != 3) throw DimensionError("grid dimension must be 2 or 3");
  if (n < 1) throw ResolutionError("grid needs at least one cell per axis");
  Grid g;
  g.dim = dim;
  g.origin = origin;
  for (int a = 0; a < 3; ++a) {
    g.cells[a] = a < dim ? n : 1;
    g.spacing[a] = side / n;
  }
  if (dim == 2) g.origin[2] = 0.0;
  return g;
}

std::size_t Grid::num_cells() const {
  return static_cast<std::size_t>(cells[0]) * cells[1] * cells[2];
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing[a];
  return v;
}

double Grid::min_spacing() const {
  double h = spacing[0];
  for (int a = 1; a < dim; ++a) h = std::min(h, spacing[a]);
  return h;
}

Point3 Grid::upper() const {
  Point3 u = origin;
  for (int a = 0; a < dim; ++a) u[a] += cells[a] * spacing[a];
  return u;
}

Index3 Grid::face_extents(int axis) const {
  Index3 e = cells;
  e[axis] += 1;
  return e;
}

Index3 Grid::edge_extents(int a, int b) const {
  Index3 e = cells;
  e[a] += 1;
  e[b] += 1;
  return e;
}

Point3 Grid::cell_center(int i, int j, int k) const {
  const Index3 c{i, j, k};
  Point3 p = origin;
  for (int a = 0; a < dim; ++a) p[a] += (c[a] + 0.5) * spacing[a];
  return p;
}

bool Grid::contains_point(const Point3& p, double slack) const {
  const Point3 up = upper();
  for (int a = 0; a < dim; ++a)
    if (p[a] < origin[a] - slack || p[a] > up[a] + slack) return false;
  return true;
}

double pairwise_sum(std::span<const double> terms) {
  constexpr std::size_t kBlock = 128;
  if (terms.size() <= kBlock) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

int pair_count(int dim) { return dim == 2 ? 1 : 3; }

std::array<int, 2> pair_axes(int dim, int pair) {
  if (dim == 2) return {0, 1};
  static constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};
  return kPairs[pair];
}

int pair_index(int dim, int a, int b) {
  if (a > b) std::swap(a, b);
  if (dim == 2) return 0;
  if (a == 0) return b == 1 ? 0 : 1;
  return 2;
}

}  // namespace rigidlab
