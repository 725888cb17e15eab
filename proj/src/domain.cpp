#include "rigidlab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "rigidlab/errors.hpp"

namespace rigidlab {

namespace {

bool is_connected(const Grid& g, const std::vector<std::uint8_t>& mask) {
  const auto start = std::find(mask.begin(), mask.end(), std::uint8_t{1});
  if (start == mask.end()) return false;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::queue<std::size_t> todo;
  const std::size_t s = static_cast<std::size_t>(start - mask.begin());
  todo.push(s);
  seen[s] = 1;
  std::size_t count = 0;
  const Index3 n = g.cells;
  while (!todo.empty()) {
    const std::size_t l = todo.front();
    todo.pop();
    ++count;
    const int k = static_cast<int>(l % n[2]);
    const int j = static_cast<int>((l / n[2]) % n[1]);
    const int i = static_cast<int>(l / (static_cast<std::size_t>(n[1]) * n[2]));
    const Index3 c{i, j, k};
    for (int a = 0; a < g.dim; ++a) {
      for (int d : {-1, 1}) {
        Index3 m = c;
        m[a] += d;
        if (m[a] < 0 || m[a] >= n[a]) continue;
        const std::size_t ml = (static_cast<std::size_t>(m[0]) * n[1] + m[1]) * n[2] + m[2];
        if (mask[ml] && !seen[ml]) {
          seen[ml] = 1;
          todo.push(ml);
        }
      }
    }
  }
  return count == static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

// 1D lower envelope of parabolas (Felzenszwalb & Huttenlocher), unit spacing scaled by h.
void distance_1d(const double* f, double* d, int n, double h, std::vector<int>& v,
                 std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + q * q * h * h) - (f[p] + p * p * h * h)) / (2.0 * h * h * (q - p));
      if (s > z[k]) break;
      --k;  // z[0] is -inf, so k never drops below zero
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) d[q] = inf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = (q - v[j]) * h;
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

Array3 squared_distance_transform(const Index3& ext, const std::vector<std::uint8_t>& source,
                                  const Point3& spacing) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Array3 d(ext, inf);
  for (std::size_t l = 0; l < d.size(); ++l)
    if (source[l]) d[l] = 0.0;
  std::vector<int> v;
  std::vector<double> z;
  for (int axis = 0; axis < 3; ++axis) {
    const int n = ext[axis];
    if (n <= 1) continue;
    std::vector<double> in(n), out(n);
    Index3 lim = ext;
    lim[axis] = 1;
    for_each_index(lim, [&](int i, int j, int k) {
      Index3 c{i, j, k};
      for (int q = 0; q < n; ++q) {
        c[axis] = q;
        in[q] = d(c);
      }
      distance_1d(in.data(), out.data(), n, spacing[axis], v, z);
      for (int q = 0; q < n; ++q) {
        c[axis] = q;
        d(c) = out[q];
      }
    });
  }
  return d;
}

Domain::Domain(DomainKind kind, Grid grid, std::vector<std::uint8_t> mask)
    : kind_(kind), grid_(grid), mask_(std::move(mask)) {
  if (grid_.dim != 2 && grid_.dim != 3) throw DimensionError("domain dimension must be 2 or 3");
  if (mask_.size() != grid_.num_cells()) throw ShapeError("mask size does not match grid");
  for (auto& m : mask_) m = m ? 1 : 0;
  active_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
  if (active_ == 0) throw DomainError("domain mask has empty interior");
  if (!is_connected(grid_, mask_)) throw DomainError("domain mask is not connected");
  compute_distance();
}

void Domain::compute_distance() {
  distance_ = Array3(grid_.cells, 0.0);
  if (kind_ != DomainKind::mask) {
    const Point3 lo = grid_.origin;
    const Point3 hi = grid_.upper();
    for_each_index(grid_.cells, [&](int i, int j, int k) {
      const Point3 x = grid_.cell_center(i, j, k);
      double d = std::numeric_limits<double>::infinity();
      for (int a = 0; a < grid_.dim; ++a) d = std::min({d, x[a] - lo[a], hi[a] - x[a]});
      distance_(i, j, k) = d;
    });
    return;
  }
  // Complement cells plus a ghost ring outside the box act as boundary sources.
  Index3 ext = grid_.cells;
  for (int a = 0; a < grid_.dim; ++a) ext[a] += 2;
  const int off2 = grid_.dim == 3 ? 1 : 0;
  std::vector<std::uint8_t> source(static_cast<std::size_t>(ext[0]) * ext[1] * ext[2], 1);
  auto pl = [&](int i, int j, int k) {
    return (static_cast<std::size_t>(i) * ext[1] + j) * ext[2] + k;
  };
  for_each_index(grid_.cells, [&](int i, int j, int k) {
    source[pl(i + 1, j + 1, k + off2)] = inside(i, j, k) ? 0 : 1;
  });
  const Array3 sq = squared_distance_transform(ext, source, grid_.spacing);
  const double half = 0.5 * grid_.min_spacing();
  for_each_index(grid_.cells, [&](int i, int j, int k) {
    distance_(i, j, k) = inside(i, j, k) ? std::sqrt(sq(i + 1, j + 1, k + off2)) - half : 0.0;
  });
}

DomainPtr Domain::unit_cube(int dim, int n) {
  const Grid g = Grid::uniform(dim, n, {0.0, 0.0, 0.0}, 1.0);
  return DomainPtr(new Domain(DomainKind::unit_cube, g, std::vector<std::uint8_t>(g.num_cells(), 1)));
}

DomainPtr Domain::scaled_cube(int dim, const Point3& center, double half_side, int n) {
  if (!(half_side > 0.0)) throw DomainError("cube half side must be positive");
  Point3 origin{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) origin[a] = center[a] - half_side;
  const Grid g = Grid::uniform(dim, n, origin, 2.0 * half_side);
  return DomainPtr(
      new Domain(DomainKind::scaled_cube, g, std::vector<std::uint8_t>(g.num_cells(), 1)));
}

DomainPtr Domain::from_mask(const Grid& grid, std::vector<std::uint8_t> mask) {
  return DomainPtr(new Domain(DomainKind::mask, grid, std::move(mask)));
}

namespace {

template <class Pred>
DomainPtr mask_from_predicate(int dim, int n, Pred&& pred) {
  const Grid g = Grid::uniform(dim, n, {0.0, 0.0, 0.0}, 1.0);
  std::vector<std::uint8_t> m(g.num_cells(), 0);
  for_each_index(g.cells, [&](int i, int j, int k) {
    m[(static_cast<std::size_t>(i) * g.cells[1] + j) * g.cells[2] + k] =
        pred(g.cell_center(i, j, k)) ? 1 : 0;
  });
  return Domain::from_mask(g, std::move(m));
}

}  // namespace

DomainPtr Domain::l_shape(int dim, int n) {
  return mask_from_predicate(dim, n, [](const Point3& x) { return !(x[0] > 0.5 && x[1] > 0.5); });
}

DomainPtr Domain::ball(int dim, int n) {
  return mask_from_predicate(dim, n, [dim](const Point3& x) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += (x[a] - 0.5) * (x[a] - 0.5);
    return r2 < 0.45 * 0.45;
  });
}

DomainPtr Domain::square_mask(int dim, int n) {
  return mask_from_predicate(dim, n, [](const Point3&) { return true; });
}

DomainPtr Domain::named(const std::string& name, int dim, int n) {
  if (name == "cube") return unit_cube(dim, n);
  if (name == "square") return square_mask(dim, n);
  if (name == "lshape") return l_shape(dim, n);
  if (name == "ball") return ball(dim, n);
  throw InputError("unknown domain name '" + name + "'");
}

const Array3& boundary_distance(const Domain& dom) { return dom.boundary_distance(); }

}  // namespace rigidlab
