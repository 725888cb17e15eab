#include "rigidlab/calculus.hpp"

#include <cmath>

#include "rigidlab/errors.hpp"

namespace rigidlab {

Point3 face_center(const Grid& g, int axis, const Index3& idx) {
  Point3 p = g.cell_center(idx);
  p[axis] -= 0.5 * g.spacing[axis];
  return p;
}

namespace {

double face_difference(const Array3& u, const Index3& f, int j, int nj, double h, BoundaryRule rule) {
  Index3 c = f;
  if (f[j] > 0 && f[j] < nj) {
    Index3 m = f;
    m[j] -= 1;
    return (u(c) - u(m)) / h;
  }
  if (rule == BoundaryRule::reflected_ghost || nj < 2) return 0.0;
  if (nj == 2) {
    Index3 a = f, b = f;
    a[j] = 0;
    b[j] = 1;
    return (u(b) - u(a)) / h;
  }
  Index3 p0 = f, p1 = f, p2 = f;
  if (f[j] == 0) {
    p0[j] = 0;
    p1[j] = 1;
    p2[j] = 2;
    return (-2.0 * u(p0) + 3.0 * u(p1) - u(p2)) / h;
  }
  p0[j] = nj - 1;
  p1[j] = nj - 2;
  p2[j] = nj - 3;
  return (2.0 * u(p0) - 3.0 * u(p1) + u(p2)) / h;
}

double centered_difference(const Array3& u, const Index3& c, int j, int nj, double h, BoundaryRule rule) {
  if (nj < 2) return 0.0;
  Index3 m = c, p = c;
  if (c[j] > 0 && c[j] < nj - 1) {
    m[j] -= 1;
    p[j] += 1;
    return (u(p) - u(m)) / (2.0 * h);
  }
  if (rule == BoundaryRule::reflected_ghost) {
    if (c[j] == 0) {
      p[j] += 1;
      return (u(p) - u(c)) / (2.0 * h);
    }
    m[j] -= 1;
    return (u(c) - u(m)) / (2.0 * h);
  }
  if (nj == 2) {
    Index3 a = c, b = c;
    a[j] = 0;
    b[j] = 1;
    return (u(b) - u(a)) / h;
  }
  Index3 p0 = c, p1 = c, p2 = c;
  if (c[j] == 0) {
    p1[j] = 1;
    p2[j] = 2;
    return (-3.0 * u(p0) + 4.0 * u(p1) - u(p2)) / (2.0 * h);
  }
  p1[j] = nj - 2;
  p2[j] = nj - 3;
  return (3.0 * u(p0) - 4.0 * u(p1) + u(p2)) / (2.0 * h);
}

}  // namespace

TensorField grad(const CellVectorField& u, const Stencil& stencil) {
  const int n = u.dim();
  const Grid& g = u.domain->grid();
  TensorField out(u.domain, stencil.placement);
  for (int i = 0; i < n; ++i) {
    const Array3& ui = u.rows[i];
    if (!(ui.extents() == g.cells)) throw ShapeError("vector field row has wrong extents");
    for (int j = 0; j < n; ++j) {
      Array3& o = out(i, j);
      if (stencil.placement == Placement::staggered) {
        for_each_index(o.extents(), [&](int a, int b, int c) {
          o(a, b, c) = face_difference(ui, {a, b, c}, j, g.cells[j], g.spacing[j], stencil.boundary);
        });
      } else {
        for_each_index(o.extents(), [&](int a, int b, int c) {
          o(a, b, c) = centered_difference(ui, {a, b, c}, j, g.cells[j], g.spacing[j], stencil.boundary);
        });
      }
    }
  }
  return out;
}

CellVectorField div_rows(const TensorField& beta) {
  if (beta.placement() != Placement::staggered) throw PlacementError("div_rows needs a staggered field");
  const int n = beta.dim();
  const Grid& g = beta.grid();
  CellVectorField out(beta.domain_ptr());
  for (int i = 0; i < n; ++i) {
    Array3& o = out.rows[i];
    for (int j = 0; j < n; ++j) {
      const Array3& b = beta(i, j);
      const double inv = 1.0 / g.spacing[j];
      for_each_index(g.cells, [&](int a, int bb, int c) {
        Index3 up{a, bb, c};
        up[j] += 1;
        o(a, bb, c) += (b(up) - b(a, bb, c)) * inv;
      });
    }
  }
  return out;
}

std::vector<Array3> curl_edges(const TensorField& beta) {
  if (beta.placement() != Placement::staggered) throw PlacementError("curl_edges needs a staggered field");
  const int n = beta.dim();
  const Grid& g = beta.grid();
  std::vector<Array3> out;
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < pair_count(n); ++p) {
      const auto [j, k] = pair_axes(n, p);
      Array3 e(g.edge_extents(j, k), 0.0);
      const Array3& bj = beta(i, j);
      const Array3& bk = beta(i, k);
      const double hj = g.spacing[j], hk = g.spacing[k];
      for_each_index(e.extents(), [&](int a, int b, int c) {
        const Index3 x{a, b, c};
        if (x[j] < 1 || x[j] > g.cells[j] - 1 || x[k] < 1 || x[k] > g.cells[k] - 1) return;
        Index3 xk = x, xj = x;
        xk[k] -= 1;
        xj[j] -= 1;
        e(x) = (bj(x) - bj(xk)) / hk - (bk(x) - bk(xj)) / hj;
      });
      out.push_back(std::move(e));
    }
  return out;
}

IncompatibilityMeasure curl_general(const TensorField& beta) {
  const int n = beta.dim();
  IncompatibilityMeasure m(beta.domain_ptr());
  if (beta.placement() == Placement::staggered) {
    auto edges = curl_edges(beta);
    m.init_ac(Placement::staggered);
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < pair_count(n); ++p) m.ac(i, p) = std::move(edges[i * pair_count(n) + p]);
    return m;
  }
  const Grid& g = beta.grid();
  m.init_ac(Placement::cell_centered);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < pair_count(n); ++p) {
      const auto [j, k] = pair_axes(n, p);
      Array3& o = m.ac(i, p);
      for_each_index(g.cells, [&](int a, int b, int c) {
        const Index3 x{a, b, c};
        o(x) = centered_difference(beta(i, j), x, k, g.cells[k], g.spacing[k], BoundaryRule::one_sided) -
               centered_difference(beta(i, k), x, j, g.cells[j], g.spacing[j], BoundaryRule::one_sided);
      });
    }
  return m;
}

TensorField identify_alpha3(const IncompatibilityMeasure& m) {
  if (m.dim() != 3) throw DimensionError("alpha is defined for n = 3 only");
  TensorField alpha(m.domain_ptr(), Placement::cell_centered);
  const Grid& g = m.domain().grid();
  for_each_index(g.cells, [&](int a, int b, int c) {
    const Tensor3 t = m.cell_tensor(a, b, c);
    for (int i = 0; i < 3; ++i)
      for (int l = 0; l < 3; ++l) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) s += levi_civita(l, j, k) * t(i, j, k);
        alpha(i, l)(a, b, c) = s;
      }
  });
  return alpha;
}

TensorField extend_reflect_mollify(const TensorField& beta, double radius) {
  const Domain& dom = beta.domain();
  if (!dom.is_cube()) throw DomainError("reflection needs a cube domain");
  const Grid& g = dom.grid();
  const double h = g.spacing[0];
  if (!(radius >= h)) throw ResolutionError("mollifier radius below grid spacing");
  const int n = g.dim;
  const int pad = static_cast<int>(std::ceil(radius / h - 1e-12));
  const int ncell = g.cells[0];
  const double side = ncell * h;
  Point3 center{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) center[a] = g.origin[a] + 0.5 * side;
  DomainPtr big = Domain::scaled_cube(n, center, 0.5 * side + pad * h, ncell + 2 * pad);

  struct Tap {
    Index3 d;
    double w;
  };
  std::vector<Tap> taps;
  double mass = 0.0;
  const int pz = n == 3 ? pad : 0;
  for (int a = -pad; a <= pad; ++a)
    for (int b = -pad; b <= pad; ++b)
      for (int c = -pz; c <= pz; ++c) {
        const double r2 = (double(a) * a + double(b) * b + double(c) * c) * h * h / (radius * radius);
        if (r2 >= 1.0) continue;
        const double w = std::pow(1.0 - r2, 4);
        taps.push_back({{a, b, c}, w});
        mass += w;
      }
  for (auto& t : taps) t.w /= mass;

  auto mirror = [&](int i) {
    int m = ((i % (2 * ncell)) + 2 * ncell) % (2 * ncell);
    return m >= ncell ? 2 * ncell - 1 - m : m;
  };

  const TensorField src = beta.to_cell_centered();
  TensorField out(big, Placement::cell_centered);
  const Grid& bg = big->grid();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Array3& s = src(i, j);
      Array3& o = out(i, j);
      for_each_index(bg.cells, [&](int a, int b, int c) {
        double acc = 0.0;
        for (const auto& t : taps) {
          const int x = mirror(a - pad + t.d[0]);
          const int y = mirror(b - pad + t.d[1]);
          const int z = n == 3 ? mirror(c - pad + t.d[2]) : 0;
          acc += t.w * s(x, y, z);
        }
        o(a, b, c) = acc;
      });
    }
  return out;
}

}  // namespace rigidlab
