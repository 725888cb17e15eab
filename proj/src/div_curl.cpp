#include "rigidlab/div_curl.hpp"

#include <cmath>

#include "rigidlab/errors.hpp"

namespace rigidlab {

double edge_divergence_violation(const std::vector<Array3>& edges, const Grid& g) {
  if (g.dim != 3) return 0.0;
  double fmax = 0.0;
  for (const auto& e : edges)
    for (double v : e.values()) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0.0) return 0.0;
  const int np = 3;
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Array3& m01 = edges[i * np + pair_index(3, 0, 1)];
    const Array3& m02 = edges[i * np + pair_index(3, 0, 2)];
    const Array3& m12 = edges[i * np + pair_index(3, 1, 2)];
    for (int a = 1; a < g.cells[0]; ++a)
      for (int b = 1; b < g.cells[1]; ++b)
        for (int c = 1; c < g.cells[2]; ++c) {
          const double d = (m12(a, b, c) - m12(a - 1, b, c)) / g.spacing[0] -
                           (m02(a, b, c) - m02(a, b - 1, c)) / g.spacing[1] +
                           (m01(a, b, c) - m01(a, b, c - 1)) / g.spacing[2];
          worst = std::max(worst, std::abs(d));
        }
  }
  return worst * g.min_spacing() / fmax;
}

TensorField masked_gradient(const CellVectorField& u, const TensorField* boundary) {
  const Domain& dom = *u.domain;
  const Grid& g = dom.grid();
  const int n = g.dim;
  TensorField du(u.domain, Placement::staggered);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Array3& o = du(i, j);
      const double inv = 1.0 / g.spacing[j];
      for_each_index(o.extents(), [&](int a, int b, int c) {
        const Index3 f{a, b, c};
        Index3 lo = f;
        lo[j] -= 1;
        const bool hi_in = f[j] < g.cells[j] && dom.inside(f);
        const bool lo_in = lo[j] >= 0 && dom.inside(lo);
        if (hi_in && lo_in) o(f) = (u.rows[i](f) - u.rows[i](lo)) * inv;
        else o(f) = boundary ? (*boundary)(i, j)(f) : 0.0;
      });
    }
  return du;
}

DivCurlSolution solve_div_curl(const std::vector<Array3>& edges, DomainPtr dom, double divergence_tolerance,
                               const NeumannOptions& opts) {
  if (!dom->is_cube()) throw DomainError("the div-curl solve is implemented on boxes");
  const Grid& g = dom->grid();
  const int n = g.dim;
  const int np = pair_count(n);
  if (static_cast<int>(edges.size()) != n * np) throw ShapeError("edge data has wrong component count");
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < np; ++p) {
      const auto ab = pair_axes(n, p);
      if (!(edges[i * np + p].extents() == g.edge_extents(ab[0], ab[1])))
        throw ShapeError("edge data has wrong extents");
    }
  DivCurlSolution sol{TensorField(dom, Placement::staggered), {}, 0.0};
  sol.divergence_violation = edge_divergence_violation(edges, g);
  if (sol.divergence_violation > divergence_tolerance)
    throw PreconditionError("curl data not divergence-free: relative violation " +
                            std::to_string(sol.divergence_violation));

  TensorField z0(dom, Placement::staggered);
  const int n0 = g.cells[0], n1 = g.cells[1], n2 = g.cells[2];
  for (int i = 0; i < n; ++i) {
    Array3& z_0 = z0(i, 0);
    const Array3& m01 = edges[i * np + pair_index(n, 0, 1)];
    for (int a = 1; a < n0; ++a)
      for (int b = 1; b < n1; ++b) z_0(a, b, 0) = z_0(a, b - 1, 0) + g.spacing[1] * m01(a, b, 0);
    if (n == 3) {
      Array3& z_1 = z0(i, 1);
      const Array3& m02 = edges[i * np + pair_index(3, 0, 2)];
      const Array3& m12 = edges[i * np + pair_index(3, 1, 2)];
      for (int c = 1; c < n2; ++c) {
        for (int a = 1; a < n0; ++a)
          for (int b = 0; b < n1; ++b) z_0(a, b, c) = z_0(a, b, c - 1) + g.spacing[2] * m02(a, b, c);
        for (int a = 0; a < n0; ++a)
          for (int b = 1; b < n1; ++b) z_1(a, b, c) = z_1(a, b, c - 1) + g.spacing[2] * m12(a, b, c);
      }
    }
  }

  const CellVectorField d = div_rows(z0);
  CellVectorField u(dom);
  for (int i = 0; i < n; ++i) {
    NeumannProblem prob;
    prob.rhs = d.rows[i];
    NeumannSolution s = solve_neumann(prob, *dom, opts);
    u.rows[i] = std::move(s.u);
    sol.diagnostics.push_back(std::move(s.diagnostics));
  }
  sol.field = z0 - masked_gradient(u, nullptr);
  return sol;
}

DivCurlSolution solve_div_curl(const DivCurlProblem& p, const NeumannOptions& opts) {
  return solve_div_curl(rasterize(p.data), p.data.domain_ptr(), p.divergence_tolerance, opts);
}

}  // namespace rigidlab
