#include "rigidlab/neumann.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "rigidlab/errors.hpp"

namespace rigidlab {

namespace {

std::mutex planner_mutex;

bool has_flux(const NeumannProblem& p, int axis) { return !p.boundary_flux[axis].empty(); }

// f minus the contribution of prescribed boundary fluxes, so that L_N u = f_eff.
Array3 effective_rhs(const NeumannProblem& p, const Domain& dom, double& scale) {
  const Grid& g = dom.grid();
  const int n = g.dim;
  Array3 f = p.rhs;
  scale = 0.0;
  for_each_index(g.cells, [&](int a, int b, int c) {
    if (dom.inside(a, b, c)) scale += std::abs(f(a, b, c));
    else f(a, b, c) = 0.0;
  });
  for (int j = 0; j < n; ++j) {
    if (!has_flux(p, j)) continue;
    const Array3& q = p.boundary_flux[j];
    if (!(q.extents() == g.face_extents(j))) throw ShapeError("boundary flux has wrong extents");
    const double inv = 1.0 / g.spacing[j];
    for_each_index(g.cells, [&](int a, int b, int c) {
      const Index3 x{a, b, c};
      if (!dom.inside(x)) return;
      Index3 lo = x, hi = x;
      hi[j] += 1;
      Index3 left = x, right = x;
      left[j] -= 1;
      right[j] += 1;
      if (x[j] == 0 || !dom.inside(left)) {
        f(x) += q(lo) * inv;
        scale += std::abs(q(lo)) * inv;
      }
      if (x[j] == g.cells[j] - 1 || !dom.inside(right)) {
        f(x) -= q(hi) * inv;
        scale += std::abs(q(hi)) * inv;
      }
    });
  }
  return f;
}

double active_mean(const Array3& u, const Domain& dom) {
  std::vector<double> v;
  v.reserve(dom.active_cells());
  for (std::size_t l = 0; l < u.size(); ++l)
    if (dom.inside(l)) v.push_back(u[l]);
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double active_norm(const Array3& u, const Domain& dom) {
  std::vector<double> v;
  v.reserve(dom.active_cells());
  for (std::size_t l = 0; l < u.size(); ++l)
    if (dom.inside(l)) v.push_back(u[l] * u[l]);
  return std::sqrt(pairwise_sum(v));
}

void solve_cosine(const Array3& f, const Grid& g, Array3& u) {
  const int n = g.dim;
  int dims[3] = {g.cells[0], g.cells[1], g.cells[2]};
  const std::size_t total = g.num_cells();
  double* buf = static_cast<double*>(fftw_malloc(sizeof(double) * total));
  fftw_r2r_kind fwd[3] = {FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT10};
  fftw_r2r_kind inv[3] = {FFTW_REDFT01, FFTW_REDFT01, FFTW_REDFT01};
  fftw_plan pf, pb;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    pf = fftw_plan_r2r(n, dims, buf, buf, fwd, FFTW_ESTIMATE);
    pb = fftw_plan_r2r(n, dims, buf, buf, inv, FFTW_ESTIMATE);
  }
  std::copy(f.values().begin(), f.values().end(), buf);
  fftw_execute(pf);
  std::array<std::vector<double>, 3> lam;
  double norm = 1.0;
  for (int d = 0; d < 3; ++d) {
    lam[d].assign(g.cells[d], 0.0);
    if (d >= n) continue;
    norm *= 2.0 * g.cells[d];
    for (int k = 0; k < g.cells[d]; ++k) {
      const double s = std::sin(std::numbers::pi * k / (2.0 * g.cells[d]));
      lam[d][k] = 4.0 * s * s / (g.spacing[d] * g.spacing[d]);
    }
  }
  std::size_t l = 0;
  for (int a = 0; a < g.cells[0]; ++a)
    for (int b = 0; b < g.cells[1]; ++b)
      for (int c = 0; c < g.cells[2]; ++c, ++l) {
        const double ev = lam[0][a] + lam[1][b] + lam[2][c];
        buf[l] = ev == 0.0 ? 0.0 : -buf[l] / (ev * norm);
      }
  fftw_execute(pb);
  u = Array3(g.cells, 0.0);
  std::copy(buf, buf + total, u.values().begin());
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(pf);
    fftw_destroy_plan(pb);
  }
  fftw_free(buf);
}

// Weighted graph Laplacian A = -L (positive semidefinite) in CSR form.
struct Level {
  int size = 0;
  std::vector<int> start, col;
  std::vector<double> weight, diag;
  std::vector<int> parent;  // aggregate index on the next level
};

struct Hierarchy {
  std::vector<Level> levels;
  Eigen::LDLT<Eigen::MatrixXd> coarse;
};

Level level_from_edges(int size, const std::vector<std::tuple<int, int, double>>& edges) {
  Level lv;
  lv.size = size;
  std::vector<std::vector<std::pair<int, double>>> adj(size);
  for (const auto& [a, b, w] : edges) {
    adj[a].push_back({b, w});
    adj[b].push_back({a, w});
  }
  lv.start.assign(size + 1, 0);
  lv.diag.assign(size, 0.0);
  for (int v = 0; v < size; ++v) {
    auto& row = adj[v];
    std::sort(row.begin(), row.end());
    // merge duplicate neighbours
    std::vector<std::pair<int, double>> merged;
    for (const auto& e : row) {
      if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
      else merged.push_back(e);
    }
    for (const auto& [nb, w] : merged) {
      lv.col.push_back(nb);
      lv.weight.push_back(w);
      lv.diag[v] += w;
    }
    lv.start[v + 1] = static_cast<int>(lv.col.size());
  }
  return lv;
}

void apply(const Level& lv, const std::vector<double>& x, std::vector<double>& y) {
  y.assign(lv.size, 0.0);
  for (int v = 0; v < lv.size; ++v) {
    double s = lv.diag[v] * x[v];
    for (int e = lv.start[v]; e < lv.start[v + 1]; ++e) s -= lv.weight[e] * x[lv.col[e]];
    y[v] = s;
  }
}

void gauss_seidel(const Level& lv, const std::vector<double>& b, std::vector<double>& x, bool forward) {
  for (int q = 0; q < lv.size; ++q) {
    const int v = forward ? q : lv.size - 1 - q;
    if (lv.diag[v] == 0.0) continue;
    double s = b[v];
    for (int e = lv.start[v]; e < lv.start[v + 1]; ++e) s += lv.weight[e] * x[lv.col[e]];
    x[v] = s / lv.diag[v];
  }
}

Hierarchy build_hierarchy(const Domain& dom, std::vector<int>& index_of_cell, std::vector<Index3>& cell_of_index) {
  const Grid& g = dom.grid();
  const int n = g.dim;
  index_of_cell.assign(g.num_cells(), -1);
  cell_of_index.clear();
  for_each_index(g.cells, [&](int a, int b, int c) {
    const std::size_t l = dom.linear(a, b, c);
    if (!dom.inside(l)) return;
    index_of_cell[l] = static_cast<int>(cell_of_index.size());
    cell_of_index.push_back({a, b, c});
  });
  std::vector<std::tuple<int, int, double>> edges;
  for (std::size_t v = 0; v < cell_of_index.size(); ++v) {
    const Index3 x = cell_of_index[v];
    for (int j = 0; j < n; ++j) {
      Index3 y = x;
      y[j] += 1;
      if (y[j] >= g.cells[j]) continue;
      const int w = index_of_cell[dom.linear(y[0], y[1], y[2])];
      if (w < 0) continue;
      edges.emplace_back(static_cast<int>(v), w, 1.0 / (g.spacing[j] * g.spacing[j]));
    }
  }
  Hierarchy hier;
  hier.levels.push_back(level_from_edges(static_cast<int>(cell_of_index.size()), edges));

  // aggregation by 2^n blocks of the fine index grid
  std::vector<Index3> coords = cell_of_index;
  while (hier.levels.back().size > 64) {
    Level& fine = hier.levels.back();
    std::vector<Index3> coarse_coords;
    std::map<Index3, int> lookup;
    fine.parent.assign(fine.size, 0);
    for (int v = 0; v < fine.size; ++v) {
      Index3 cc{coords[v][0] / 2, coords[v][1] / 2, coords[v][2] / 2};
      auto it = lookup.find(cc);
      if (it == lookup.end()) {
        it = lookup.emplace(cc, static_cast<int>(coarse_coords.size())).first;
        coarse_coords.push_back(cc);
      }
      fine.parent[v] = it->second;
    }
    std::vector<std::tuple<int, int, double>> cedges;
    for (int v = 0; v < fine.size; ++v)
      for (int e = fine.start[v]; e < fine.start[v + 1]; ++e) {
        const int w = fine.col[e];
        if (w <= v) continue;
        const int a = fine.parent[v], b = fine.parent[w];
        if (a != b) cedges.emplace_back(a, b, fine.weight[e]);
      }
    const int csize = static_cast<int>(coarse_coords.size());
    if (csize == fine.size) break;
    hier.levels.push_back(level_from_edges(csize, cedges));
    coords = std::move(coarse_coords);
  }
  const Level& last = hier.levels.back();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(last.size, last.size);
  for (int v = 0; v < last.size; ++v) {
    a(v, v) = last.diag[v];
    for (int e = last.start[v]; e < last.start[v + 1]; ++e) a(v, last.col[e]) -= last.weight[e];
  }
  // pin the constant mode
  a.array() += last.diag.empty() ? 0.0 : a.diagonal().maxCoeff() / last.size;
  hier.coarse.compute(a);
  return hier;
}

void remove_mean(std::vector<double>& x) {
  const double m = pairwise_sum(x) / static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

void vcycle(const Hierarchy& h, std::size_t lvl, const std::vector<double>& b, std::vector<double>& x) {
  const Level& lv = h.levels[lvl];
  if (lvl + 1 == h.levels.size()) {
    Eigen::Map<const Eigen::VectorXd> rb(b.data(), lv.size);
    Eigen::VectorXd sol = h.coarse.solve(rb);
    x.assign(sol.data(), sol.data() + lv.size);
    remove_mean(x);
    return;
  }
  x.assign(lv.size, 0.0);
  gauss_seidel(lv, b, x, true);
  std::vector<double> ax;
  apply(lv, x, ax);
  const Level& coarse = h.levels[lvl + 1];
  std::vector<double> rc(coarse.size, 0.0);
  for (int v = 0; v < lv.size; ++v) rc[lv.parent[v]] += b[v] - ax[v];
  std::vector<double> xc;
  vcycle(h, lvl + 1, rc, xc);
  for (int v = 0; v < lv.size; ++v) x[v] += xc[lv.parent[v]];
  gauss_seidel(lv, b, x, false);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i] * b[i];
  return pairwise_sum(t);
}

void solve_multigrid_cg(const Array3& f, const Domain& dom, const NeumannOptions& opts, Array3& u,
                        SolveDiagnostics& diag) {
  std::vector<int> index_of_cell;
  std::vector<Index3> cells;
  const Hierarchy hier = build_hierarchy(dom, index_of_cell, cells);
  const Level& lv = hier.levels.front();
  const int m = lv.size;
  std::vector<double> b(m), x(m, 0.0), r(m), z, p, ap;
  for (int v = 0; v < m; ++v) b[v] = -f(cells[v]);
  remove_mean(b);
  const double bnorm = std::sqrt(dot(b, b));
  u = Array3(dom.grid().cells, 0.0);
  diag.residual_history.clear();
  if (bnorm == 0.0) {
    diag.final_residual = 0.0;
    return;
  }
  r = b;
  vcycle(hier, 0, r, z);
  remove_mean(z);
  p = z;
  double rz = dot(r, z);
  double rel = 1.0;
  diag.residual_history.push_back(rel);
  int it = 0;
  while (rel > opts.tolerance) {
    if (it >= opts.max_iterations)
      throw ConvergenceError("multigrid CG did not converge", it, rel, diag.residual_history);
    apply(lv, p, ap);
    const double alpha = rz / dot(p, ap);
    for (int v = 0; v < m; ++v) {
      x[v] += alpha * p[v];
      r[v] -= alpha * ap[v];
    }
    ++it;
    rel = std::sqrt(dot(r, r)) / bnorm;
    diag.residual_history.push_back(rel);
    if (rel <= opts.tolerance) break;
    vcycle(hier, 0, r, z);
    remove_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int v = 0; v < m; ++v) p[v] = z[v] + beta * p[v];
  }
  remove_mean(x);
  for (int v = 0; v < m; ++v) u(cells[v]) = x[v];
  diag.iterations = it;
  diag.final_residual = rel;
}

}  // namespace

Array3 neumann_laplacian(const Array3& u, const Domain& dom) {
  const Grid& g = dom.grid();
  Array3 out(g.cells, 0.0);
  for_each_index(g.cells, [&](int a, int b, int c) {
    const Index3 x{a, b, c};
    if (!dom.inside(x)) return;
    double s = 0.0;
    for (int j = 0; j < g.dim; ++j) {
      const double w = 1.0 / (g.spacing[j] * g.spacing[j]);
      Index3 y = x;
      y[j] -= 1;
      if (y[j] >= 0 && dom.inside(y)) s += w * (u(y) - u(x));
      y[j] += 2;
      if (y[j] < g.cells[j] && dom.inside(y)) s += w * (u(y) - u(x));
    }
    out(x) = s;
  });
  return out;
}

NeumannSolution solve_neumann(const NeumannProblem& p, const Domain& dom, const NeumannOptions& opts) {
  const Grid& g = dom.grid();
  if (!(p.rhs.extents() == g.cells)) throw ShapeError("rhs has wrong extents");
  double scale = 0.0;
  Array3 f = effective_rhs(p, dom, scale);
  const double mean = active_mean(f, dom);
  const double total = mean * static_cast<double>(dom.active_cells());
  const double compat = scale > 0.0 ? std::abs(total) / scale : 0.0;
  NeumannSolution sol;
  sol.diagnostics.compatibility_residual = compat;
  if (compat > opts.compatibility_tolerance && !p.allow_projection)
    throw SolvabilityError("Neumann data incompatible: relative residual " + std::to_string(compat));
  for (std::size_t l = 0; l < f.size(); ++l)
    if (dom.inside(l)) f[l] -= mean;
  sol.diagnostics.projected_mean = mean;

  NeumannMethod method = opts.method;
  if (method == NeumannMethod::automatic)
    method = dom.is_cube() ? NeumannMethod::cosine_transform : NeumannMethod::multigrid_cg;
  if (method == NeumannMethod::cosine_transform) {
    if (dom.active_cells() != g.num_cells()) throw DomainError("cosine transform needs a full box");
    sol.diagnostics.method = "cosine_transform";
    solve_cosine(f, g, sol.u);
    const double m = active_mean(sol.u, dom);
    for (double& v : sol.u.values()) v -= m;
    Array3 lu = neumann_laplacian(sol.u, dom);
    for (std::size_t l = 0; l < lu.size(); ++l) lu[l] -= f[l];
    const double fn = active_norm(f, dom);
    sol.diagnostics.final_residual = fn > 0.0 ? active_norm(lu, dom) / fn : 0.0;
    sol.diagnostics.residual_history = {sol.diagnostics.final_residual};
  } else {
    sol.diagnostics.method = "multigrid_cg";
    solve_multigrid_cg(f, dom, opts, sol.u, sol.diagnostics);
  }
  return sol;
}

}  // namespace rigidlab
