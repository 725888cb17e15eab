#include "rigidlab/hodge.hpp"

#include <cmath>

#include "rigidlab/errors.hpp"
#include "rigidlab/norms.hpp"

namespace rigidlab {

namespace {

double max_abs(const TensorField& f) {
  double m = 0.0;
  const int n = f.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (double v : f(i, j).values()) m = std::max(m, std::abs(v));
  return m;
}

bool cell_active(const Domain& dom, const Index3& c) {
  const Grid& g = dom.grid();
  for (int a = 0; a < 3; ++a)
    if (c[a] < 0 || c[a] >= g.cells[a]) return false;
  return dom.inside(c);
}

// An interior edge whose surrounding cells all belong to the domain.
bool edge_active(const Domain& dom, int j, int k, const Index3& e) {
  for (int dj = -1; dj <= 0; ++dj)
    for (int dk = -1; dk <= 0; ++dk) {
      Index3 c = e;
      c[j] += dj;
      c[k] += dk;
      if (!cell_active(dom, c)) return false;
    }
  return true;
}

}  // namespace

HodgeResiduals certify_residual(const TensorField& beta, const TensorField& y) {
  beta.check_compatible(y);
  if (beta.placement() != Placement::staggered) throw PlacementError("hodge split needs a staggered field");
  const Domain& dom = beta.domain();
  const Grid& g = dom.grid();
  const int n = g.dim;
  const double h = g.min_spacing();
  const double scale = max_abs(beta);
  HodgeResiduals r;
  if (scale == 0.0) return r;

  const CellVectorField dy = div_rows(y);
  double dmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (std::size_t l = 0; l < dy.rows[i].size(); ++l)
      if (dom.inside(l)) dmax = std::max(dmax, std::abs(dy.rows[i][l]));
  r.divergence = dmax * h / scale;

  double tmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Array3& a = y(i, j);
      for_each_index(a.extents(), [&](int p, int q, int s) {
        const Index3 f{p, q, s};
        Index3 lo = f;
        lo[j] -= 1;
        const bool hi_in = cell_active(dom, f);
        const bool lo_in = cell_active(dom, lo);
        if (hi_in != lo_in) tmax = std::max(tmax, std::abs(a(f)));
      });
    }
  r.normal_trace = tmax / scale;

  const auto cy = curl_edges(y);
  const auto cb = curl_edges(beta);
  double cmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < pair_count(n); ++p) {
      const auto [j, k] = pair_axes(n, p);
      const Array3& a = cy[i * pair_count(n) + p];
      const Array3& b = cb[i * pair_count(n) + p];
      for_each_index(a.extents(), [&](int q, int s, int t) {
        const Index3 e{q, s, t};
        if (!edge_active(dom, j, k, e)) return;
        cmax = std::max(cmax, std::abs(a(e) - b(e)));
      });
    }
  r.curl_transfer = cmax * h / scale;
  return r;
}

HodgeSplit hodge_split(const TensorField& beta, const NeumannOptions& opts) {
  if (beta.placement() != Placement::staggered) throw PlacementError("hodge split needs a staggered field");
  beta.validate();
  const DomainPtr& dom = beta.domain_ptr();
  const int n = beta.dim();
  const CellVectorField d = div_rows(beta);
  HodgeSplit out{TensorField(dom, Placement::staggered), TensorField(dom, Placement::staggered),
                 CellVectorField(dom), {}, {}};
  for (int i = 0; i < n; ++i) {
    NeumannProblem prob;
    prob.rhs = d.rows[i];
    for (int j = 0; j < n; ++j) prob.boundary_flux[j] = beta(i, j);
    // The face sums telescope, so the data are compatible up to rounding; for nearly
    // divergence-free input the relative check would only measure that rounding.
    prob.allow_projection = true;
    NeumannSolution s = solve_neumann(prob, *dom, opts);
    out.potential.rows[i] = std::move(s.u);
    out.diagnostics.push_back(std::move(s.diagnostics));
  }
  out.gradient_part = masked_gradient(out.potential, &beta);
  out.residual = beta - out.gradient_part;
  out.certified = certify_residual(beta, out.residual);
  return out;
}

double lemma_bb_ratio(const TensorField& y, double tolerance) {
  const HodgeResiduals r = certify_residual(y, y);
  if (r.divergence > tolerance || r.normal_trace > tolerance)
    throw PreconditionError("field is not divergence-free and tangential (div " + std::to_string(r.divergence) +
                            ", trace " + std::to_string(r.normal_trace) + ")");
  const Domain& dom = y.domain();
  const double lhs = lp_norm(y, NormSpec::critical(dom.dim()));
  const double tv = total_variation(curl_general(y), dom);
  if (lhs == 0.0) return 0.0;
  const double l1 = lp_norm(y, NormSpec{1.0, false, nullptr});
  if (tv * dom.grid().min_spacing() <= tolerance * l1)
    throw InconsistencyError("curl vanishes on a nonzero divergence-free tangential field");
  return lhs / tv;
}

}  // namespace rigidlab
