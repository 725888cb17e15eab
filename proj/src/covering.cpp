#include "rigidlab/covering.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "rigidlab/errors.hpp"

namespace rigidlab {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

struct Builder {
  const Domain& dom;
  const Grid& g;
  const Array3& bd;
  WhitneyCover& cover;
  std::vector<std::uint8_t>& covered;

  bool any_inside(const CellBox& b) const {
    for (int i = b.lo[0]; i < b.hi[0]; ++i)
      for (int j = b.lo[1]; j < b.hi[1]; ++j)
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
          if (dom.inside(i, j, k)) return true;
    return false;
  }

  double box_distance(const CellBox& b) const {
    for (int a = 0; a < g.dim; ++a)
      if (b.lo[a] < 0 || b.hi[a] > g.cells[a]) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (int i = b.lo[0]; i < b.hi[0]; ++i)
      for (int j = b.lo[1]; j < b.hi[1]; ++j)
        for (int k = b.lo[2]; k < b.hi[2]; ++k) d = std::min(d, bd(i, j, k));
    return d;
  }

  void visit(const Index3& lo, int cells, int generation) {
    CellBox inner{lo, lo};
    CellBox outer{lo, lo};
    for (int a = 0; a < 3; ++a) {
      const int len = a < g.dim ? cells : 1;
      inner.hi[a] = lo[a] + len;
      const int pad = a < g.dim ? cells / 2 : 0;
      outer.lo[a] = lo[a] - pad;
      outer.hi[a] = lo[a] + len + pad;
    }
    if (!any_inside(inner)) return;
    const double h = g.spacing[0];
    const double r = cells * h;
    const double dist = box_distance(outer);
    if (dist >= cover.lower * r) {
      WhitneyCube q;
      q.half_side = r;
      q.generation = generation;
      q.inner = inner;
      q.outer = outer;
      q.distance = dist;
      for (int a = 0; a < g.dim; ++a) q.center[a] = g.origin[a] + (lo[a] + 0.5 * cells) * h;
      cover.cubes.push_back(q);
      for (int i = inner.lo[0]; i < inner.hi[0]; ++i)
        for (int j = inner.lo[1]; j < inner.hi[1]; ++j)
          for (int k = inner.lo[2]; k < inner.hi[2]; ++k) covered[dom.linear(i, j, k)] = 1;
      return;
    }
    if (cells <= 2) return;
    const int half = cells / 2;
    const int kz = g.dim == 3 ? 2 : 1;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < kz; ++c) visit({lo[0] + a * half, lo[1] + b * half, lo[2] + c * half}, half, generation + 1);
  }
};

bool boxes_overlap(const CellBox& a, const CellBox& b, int dim) {
  for (int q = 0; q < dim; ++q)
    if (a.hi[q] <= b.lo[q] || b.hi[q] <= a.lo[q]) return false;
  return true;
}

}  // namespace

WhitneyCover whitney_cover(const DomainPtr& dom) {
  const Grid& g = dom->grid();
  const int n = g.dim;
  for (int a = 0; a < n; ++a) {
    if (g.cells[a] != g.cells[0] || !is_power_of_two(g.cells[a]))
      throw InputError("Whitney cover needs N^n cells with N a power of two");
    if (g.spacing[a] != g.spacing[0]) throw InputError("Whitney cover needs isotropic spacing");
  }
  if (g.cells[0] < 4) throw ResolutionError("grid too coarse for a Whitney cover");
  WhitneyCover cover;
  cover.domain = dom;
  std::vector<std::uint8_t> covered(g.num_cells(), 0);
  Builder b{*dom, g, dom->boundary_distance(), cover, covered};
  b.visit({0, 0, 0}, g.cells[0], 0);

  const double h = g.spacing[0];
  cover.collar = (3.0 + 3.0 * std::sqrt(static_cast<double>(n))) * h;
  std::size_t interior = 0, interior_uncovered = 0;
  for (std::size_t l = 0; l < covered.size(); ++l) {
    if (!dom->inside(l)) continue;
    if (!covered[l]) ++cover.uncovered_cells;
    if (dom->boundary_distance()[l] >= cover.collar) {
      ++interior;
      if (!covered[l]) ++interior_uncovered;
    }
  }
  cover.uncovered_fraction = static_cast<double>(cover.uncovered_cells) / static_cast<double>(dom->active_cells());
  if (interior > 0 && static_cast<double>(interior_uncovered) > 1e-3 * static_cast<double>(interior))
    throw ResolutionError("Whitney cover leaves interior cells uncovered");
  if (cover.cubes.empty()) throw ResolutionError("domain too thin for a Whitney cover at this resolution");

  // Breadth-first sweep from the inner cubes hands every missed domain cell to a cube.
  std::vector<int> label(g.num_cells(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t j = 0; j < cover.cubes.size(); ++j) {
    const CellBox& b = cover.cubes[j].inner;
    for (int i = b.lo[0]; i < b.hi[0]; ++i)
      for (int a = b.lo[1]; a < b.hi[1]; ++a)
        for (int k = b.lo[2]; k < b.hi[2]; ++k) {
          const std::size_t l = dom->linear(i, a, k);
          if (label[l] < 0) {
            label[l] = static_cast<int>(j);
            queue.push_back(l);
          }
        }
  }
  cover.owner.assign(g.num_cells(), -1);
  while (!queue.empty()) {
    const std::size_t l = queue.front();
    queue.pop_front();
    const Index3 x{static_cast<int>(l / (g.cells[1] * g.cells[2])), static_cast<int>(l / g.cells[2] % g.cells[1]),
                   static_cast<int>(l % g.cells[2])};
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        Index3 y = x;
        y[a] += s;
        if (y[a] < 0 || y[a] >= g.cells[a] || !dom->inside(y)) continue;
        const std::size_t m = dom->linear(y[0], y[1], y[2]);
        if (label[m] >= 0) continue;
        label[m] = label[l];
        cover.owner[m] = label[l];
        queue.push_back(m);
      }
  }

  for (std::size_t j = 0; j < cover.cubes.size(); ++j)
    for (std::size_t k = j + 1; k < cover.cubes.size(); ++k)
      if (boxes_overlap(cover.cubes[j].outer, cover.cubes[k].outer, n)) {
        cover.cubes[j].neighbors.push_back(static_cast<int>(k));
        cover.cubes[k].neighbors.push_back(static_cast<int>(j));
      }
  return cover;
}

CoverCheck check_cover(const WhitneyCover& cover) {
  const Domain& dom = *cover.domain;
  const Grid& g = dom.grid();
  const int n = g.dim;
  CoverCheck c;
  std::vector<int> inner(g.num_cells(), 0), outer(g.num_cells(), 0);
  for (const auto& q : cover.cubes) {
    if (q.distance < cover.lower * q.half_side || q.distance > cover.upper * q.half_side) c.distance_window = false;
    for (int i = q.inner.lo[0]; i < q.inner.hi[0]; ++i)
      for (int j = q.inner.lo[1]; j < q.inner.hi[1]; ++j)
        for (int k = q.inner.lo[2]; k < q.inner.hi[2]; ++k) ++inner[dom.linear(i, j, k)];
    for (int i = std::max(0, q.outer.lo[0]); i < std::min(g.cells[0], q.outer.hi[0]); ++i)
      for (int j = std::max(0, q.outer.lo[1]); j < std::min(g.cells[1], q.outer.hi[1]); ++j)
        for (int k = std::max(0, q.outer.lo[2]); k < std::min(g.cells[2], q.outer.hi[2]); ++k)
          ++outer[dom.linear(i, j, k)];
    for (int nb : q.neighbors) {
      const double ratio = q.half_side / cover.cubes[nb].half_side;
      c.max_neighbor_ratio = std::max(c.max_neighbor_ratio, ratio);
    }
  }
  for (std::size_t l = 0; l < inner.size(); ++l) {
    const int j = cover.owner.empty() ? -1 : cover.owner[l];
    if (j < 0) continue;
    ++inner[l];
    const std::size_t per_row = static_cast<std::size_t>(g.cells[1]) * g.cells[2];
    const int x0 = static_cast<int>(l / per_row), x1 = static_cast<int>(l / g.cells[2] % g.cells[1]),
              x2 = static_cast<int>(l % g.cells[2]);
    if (!cover.cubes[j].outer.contains(x0, x1, x2)) ++outer[l];
  }
  const int bound = static_cast<int>(std::pow(3.0, n + 1));
  for (std::size_t l = 0; l < inner.size(); ++l) {
    c.max_multiplicity = std::max(c.max_multiplicity, outer[l]);
    c.max_inner_multiplicity = std::max(c.max_inner_multiplicity, inner[l]);
    const int chi = dom.inside(l) ? 1 : 0;
    const bool ok = chi <= inner[l] && inner[l] <= outer[l] && outer[l] <= bound * chi && inner[l] <= 1;
    if (!ok) {
      c.chain = false;
      ++c.chain_violations;
    }
  }
  return c;
}

std::string export_cover(const WhitneyCover& cover) {
  std::ostringstream os;
  os.precision(17);
  const int n = cover.domain->dim();
  for (std::size_t j = 0; j < cover.cubes.size(); ++j) {
    const auto& q = cover.cubes[j];
    os << "cube " << j << " center";
    for (int a = 0; a < n; ++a) os << ' ' << q.center[a];
    os << " half_side " << q.half_side << " generation " << q.generation << " distance " << q.distance
       << " neighbors";
    for (std::size_t k = 0; k < q.neighbors.size(); ++k) os << (k ? "," : " ") << q.neighbors[k];
    os << '\n';
  }
  return os.str();
}

PartitionOfUnity partition_of_unity(const WhitneyCover& cover) {
  const Domain& dom = *cover.domain;
  const Grid& g = dom.grid();
  const int n = g.dim;
  const std::size_t cells = g.num_cells();
  std::vector<std::vector<int>> members(cells);
  for (std::size_t j = 0; j < cover.cubes.size(); ++j) {
    const auto& q = cover.cubes[j];
    for (int i = std::max(0, q.outer.lo[0]); i < std::min(g.cells[0], q.outer.hi[0]); ++i)
      for (int a = std::max(0, q.outer.lo[1]); a < std::min(g.cells[1], q.outer.hi[1]); ++a)
        for (int k = std::max(0, q.outer.lo[2]); k < std::min(g.cells[2], q.outer.hi[2]); ++k)
          members[dom.linear(i, a, k)].push_back(static_cast<int>(j));
  }
  PartitionOfUnity pou;
  pou.start.assign(cells + 1, 0);
  pou.fallback.assign(cells, 0);
  std::size_t l = 0;
  for_each_index(g.cells, [&](int i, int a, int k) {
    const std::size_t cell = l++;
    const Point3 x = g.cell_center(i, a, k);
    std::vector<PartitionOfUnity::Entry> row;
    double sum = 0.0;
    std::array<double, 3> dsum{0.0, 0.0, 0.0};
    for (int j : members[cell]) {
      const auto& q = cover.cubes[j];
      std::array<double, 3> f{1.0, 1.0, 1.0}, df{0.0, 0.0, 0.0};
      for (int d = 0; d < n; ++d) {
        const double t = (x[d] - q.center[d]) / q.half_side;
        const double m = std::max(0.0, 1.0 - std::abs(t));
        f[d] = m * m;
        df[d] = -2.0 * m * (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0)) / q.half_side;
      }
      double b = 1.0;
      for (int d = 0; d < n; ++d) b *= f[d];
      if (b == 0.0) continue;
      std::array<double, 3> db{0.0, 0.0, 0.0};
      for (int d = 0; d < n; ++d) {
        double p = df[d];
        for (int e = 0; e < n; ++e)
          if (e != d) p *= f[e];
        db[d] = p;
      }
      row.push_back({j, b, db});
      sum += b;
      for (int d = 0; d < n; ++d) dsum[d] += db[d];
    }
    if (row.empty()) {
      if (!dom.inside(cell)) {
        pou.start[cell + 1] = pou.entries.size();
        return;
      }
      const int best = cover.owner[cell];
      if (best < 0) throw InputError("cover has no owner for an uncovered cell");
      pou.fallback[cell] = 1;
      pou.entries.push_back({best, 1.0, {0.0, 0.0, 0.0}});
      pou.start[cell + 1] = pou.entries.size();
      return;
    }
    double vsum = 0.0;
    std::array<double, 3> gsum{0.0, 0.0, 0.0};
    for (auto& e : row) {
      const double phi = e.value / sum;
      std::array<double, 3> dphi{0.0, 0.0, 0.0};
      for (int d = 0; d < n; ++d) dphi[d] = (e.gradient[d] - phi * dsum[d]) / sum;
      e.value = phi;
      e.gradient = dphi;
      vsum += phi;
      for (int d = 0; d < n; ++d) gsum[d] += dphi[d];
      if (dom.inside(cell)) {
        double gn = 0.0;
        for (int d = 0; d < n; ++d) gn += dphi[d] * dphi[d];
        pou.gradient_bound = std::max(pou.gradient_bound, std::sqrt(gn) * cover.cubes[e.cube].half_side);
      }
      pou.entries.push_back(e);
    }
    if (dom.inside(cell)) {
      pou.sum_defect = std::max(pou.sum_defect, std::abs(vsum - 1.0));
      double gn = 0.0;
      for (int d = 0; d < n; ++d) gn += gsum[d] * gsum[d];
      double scale = 0.0;
      for (const auto& e : row) scale = std::max(scale, 1.0 / cover.cubes[e.cube].half_side);
      pou.gradient_sum_defect = std::max(pou.gradient_sum_defect, std::sqrt(gn) / scale);
    }
    pou.start[cell + 1] = pou.entries.size();
  });
  return pou;
}

GluedField glue_rotations(const WhitneyCover& cover, const PartitionOfUnity& pou, const std::vector<Mat>& rotations,
                          const TensorField* beta) {
  if (rotations.size() != cover.cubes.size()) throw InputError("need one rotation per cube");
  const DomainPtr& dom = cover.domain;
  const Grid& g = dom->grid();
  const int n = g.dim;
  for (const auto& r : rotations)
    if (r.rows() != n || r.cols() != n) throw InputError("rotation has wrong size");
  GluedField out{TensorField(dom, Placement::cell_centered), std::vector<Tensor3>(g.num_cells()), 0.0};
  std::size_t l = 0;
  for_each_index(g.cells, [&](int i, int a, int k) {
    const std::size_t cell = l++;
    Tensor3& dr = out.gradient[cell];
    dr.n = n;
    if (!dom->inside(cell)) return;
    Mat r = Mat::Zero(n, n);
    const Mat m = beta ? beta->cell_value(i, a, k) : Mat(Mat::Identity(n, n));
    Tensor3 shifted;
    shifted.n = n;
    double scale = 0.0;
    for (const auto& e : pou.at(cell)) {
      const Mat& rj = rotations[e.cube];
      r += e.value * rj;
      scale = std::max(scale, 1.0 / cover.cubes[e.cube].half_side);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int d = 0; d < n; ++d) {
            dr(p, q, d) += e.gradient[d] * rj(p, q);
            shifted(p, q, d) += e.gradient[d] * (rj(p, q) - m(p, q));
          }
    }
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) out.value(p, q)(i, a, k) = r(p, q);
    double diff = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int d = 0; d < n; ++d) diff = std::max(diff, std::abs(dr(p, q, d) - shifted(p, q, d)));
    const double mnorm = std::max(1.0, m.norm());
    if (scale > 0.0) out.identity_residual = std::max(out.identity_residual, diff / (scale * mnorm));
  });
  return out;
}

namespace {

std::vector<Tensor3> difference_gradient(const TensorField& f) {
  const Domain& dom = f.domain();
  const Grid& g = dom.grid();
  const int n = g.dim;
  const TensorField c = f.to_cell_centered();
  std::vector<Tensor3> out(g.num_cells());
  std::size_t l = 0;
  for_each_index(g.cells, [&](int i, int a, int k) {
    Tensor3& t = out[l++];
    t.n = n;
    const Index3 x{i, a, k};
    if (!dom.inside(x)) return;
    for (int d = 0; d < n; ++d) {
      Index3 lo = x, hi = x;
      lo[d] -= 1;
      hi[d] += 1;
      const bool lo_in = lo[d] >= 0 && dom.inside(lo);
      const bool hi_in = hi[d] < g.cells[d] && dom.inside(hi);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const Array3& v = c(p, q);
          double der = 0.0;
          if (lo_in && hi_in) der = (v(hi) - v(lo)) / (2.0 * g.spacing[d]);
          else if (hi_in) der = (v(hi) - v(x)) / g.spacing[d];
          else if (lo_in) der = (v(x) - v(lo)) / g.spacing[d];
          t(p, q, d) = der;
        }
    }
  });
  return out;
}

}  // namespace

PoincareResult weighted_poincare(const TensorField& f, double s, const std::vector<Tensor3>* gradient) {
  if (!(s >= 1.0)) throw InputError("Poincare exponent must be >= 1");
  const Domain& dom = f.domain();
  const Grid& g = dom.grid();
  std::vector<Tensor3> own;
  if (!gradient) {
    own = difference_gradient(f);
    gradient = &own;
  }
  if (gradient->size() != g.num_cells()) throw ShapeError("gradient is not sampled on the field's grid");
  const MatrixSamples samples = collect_samples(f);
  PoincareResult res;
  res.mean = fit_constant(samples, s);
  res.numerator = lp_objective(samples, res.mean, s);
  const Array3& bd = dom.boundary_distance();
  std::vector<double> terms;
  const double vol = g.cell_volume();
  for (std::size_t l = 0; l < g.num_cells(); ++l) {
    if (!dom.inside(l)) continue;
    terms.push_back(vol * std::pow(bd[l] * (*gradient)[l].frobenius(), s));
  }
  res.denominator = pairwise_sum(terms);
  double scale = 0.0, wsum = 0.0;
  for (std::size_t c = 0; c < samples.values.size(); ++c) {
    scale += samples.weights[c] * std::pow(samples.values[c].norm(), s);
    wsum += samples.weights[c];
  }
  const double tiny = 1e-24 * std::max(scale, wsum);
  if (res.denominator <= tiny) {
    if (res.numerator <= tiny) {
      res.exact_constant = true;
      res.ratio = 0.0;
      return res;
    }
    throw DegenerateInputError("weighted gradient vanishes on a nonconstant field");
  }
  res.ratio = res.numerator / res.denominator;
  return res;
}

}  // namespace rigidlab
