#include "rigidlab/measure.hpp"

#include <algorithm>
#include <cmath>

#include "rigidlab/errors.hpp"

namespace rigidlab {

double SingularSegment::length() const {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += (end[a] - start[a]) * (end[a] - start[a]);
  return std::sqrt(s);
}

Mat SingularSegment::weight(int n) const {
  const double len = length();
  Mat w = Mat::Zero(n, n);
  if (len == 0.0) return w;
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) w(i, l) = burgers[i] * (end[l] - start[l]) / len;
  return w;
}

IncompatibilityMeasure::IncompatibilityMeasure(DomainPtr domain) : domain_(std::move(domain)) {
  if (!domain_) throw InputError("measure needs a domain");
}

void IncompatibilityMeasure::init_ac(Placement placement) {
  ac_placement_ = placement;
  ac_.clear();
  const int n = dim();
  const Grid& g = domain_->grid();
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < pair_count(n); ++p) {
      const auto ab = pair_axes(n, p);
      ac_.emplace_back(placement == Placement::staggered ? g.edge_extents(ab[0], ab[1]) : g.cells,
                       0.0);
    }
}

Tensor3 IncompatibilityMeasure::cell_tensor(int c0, int c1, int c2) const {
  const int n = dim();
  Tensor3 t;
  t.n = n;
  if (ac_.empty()) return t;
  const Index3 c{c0, c1, c2};
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < pair_count(n); ++p) {
      const auto [a, b] = pair_axes(n, p);
      const Array3& e = ac(i, p);
      double v;
      if (ac_placement_ == Placement::cell_centered) {
        v = e(c);
      } else {
        Index3 q = c;
        v = e(q);
        q[a] += 1;
        v += e(q);
        q[b] += 1;
        v += e(q);
        q[a] -= 1;
        v += e(q);
        v *= 0.25;
      }
      t(i, a, b) = v;
      t(i, b, a) = -v;
    }
  return t;
}

bool IncompatibilityMeasure::empty() const {
  if (!points.empty() || !segments.empty()) return false;
  for (const auto& a : ac_)
    for (double v : a.values())
      if (v != 0.0) return false;
  return true;
}

IncompatibilityMeasure& IncompatibilityMeasure::operator+=(const IncompatibilityMeasure& o) {
  if (!(domain_->grid() == o.domain_->grid())) throw ShapeError("measures on different grids");
  if (o.has_ac()) {
    if (!has_ac()) {
      ac_placement_ = o.ac_placement_;
      ac_ = o.ac_;
    } else {
      if (ac_placement_ != o.ac_placement_) throw PlacementError("ac parts have different placements");
      for (std::size_t c = 0; c < ac_.size(); ++c) {
        auto x = ac_[c].values();
        auto y = o.ac_[c].values();
        for (std::size_t l = 0; l < x.size(); ++l) x[l] += y[l];
      }
    }
  }
  points.insert(points.end(), o.points.begin(), o.points.end());
  segments.insert(segments.end(), o.segments.begin(), o.segments.end());
  return *this;
}

IncompatibilityMeasure IncompatibilityMeasure::rotated_rows(const Mat& r) const {
  const int n = dim();
  IncompatibilityMeasure out(domain_);
  if (has_ac()) {
    out.init_ac(ac_placement_);
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < pair_count(n); ++p) {
        auto o = out.ac(i, p).values();
        for (int m = 0; m < n; ++m) {
          auto x = ac(m, p).values();
          for (std::size_t l = 0; l < o.size(); ++l) o[l] += r(i, m) * x[l];
        }
      }
  }
  auto rotate = [&](const std::array<double, 3>& b) {
    std::array<double, 3> rb{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) rb[i] += r(i, m) * b[m];
    return rb;
  };
  for (auto pt : points) {
    pt.burgers = rotate(pt.burgers);
    out.points.push_back(pt);
  }
  for (auto s : segments) {
    s.burgers = rotate(s.burgers);
    out.segments.push_back(s);
  }
  return out;
}

namespace {

double burgers_norm(const std::array<double, 3>& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += b[i] * b[i];
  return std::sqrt(s);
}

Index3 cell_of_point(const Grid& g, const Point3& p) {
  Index3 c{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    int idx = static_cast<int>(std::floor((p[a] - g.origin[a]) / g.spacing[a]));
    c[a] = std::clamp(idx, 0, g.cells[a] - 1);
  }
  return c;
}

// Length of the part of a segment lying in domain cells (and in `box`, if given).
double clipped_length(const SingularSegment& s, const Domain& dom, const CellBox* box) {
  const Grid& g = dom.grid();
  const int n = g.dim;
  std::vector<double> cuts{0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    const double d = s.end[a] - s.start[a];
    if (d == 0.0) continue;
    for (int m = 0; m <= g.cells[a]; ++m) {
      const double t = (g.origin[a] + m * g.spacing[a] - s.start[a]) / d;
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  const double len = s.length();
  double total = 0.0;
  for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
    const double t0 = cuts[q], t1 = cuts[q + 1];
    if (t1 <= t0) continue;
    Point3 mid{0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a) mid[a] = s.start[a] + 0.5 * (t0 + t1) * (s.end[a] - s.start[a]);
    const Index3 c = cell_of_point(g, mid);
    if (!dom.inside(c)) continue;
    if (box && !box->contains(c[0], c[1], c[2])) continue;
    total += (t1 - t0) * len;
  }
  return total;
}

}  // namespace

double total_variation(const IncompatibilityMeasure& m, const Domain& dom) {
  return total_variation(m, dom, nullptr);
}

double total_variation(const IncompatibilityMeasure& m, const Domain& dom, const CellBox* box) {
  const Grid& g = dom.grid();
  if (!(g == m.domain().grid())) throw ShapeError("measure is not defined over this domain");
  const int n = g.dim;
  double tv = 0.0;
  if (m.has_ac()) {
    std::vector<double> terms;
    terms.reserve(dom.active_cells());
    const double vol = g.cell_volume();
    std::size_t l = 0;
    for_each_index(g.cells, [&](int i, int j, int k) {
      const std::size_t cell = l++;
      if (!dom.inside(cell)) return;
      if (box && !box->contains(i, j, k)) return;
      terms.push_back(vol * m.cell_tensor(i, j, k).norm());
    });
    tv += pairwise_sum(terms);
  }
  const double slack = 1e-12 * g.min_spacing();
  for (const auto& pt : m.points) {
    if (!g.contains_point(pt.position, slack)) throw DomainError("point incompatibility outside domain");
    const Index3 c = cell_of_point(g, pt.position);
    if (!dom.inside(c)) throw DomainError("point incompatibility outside domain");
    if (box && !box->contains(c[0], c[1], c[2])) continue;
    tv += burgers_norm(pt.burgers, n);
  }
  for (const auto& s : m.segments) {
    if (!g.contains_point(s.start, slack) || !g.contains_point(s.end, slack))
      throw DomainError("dislocation segment leaves the domain");
    tv += burgers_norm(s.burgers, n) * clipped_length(s, dom, box);
  }
  return tv;
}

std::vector<Array3> rasterize(const IncompatibilityMeasure& m) {
  const Grid& g = m.domain().grid();
  const int n = g.dim;
  const int np = pair_count(n);
  std::vector<Array3> edges;
  if (m.has_ac()) {
    if (m.ac_placement() != Placement::staggered)
      throw PlacementError("only edge-based ac parts can be rasterized");
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < np; ++p) edges.push_back(m.ac(i, p));
  } else {
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < np; ++p) {
        const auto ab = pair_axes(n, p);
        edges.emplace_back(g.edge_extents(ab[0], ab[1]), 0.0);
      }
  }
  auto node_index = [&](int axis, double x, int& out) {
    const double t = (x - g.origin[axis]) / g.spacing[axis];
    out = static_cast<int>(std::lround(t));
    return out >= 1 && out <= g.cells[axis] - 1;
  };

  if (n == 2) {
    if (!m.segments.empty()) throw DimensionError("2D measures carry points, not segments");
    for (const auto& pt : m.points) {
      int a0, a1;
      if (!node_index(0, pt.position[0], a0) || !node_index(1, pt.position[1], a1)) continue;
      const double scale = 1.0 / (g.spacing[0] * g.spacing[1]);
      for (int i = 0; i < 2; ++i) edges[i * np](a0, a1, 0) -= pt.burgers[i] * scale;
    }
    return edges;
  }

  if (!m.points.empty()) throw DimensionError("3D measures carry segments, not points");
  for (const auto& s : m.segments) {
    for (int l = 0; l < 3; ++l) {
      const double d = s.end[l] - s.start[l];
      if (d == 0.0) continue;
      const int j = l == 0 ? 1 : 0;
      const int k = l == 2 ? 1 : 2;
      const int p = pair_index(3, j, k);
      const double sign = (d > 0.0 ? 1.0 : -1.0) * levi_civita(l, j, k);
      const double scale = 1.0 / (g.spacing[j] * g.spacing[k]);
      for (int c = 0; c < g.cells[l]; ++c) {
        const double plane = g.origin[l] + (c + 0.5) * g.spacing[l];
        const double t = (plane - s.start[l]) / d;
        if (t < 0.0 || t >= 1.0) continue;
        int aj, ak;
        if (!node_index(j, s.start[j] + t * (s.end[j] - s.start[j]), aj)) continue;
        if (!node_index(k, s.start[k] + t * (s.end[k] - s.start[k]), ak)) continue;
        Index3 e{0, 0, 0};
        e[l] = c;
        e[j] = aj;
        e[k] = ak;
        for (int i = 0; i < 3; ++i) edges[i * np + p](e) -= sign * s.burgers[i] * scale;
      }
    }
  }
  return edges;
}

}  // namespace rigidlab
