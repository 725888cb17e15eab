#include "rigidlab/fields.hpp"

#include <cmath>

#include "rigidlab/errors.hpp"

namespace rigidlab {

const char* to_string(Placement p) {
  return p == Placement::staggered ? "staggered" : "cell_centered";
}

CellVectorField::CellVectorField(DomainPtr dom) : domain(std::move(dom)) {
  rows.assign(domain->dim(), Array3(domain->grid().cells, 0.0));
}

int CellVectorField::dim() const { return domain->dim(); }

TensorField::TensorField(DomainPtr domain, Placement placement)
    : domain_(std::move(domain)), placement_(placement) {
  if (!domain_) throw InputError("tensor field needs a domain");
  const int n = dim();
  const Grid& g = grid();
  comp_.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      comp_.emplace_back(placement == Placement::staggered ? g.face_extents(j) : g.cells, 0.0);
}

TensorField TensorField::constant(DomainPtr domain, const Mat& value, Placement placement) {
  TensorField f(std::move(domain), placement);
  const int n = f.dim();
  if (value.rows() != n || value.cols() != n) throw ShapeError("constant value has wrong size");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j).fill(value(i, j));
  return f;
}

Mat TensorField::cell_value(int c0, int c1, int c2) const {
  const int n = dim();
  Mat m(n, n);
  if (placement_ == Placement::cell_centered) {
    const std::size_t l = comp_[0].linear(c0, c1, c2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = comp_[i * n + j][l];
    return m;
  }
  const Index3 c{c0, c1, c2};
  for (int j = 0; j < n; ++j) {
    Index3 up = c;
    up[j] += 1;
    for (int i = 0; i < n; ++i) {
      const Array3& a = comp_[i * n + j];
      m(i, j) = 0.5 * (a(c) + a(up));
    }
  }
  return m;
}

TensorField TensorField::to_cell_centered() const {
  if (placement_ == Placement::cell_centered) return *this;
  TensorField out(domain_, Placement::cell_centered);
  const int n = dim();
  const Grid& g = grid();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Array3& a = comp_[i * n + j];
      Array3& o = out(i, j);
      for_each_index(g.cells, [&](int c0, int c1, int c2) {
        Index3 up{c0, c1, c2};
        up[j] += 1;
        o(c0, c1, c2) = 0.5 * (a(c0, c1, c2) + a(up));
      });
    }
  }
  return out;
}

void TensorField::check_compatible(const TensorField& other) const {
  if (!(grid() == other.grid())) throw ShapeError("fields live on different grids");
  if (placement_ != other.placement_) throw ShapeError("fields have different placements");
}

void TensorField::validate() const {
  const int n = dim();
  if (static_cast<int>(comp_.size()) != n * n) throw ShapeError("wrong number of components");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Index3 want = placement_ == Placement::staggered ? grid().face_extents(j) : grid().cells;
      const Array3& a = comp_[i * n + j];
      if (a.extents() != want) throw ShapeError("component shape does not match grid");
      for (double v : a.values())
        if (!std::isfinite(v)) throw InputError("tensor field has non-finite entries");
    }
}

TensorField& TensorField::operator+=(const TensorField& o) {
  check_compatible(o);
  for (std::size_t c = 0; c < comp_.size(); ++c) {
    auto a = comp_[c].values();
    auto b = o.comp_[c].values();
    for (std::size_t l = 0; l < a.size(); ++l) a[l] += b[l];
  }
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  check_compatible(o);
  for (std::size_t c = 0; c < comp_.size(); ++c) {
    auto a = comp_[c].values();
    auto b = o.comp_[c].values();
    for (std::size_t l = 0; l < a.size(); ++l) a[l] -= b[l];
  }
  return *this;
}

TensorField& TensorField::operator*=(double s) {
  for (auto& c : comp_)
    for (double& v : c.values()) v *= s;
  return *this;
}

TensorField TensorField::left_multiplied(const Mat& r) const {
  const int n = dim();
  if (r.rows() != n || r.cols() != n) throw ShapeError("row mixing matrix has wrong size");
  TensorField out(domain_, placement_);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto o = out(i, j).values();
      for (int m = 0; m < n; ++m) {
        const double w = r(i, m);
        if (w == 0.0) continue;
        auto a = comp_[m * n + j].values();
        for (std::size_t l = 0; l < o.size(); ++l) o[l] += w * a[l];
      }
    }
  return out;
}

TensorField TensorField::rebased(DomainPtr other) const {
  if (other->grid().cells != grid().cells || other->dim() != dim())
    throw ShapeError("rebased domain has a different grid shape");
  TensorField out(std::move(other), placement_);
  out.comp_ = comp_;
  return out;
}

double TensorField::max_abs_difference(const TensorField& o) const {
  check_compatible(o);
  double m = 0.0;
  for (std::size_t c = 0; c < comp_.size(); ++c) {
    auto a = comp_[c].values();
    auto b = o.comp_[c].values();
    for (std::size_t l = 0; l < a.size(); ++l) m = std::max(m, std::abs(a[l] - b[l]));
  }
  return m;
}

TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
TensorField operator*(double s, TensorField a) { return a *= s; }

}  // namespace rigidlab
