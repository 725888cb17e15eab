#include "rigidlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rigidlab/errors.hpp"

namespace rigidlab {

NormSpec NormSpec::critical(int n) { return NormSpec{critical_exponent(n), false, nullptr}; }

double critical_exponent(int n) {
  if (n < 2) throw DimensionError("critical exponent needs n >= 2");
  return static_cast<double>(n) / (n - 1);
}

std::vector<double> cell_magnitudes(const TensorField& f) {
  const Grid& g = f.grid();
  std::vector<double> mags(g.num_cells(), 0.0);
  const int n = f.dim();
  if (f.placement() == Placement::cell_centered) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto a = f(i, j).values();
        for (std::size_t l = 0; l < mags.size(); ++l) mags[l] += a[l] * a[l];
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Array3& a = f(i, j);
        std::size_t l = 0;
        for_each_index(g.cells, [&](int c0, int c1, int c2) {
          Index3 up{c0, c1, c2};
          up[j] += 1;
          const double v = 0.5 * (a(c0, c1, c2) + a(up));
          mags[l++] += v * v;
        });
      }
  }
  for (double& m : mags) m = std::sqrt(m);
  return mags;
}

double lp_norm_of_magnitudes(std::span<const double> mags, const Domain& dom, const NormSpec& spec,
                             const CellBox* box) {
  if (!(spec.p >= 1.0)) throw InputError("norm exponent must be >= 1");
  const Grid& g = dom.grid();
  if (mags.size() != g.num_cells()) throw ShapeError("magnitudes do not match the domain grid");
  if (spec.weight && spec.weight->extents() != g.cells)
    throw ShapeError("norm weight is not defined on the field's grid");
  const double vol = g.cell_volume();

  std::vector<double> vals;
  std::vector<double> wts;
  vals.reserve(dom.active_cells());
  wts.reserve(dom.active_cells());
  std::size_t l = 0;
  for_each_index(g.cells, [&](int i, int j, int k) {
    const std::size_t cell = l++;
    if (!dom.inside(cell)) return;
    if (box && !box->contains(i, j, k)) return;
    const double w = spec.weight ? (*spec.weight)[cell] : 1.0;
    vals.push_back(mags[cell]);
    wts.push_back(w * vol);
  });

  if (!spec.weak) {
    std::vector<double> terms(vals.size());
    const bool two = spec.p == 2.0;
    for (std::size_t q = 0; q < vals.size(); ++q)
      terms[q] = wts[q] * (two ? vals[q] * vals[q] : std::pow(vals[q], spec.p));
    return std::pow(pairwise_sum(terms), 1.0 / spec.p);
  }

  std::vector<std::size_t> order(vals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  double best = 0.0;
  double measure = 0.0;
  for (std::size_t q = 0; q < order.size(); ++q) {
    measure += wts[order[q]];
    const double v = vals[order[q]];
    // Only evaluate at the end of a tie group: {|f| > t} for t just below v.
    if (q + 1 < order.size() && vals[order[q + 1]] == v) continue;
    best = std::max(best, v * std::pow(measure, 1.0 / spec.p));
  }
  return best;
}

double lp_norm(const TensorField& f, const NormSpec& spec) {
  const auto mags = cell_magnitudes(f);
  return lp_norm_of_magnitudes(mags, f.domain(), spec);
}

}  // namespace rigidlab
