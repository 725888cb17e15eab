#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rigidlab/calculus.hpp"
#include "rigidlab/div_curl.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/fitting.hpp"
#include "rigidlab/generators.hpp"

using namespace rigidlab;

namespace {

// Counterclockwise circulation of row r of beta around the rectangle of cell centers
// [i0, i1] x [j0, j1] in the plane (a, b), at cell index `fixed` along the third axis.
double circulation(const TensorField& beta, int r, int a, int b, int i0, int i1, int j0, int j1, int fixed) {
  const Grid& g = beta.grid();
  auto face = [&](int axis, int ia, int ib) {
    Index3 x{fixed, fixed, fixed};
    x[a] = ia;
    x[b] = ib;
    if (g.dim == 2) x[2] = 0;
    return beta(r, axis)(x);
  };
  const double ha = g.spacing[a], hb = g.spacing[b];
  double c = 0.0;
  for (int i = i0; i < i1; ++i) c += face(a, i + 1, j0) * ha;
  for (int j = j0; j < j1; ++j) c += face(b, i1, j + 1) * hb;
  for (int i = i1; i > i0; --i) c -= face(a, i, j1) * ha;
  for (int j = j1; j > j0; --j) c -= face(b, i0, j) * hb;
  return c;
}

// Flux of the rasterized curl through the same rectangle: interior nodes (edges) it encloses.
double enclosed_flux(const std::vector<Array3>& edges, const Grid& g, int r, int a, int b, int i0, int i1, int j0,
                     int j1, int fixed) {
  const int n = g.dim;
  const int lo = std::min(a, b), hi = std::max(a, b);
  const double sign = a < b ? 1.0 : -1.0;
  const Array3& e = edges[r * pair_count(n) + pair_index(n, lo, hi)];
  double s = 0.0;
  for (int i = i0 + 1; i <= i1; ++i)
    for (int j = j0 + 1; j <= j1; ++j) {
      Index3 x{fixed, fixed, fixed};
      x[a] = i;
      x[b] = j;
      if (n == 2) x[2] = 0;
      s += e(x);
    }
  return -sign * s * g.spacing[a] * g.spacing[b];
}

bool bit_identical(const TensorField& a, const TensorField& b) {
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (!(a(i, j) == b(i, j))) return false;
  return true;
}

}  // namespace

TEST_CASE("point dislocation circulations") {
  auto dom = Domain::unit_cube(2, 64);
  const std::array<double, 2> b{0.3, -0.8};
  const Point3 x0{33.2 / 64, 30.9 / 64, 0.0};
  const GeneratedCase g = gen_point_dislocation_2d(dom, b, x0);
  REQUIRE(g.measure.points.size() == 1);
  CHECK(g.measure.points[0].burgers[0] == b[0]);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> lo(1, 30), hi(34, 62);
  for (int t = 0; t < 50; ++t) {
    const int i0 = lo(rng), i1 = hi(rng), j0 = lo(rng), j1 = hi(rng);
    for (int r = 0; r < 2; ++r) CHECK(circulation(g.beta, r, 0, 1, i0, i1, j0, j1, 0) == doctest::Approx(b[r]).epsilon(1e-10));
  }
  std::uniform_int_distribution<int> far(40, 50);
  for (int t = 0; t < 20; ++t) {
    const int i0 = far(rng), j0 = far(rng);
    for (int r = 0; r < 2; ++r) CHECK(std::abs(circulation(g.beta, r, 0, 1, i0, i0 + 10, j0, j0 + 5, 0)) < 1e-12);
  }
}

TEST_CASE("point dislocation energy grows logarithmically") {
  auto dom = Domain::unit_cube(2, 512);
  const std::array<double, 2> b{1.0, 0.0};
  const Point3 x0{0.5, 0.5, 0.0};
  const GeneratedCase g = gen_point_dislocation_2d(dom, b, x0);
  const TensorField c = g.beta.to_cell_centered();
  const Grid& gr = dom->grid();
  auto energy = [&](double eps) {
    double e = 0.0;
    for_each_index(gr.cells, [&](int i, int j, int k) {
      const Point3 x = gr.cell_center(i, j, k);
      if (std::hypot(x[0] - x0[0], x[1] - x0[1]) <= eps) return;
      e += frobenius(c.cell_value(i, j, k)) * frobenius(c.cell_value(i, j, k)) * gr.cell_volume();
    });
    return e;
  };
  const double diff = energy(0.05) - energy(0.2);
  CHECK(diff == doctest::Approx(std::log(4.0) / (2 * std::numbers::pi)).epsilon(0.02));
}

TEST_CASE("point dislocation placement errors") {
  auto dom = Domain::unit_cube(2, 64);
  CHECK_THROWS_AS(gen_point_dislocation_2d(dom, {1, 0}, {2.0 / 64, 0.5, 0}), PlacementError);
  CHECK_THROWS_AS(gen_point_dislocation_2d(dom, {1, 0}, {32.5 / 64, 0.5, 0}), PlacementError);
}

TEST_CASE("screw dislocation circulation, TV and integrability") {
  auto dom = Domain::unit_cube(3, 32);
  for (int axis = 0; axis < 3; ++axis) {
    const GeneratedCase g = gen_screw_dislocation_3d(dom, 0.7, axis, {0.5, 0.5, 0.5});
    CHECK(total_variation(g.measure, *dom) == doctest::Approx(0.7));
    const int a = (axis + 1) % 3, b = (axis + 2) % 3;
    for (int fixed : {0, 13, 31}) {
      CHECK(circulation(g.beta, axis, a, b, 5, 25, 7, 27, fixed) == doctest::Approx(0.7).epsilon(1e-10));
      CHECK(std::abs(circulation(g.beta, (axis + 1) % 3, a, b, 5, 25, 7, 27, fixed)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(gen_screw_dislocation_3d(dom, 1.0, 2, {1.5, 0.5, 0.0}), DomainError);

  std::vector<double> norms;
  for (int N : {16, 32, 64}) {
    auto d = Domain::unit_cube(3, N);
    norms.push_back(lp_norm(gen_screw_dislocation_3d(d, 1.0, 2, {0.5, 0.5, 0.0}).beta, NormSpec::critical(3)));
  }
  CHECK(std::abs(norms[2] - norms[1]) <= 0.05 * norms[1]);
}

TEST_CASE("dislocation loops are closed and consistent") {
  auto dom = Domain::unit_cube(3, 16);
  const GeneratedCase g = gen_dislocation_loop_3d(dom, {0.2, -0.1, 0.3}, 1, {0.5, 0.5, 0.5}, 0.25);
  CHECK(g.measure.segments.size() == 4);
  const auto edges = rasterize(g.measure);
  CHECK(edge_divergence_violation(edges, dom->grid()) <= 1e-12);
  const auto curl = curl_edges(g.beta);
  double err = 0.0, scale = 0.0;
  for (std::size_t q = 0; q < edges.size(); ++q)
    for (std::size_t l = 0; l < edges[q].size(); ++l) {
      err = std::max(err, std::abs(curl[q][l] - edges[q][l]));
      scale = std::max(scale, std::abs(edges[q][l]));
    }
  CHECK(err <= 1e-8 * scale);
  // A lattice loop in the (1, 2) plane threads the side running along axis 0 at x1 = 1/2, x2 = 1/4.
  const double c = circulation(g.beta, 0, 1, 2, 5, 11, 1, 7, 8);
  CHECK(std::abs(std::abs(c) - 0.2) <= 1e-8);
}

TEST_CASE("compatible fields") {
  for (int n : {2, 3}) {
    auto dom = Domain::unit_cube(n, n == 2 ? 32 : 12);
    const TensorField id = gen_compatible(dom, 3, 0.0);
    CHECK(id.max_abs_difference(TensorField::constant(dom, Mat::Identity(n, n), Placement::staggered)) == 0.0);
    const TensorField b = gen_compatible(dom, 3, 0.4);
    double m = 0.0;
    for (const auto& e : curl_edges(b))
      for (double v : e.values()) m = std::max(m, std::abs(v));
    CHECK(m < 1e-10);
    // Near the identity the distance to SO(n) scales linearly with the amplitude.
    auto max_dist = [&](double a) {
      const TensorField f = gen_compatible(dom, 3, a).to_cell_centered();
      double d = 0.0;
      for_each_index(dom->grid().cells, [&](int i, int j, int k) { d = std::max(d, dist_SO(f.cell_value(i, j, k))); });
      return d;
    };
    const double d1 = max_dist(1e-3), d2 = max_dist(2e-3);
    CHECK(d1 > 0.0);
    CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(0.01));
  }
}

TEST_CASE("mixtures") {
  for (int n : {2, 3}) {
    auto dom = Domain::unit_cube(n, n == 2 ? 64 : 16);
    CaseSpec c;
    c.kind = CaseKind::mixture;
    c.dim = n;
    c.seed = 99;
    c.amplitude = 0.1;
    c.rotation = {0.3, -0.2, 0.5};
    const GeneratedCase none = generate(c, dom);
    CHECK(none.measure.empty());

    c.dislocations = 3;
    const GeneratedCase g = generate(c, dom);
    CHECK_FALSE(g.measure.empty());
    const GeneratedCase again = generate(c, dom);
    CHECK(bit_identical(g.beta, again.beta));

    // The field minus its dislocation part is compatible: curl beta equals the rasterized measure.
    const auto curl = curl_edges(g.beta);
    const auto edges = rasterize(g.measure);
    double err = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < edges.size(); ++q)
      for (std::size_t l = 0; l < edges[q].size(); ++l) {
        err = std::max(err, std::abs(curl[q][l] - edges[q][l]));
        scale = std::max(scale, std::abs(edges[q][l]));
      }
    CHECK(err <= 1e-8 * scale);
    if (n == 3) CHECK(edge_divergence_violation(edges, dom->grid()) <= 1e-12);

    // 50 random lattice loops: circulation of beta equals the enclosed rasterized flux.
    std::mt19937_64 rng(n);
    const int N = dom->grid().cells[0];
    std::uniform_int_distribution<int> pick(0, N - 1);
    for (int t = 0; t < 50; ++t) {
      int i0 = pick(rng), i1 = pick(rng), j0 = pick(rng), j1 = pick(rng);
      if (i0 == i1 || j0 == j1) continue;
      if (i0 > i1) std::swap(i0, i1);
      if (j0 > j1) std::swap(j0, j1);
      const int a = n == 2 ? 0 : t % 3, b = n == 2 ? 1 : (t + 1) % 3;
      const int fixed = n == 2 ? 0 : pick(rng);
      const int r = t % n;
      CHECK(circulation(g.beta, r, a, b, i0, i1, j0, j1, fixed) ==
            doctest::Approx(enclosed_flux(edges, dom->grid(), r, a, b, i0, i1, j0, j1, fixed)).epsilon(1e-8).scale(1.0));
    }

    // TV additivity over the singular parts.
    double sum = 0.0;
    for (const auto& p : g.measure.points) sum += std::hypot(p.burgers[0], p.burgers[1], p.burgers[2]);
    for (const auto& s : g.measure.segments) sum += s.weight(n).norm() * s.length();
    CHECK(total_variation(g.measure, *dom) == doctest::Approx(sum));
  }
}

TEST_CASE("generated cases are deterministic") {
  for (const CaseSpec& c : standard_corpus(3, 42)) {
    const GeneratedCase a = generate(c, 16), b = generate(c, 16);
    CHECK(bit_identical(a.beta, b.beta));
  }
  CHECK(standard_corpus(2, 1).size() == 30);
  CHECK(standard_corpus(3, 1, true).size() == 30);
  CHECK_THROWS_AS(standard_corpus(4, 1), DimensionError);
}

TEST_CASE("case specs round-trip through JSON") {
  CaseSpec c;
  c.id = "loop";
  c.kind = CaseKind::dislocation_loop_3d;
  c.seed = 0xFFFFFFFFFFFFFFFFull;
  c.burgers = {0.1, 0.2, 0.3};
  c.size = 0.125;
  const CaseSpec d = case_from_json(to_json(c));
  CHECK(d.id == c.id);
  CHECK(d.kind == c.kind);
  CHECK(d.seed == c.seed);
  CHECK(d.burgers == c.burgers);
  CHECK(d.size == c.size);

  nlohmann::json bad = to_json(c);
  bad["kind"] = "spiral";
  try {
    case_from_json(bad, "cases[3]");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "cases[3].kind");
  }
}
