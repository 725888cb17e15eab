// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "../support/oracles.hpp"
#include "rigidlab/calculus.hpp"
#include "rigidlab/covering.hpp"
#include "rigidlab/div_curl.hpp"
#include "rigidlab/experiment.hpp"
#include "rigidlab/fitting.hpp"
#include "rigidlab/generators.hpp"
#include "rigidlab/hodge.hpp"
#include "rigidlab/neumann.hpp"
#include "rigidlab/norms.hpp"
#include "rigidlab/report.hpp"

using namespace rigidlab;

namespace {

constexpr double pi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects the outcome of one criterion: every failed condition is kept as a note.
struct Verdict {
  bool ok = true;
  std::ostringstream notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
};

double drift(double a, double b) { return std::abs(b - a) / std::abs(a); }

double order(double coarse, double fine) { return std::log2(coarse / fine); }

TensorField random_staggered(const DomainPtr& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  TensorField f(dom, Placement::staggered);
  for (int i = 0; i < dom->dim(); ++i)
    for (int j = 0; j < dom->dim(); ++j)
      for (double& v : f(i, j).values()) v = d(rng);
  return f;
}

CellVectorField random_cells(const DomainPtr& dom, std::mt19937_64& rng, int margin) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  CellVectorField u(dom);
  const Grid& g = dom->grid();
  for (auto& row : u.rows)
    for_each_index(g.cells, [&](int i, int j, int k) {
      const Index3 c{i, j, k};
      bool inner = true;
      for (int a = 0; a < g.dim; ++a) inner = inner && c[a] >= margin && c[a] < g.cells[a] - margin;
      row(i, j, k) = inner ? d(rng) : 0.0;
    });
  return u;
}

double sum_sq(const TensorField& f) {
  double s = 0.0;
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < f.dim(); ++j)
      for (double v : f(i, j).values()) s += v * v;
  return s;
}

double max_abs(const TensorField& f) {
  double m = 0.0;
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < f.dim(); ++j)
      for (double v : f(i, j).values()) m = std::max(m, std::abs(v));
  return m;
}

double active_l2(const Array3& a, const Domain& dom) {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l)
    if (dom.inside(l)) s += a[l] * a[l];
  return std::sqrt(s * dom.grid().cell_volume());
}

double l2(const TensorField& f) { return lp_norm(f, {2.0, false, nullptr}); }

Mat rot(int n, double a, double b, double c) {
  const std::array<double, 3> th{a, b, c};
  return rotation_from_parameters(n, th);
}

// 1. Adjointness and curl of gradients on random staggered fields at 32^3.
Verdict operator_exactness() {
  Verdict v;
  const auto t0 = Clock::now();
  auto dom = Domain::unit_cube(3, 32);
  const double h = dom->grid().min_spacing();
  std::mt19937_64 rng(2024);
  double worst_adj = 0.0, worst_curl = 0.0;
  for (int t = 0; t < 100; ++t) {
    const TensorField beta = random_staggered(dom, rng);
    // Compact support keeps the one-sided boundary stencil out of the pairing.
    const CellVectorField u = random_cells(dom, rng, 3);
    const TensorField du = grad(u);
    const CellVectorField dv = div_rows(beta);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t r = 0; r < u.rows.size(); ++r)
      for (std::size_t l = 0; l < u.rows[r].size(); ++l) lhs += dv.rows[r][l] * u.rows[r][l];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (std::size_t l = 0; l < beta(i, j).size(); ++l) rhs -= beta(i, j)[l] * du(i, j)[l];
    worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / std::sqrt(sum_sq(beta) * sum_sq(du)));

    const CellVectorField w = random_cells(dom, rng, 0);
    const TensorField dw = grad(w);
    double curl = 0.0;
    for (const Array3& e : curl_edges(dw))
      for (double x : e.values()) curl = std::max(curl, std::abs(x));
    worst_curl = std::max(worst_curl, curl * h / max_abs(dw));
  }
  const double secs = seconds_since(t0);
  v.notes << "adjointness " << worst_adj << ", curl(grad) " << worst_curl << ", " << secs << " s";
  v.require(worst_adj <= 1e-12, "adjointness");
  v.require(worst_curl <= 1e-12, "curl of gradients");
  v.require(secs < 10.0, "runtime");
  return v;
}

// Divergence-free tangential field W = amp (psi_y, -psi_x, 0) per row, psi = sin^2(pi x) sin^2(pi y).
double psi_x(double x, double y) { return 2 * pi * std::sin(pi * x) * std::cos(pi * x) * std::pow(std::sin(pi * y), 2); }
double psi_y(double x, double y) { return psi_x(y, x); }
double psi_lap(double x, double y) {
  const double sx = std::sin(pi * x), sy = std::sin(pi * y);
  return 2 * pi * pi * (std::cos(2 * pi * x) * sy * sy + std::cos(2 * pi * y) * sx * sx);
}

// 2. Manufactured convergence for the Neumann and div-curl solvers on 16, 32, 64 cubed.
Verdict manufactured_convergence() {
  Verdict v;
  const auto t0 = Clock::now();
  std::vector<double> neumann, divcurl;
  for (int N : {16, 32, 64}) {
    auto dom = Domain::unit_cube(3, N);
    const Grid& g = dom->grid();
    auto u = [](const Point3& x) { return std::cos(pi * x[0]) * std::cos(pi * x[1]) * std::cos(pi * x[2]); };
    NeumannProblem p;
    p.rhs = sample_cells(g, [&](const Point3& x) { return -3 * pi * pi * u(x); });
    const NeumannSolution s = solve_neumann(p, *dom);
    Array3 diff = sample_cells(g, u);
    for (std::size_t l = 0; l < diff.size(); ++l) diff[l] -= s.u[l];
    neumann.push_back(active_l2(diff, *dom));

    // Edge data sampled from the analytic curl; only the pair (0, 1) is nonzero.
    std::vector<Array3> edges;
    for (int row = 0; row < 3; ++row)
      for (int q = 0; q < 3; ++q) {
        const auto [j, k] = pair_axes(3, q);
        Array3 e(g.edge_extents(j, k), 0.0);
        if (q == 0)
          for_each_index(e.extents(), [&](int a, int b, int c) {
            if (a < 1 || a >= g.cells[0] || b < 1 || b >= g.cells[1]) return;
            e(a, b, c) = (1.0 + row) * psi_lap(a * g.spacing[0], b * g.spacing[1]);
          });
        edges.push_back(std::move(e));
      }
    const DivCurlSolution z = solve_div_curl(edges, dom);
    TensorField w(dom, Placement::staggered);
    for (int row = 0; row < 3; ++row) {
      for_each_index(g.face_extents(0), [&](int a, int b, int c) {
        const Point3 x = face_center(g, 0, {a, b, c});
        w(row, 0)(a, b, c) = (1.0 + row) * psi_y(x[0], x[1]);
      });
      for_each_index(g.face_extents(1), [&](int a, int b, int c) {
        const Point3 x = face_center(g, 1, {a, b, c});
        w(row, 1)(a, b, c) = -(1.0 + row) * psi_x(x[0], x[1]);
      });
    }
    divcurl.push_back(l2(z.field - w));
  }
  const double secs = seconds_since(t0);
  const double on1 = order(neumann[0], neumann[1]), on2 = order(neumann[1], neumann[2]);
  const double od1 = order(divcurl[0], divcurl[1]), od2 = order(divcurl[1], divcurl[2]);
  v.notes << "Neumann orders " << on1 << ", " << on2 << "; div-curl orders " << od1 << ", " << od2 << ", " << secs
          << " s";
  v.require(std::min(on1, on2) >= 1.8, "Neumann order");
  v.require(std::min(od1, od2) >= 1.8, "div-curl order");
  v.require(secs < 120.0, "runtime");
  return v;
}

// Smooth face-sampled gradient of u_i = sin(x0 + i) cos(2 x1) (1 + x2).
TensorField smooth_gradient(const DomainPtr& dom) {
  const Grid& g = dom->grid();
  TensorField f(dom, Placement::staggered);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for_each_index(g.face_extents(j), [&](int a, int b, int c) {
        const Point3 x = face_center(g, j, {a, b, c});
        const double s = std::sin(x[0] + i), co = std::cos(2 * x[1]), z = 1 + x[2];
        double val = 0.0;
        if (j == 0) val = std::cos(x[0] + i) * co * z;
        if (j == 1) val = -2 * s * std::sin(2 * x[1]) * z;
        if (j == 2) val = s * co;
        f(i, j)(a, b, c) = val;
      });
  return f;
}

// 3. Hodge split certification on 20 mixed cases at 64^3 and recovery of known splits.
Verdict hodge_certification() {
  Verdict v;
  double div = 0.0, trace = 0.0, transfer = 0.0;
  for (int c = 0; c < 20; ++c) {
    CaseSpec spec;
    spec.kind = CaseKind::mixture;
    spec.dim = 3;
    spec.seed = 100 + c;
    spec.amplitude = 0.05 + 0.01 * c;
    spec.dislocations = 1 + c % 4;
    spec.rotation = {0.1 * c, -0.05 * c, 0.3};
    const HodgeSplit h = hodge_split(generate(spec, 64).beta);
    div = std::max(div, h.certified.divergence);
    trace = std::max(trace, h.certified.normal_trace);
    transfer = std::max(transfer, h.certified.curl_transfer);
  }
  std::vector<double> rel;
  for (int N : {16, 32, 64}) {
    auto dom = Domain::unit_cube(3, N);
    const TensorField beta = smooth_gradient(dom);
    rel.push_back(l2(hodge_split(beta).residual) / l2(beta));
  }
  // A known split: a discrete gradient plus a divergence-free tangential loop field.
  auto dom = Domain::unit_cube(3, 32);
  const GeneratedCase loop = gen_dislocation_loop_3d(dom, {0.0, 0.0, 1.0}, 1, {0.5, 0.5, 0.5}, 0.5);
  CellVectorField u(dom);
  for (int i = 0; i < 3; ++i)
    u.rows[i] = sample_cells(dom->grid(), [i](const Point3& x) { return std::cos(pi * x[i]) + x[(i + 1) % 3]; });
  const TensorField du = grad(u);
  const HodgeSplit known = hodge_split(du + loop.beta);
  const double rec = std::max(known.gradient_part.max_abs_difference(du), known.residual.max_abs_difference(loop.beta));
  const double o1 = order(rel[0], rel[1]), o2 = order(rel[1], rel[2]);
  v.notes << "div " << div << ", trace " << trace << ", curl transfer " << transfer << "; residual orders " << o1
          << ", " << o2 << "; known split error " << rec;
  v.require(div <= 1e-8, "divergence");
  v.require(trace <= 1e-8, "normal trace");
  v.require(transfer <= 1e-12, "curl transfer");
  v.require(std::min(o1, o2) >= 1.8, "gradient recovery order");
  v.require(rec <= 1e-8, "known split");
  return v;
}

// 4. Lemma ratio for a unit screw line on 32, 64, 128 cubed.
Verdict screw_boundedness() {
  Verdict v;
  const auto t0 = Clock::now();
  std::vector<double> r;
  for (int N : {32, 64, 128}) {
    auto dom = Domain::unit_cube(3, N);
    const GeneratedCase c = gen_screw_dislocation_3d(dom, 1.0, 2, {0.5, 0.5, 0.0});
    r.push_back(lemma_bb_ratio(hodge_split(c.beta).residual));
  }
  const double secs = seconds_since(t0);
  const double d = std::max(drift(r[0], r[1]), drift(r[1], r[2]));
  v.notes << "ratios " << r[0] << ", " << r[1] << ", " << r[2] << "; max drift " << 100 * d << "%, " << secs << " s";
  v.require(d <= 0.10, "drift");
  v.require(secs < 600.0, "runtime");
  return v;
}

// 5. Lemma ratio for a 2D point dislocation grows like sqrt(log N).
Verdict planar_failure() {
  Verdict v;
  std::vector<double> x, y, r;
  for (int N : {128, 256, 512, 1024}) {
    auto dom = Domain::unit_cube(2, N);
    const GeneratedCase c = gen_point_dislocation_2d(dom, {1.0, 0.0}, {0.5, 0.5, 0.0});
    r.push_back(lemma_bb_ratio(hodge_split(c.beta).residual));
    x.push_back(std::log(static_cast<double>(N)));
    y.push_back(r.back() * r.back());
  }
  bool increasing = true;
  for (std::size_t l = 1; l < r.size(); ++l) increasing = increasing && r[l] > r[l - 1];
  const AffineFit f = fit_affine(x, y);
  v.notes << "ratios " << r[0] << ", " << r[1] << ", " << r[2] << ", " << r[3] << "; ratio^2 vs log N slope " << f.slope
          << ", R^2 " << f.r2;
  v.require(increasing, "strictly increasing");
  v.require(f.r2 >= 0.95, "R^2");
  v.require(f.slope > 0.0, "positive slope");
  return v;
}

// Corpus maximum of a ratio at two resolutions; every ratio must be finite.
void corpus_stability(Verdict& v, const std::string& label, Theorem t, int dim, int coarse, int fine) {
  const std::vector<CaseSpec> corpus = standard_corpus(dim, 1, t == Theorem::korn);
  double max_c = 0.0, max_f = 0.0;
  bool finite = true;
  for (const CaseSpec& c : corpus)
    for (int N : {coarse, fine}) {
      const GeneratedCase g = generate(c, N);
      const InequalityReport r = t == Theorem::rigidity ? rigidity_report(g.beta, g.measure) : korn_report(g.beta, g.measure);
      if (!std::isfinite(r.ratio)) {
        finite = false;
        v.notes << " [" << c.id << " at N=" << N << " not finite]";
        continue;
      }
      (N == coarse ? max_c : max_f) = std::max(N == coarse ? max_c : max_f, r.ratio);
    }
  const double d = drift(max_c, max_f);
  v.notes << label << ": " << corpus.size() << " cases, max " << max_c << " -> " << max_f << ", drift " << 100 * d
          << "%; ";
  v.require(corpus.size() == 30, label + " corpus size");
  v.require(finite, label + " finite ratios");
  v.require(d <= 0.15, label + " drift");
}

// 6. Rigidity ratio stability over the 3D corpus.
Verdict rigidity_stability() {
  Verdict v;
  corpus_stability(v, "n=3", Theorem::rigidity, 3, 32, 64);
  return v;
}

// 7. Korn ratio stability in 2D (s = 2) and 3D (s = 3/2).
Verdict korn_stability() {
  Verdict v;
  corpus_stability(v, "n=2", Theorem::korn, 2, 32, 64);
  corpus_stability(v, "n=3", Theorem::korn, 3, 32, 64);
  return v;
}

// 8. Left-rotation and spatial-scaling invariance.
Verdict invariance() {
  Verdict v;
  double rot_dev = 0.0, scale_dev = 0.0;
  for (int n : {2, 3})
    for (std::uint64_t seed : {3u, 8u, 12u}) {
      CaseSpec c;
      c.kind = CaseKind::mixture;
      c.dim = n;
      c.seed = seed;
      c.amplitude = 0.1;
      c.dislocations = 2;
      const int N = n == 2 ? 32 : 16;
      const GeneratedCase g = generate(c, Domain::unit_cube(n, N));
      const InequalityReport a = rigidity_report(g.beta, g.measure);

      const Mat r1 = rot(n, 1.1 + 0.1 * seed, -0.7, 0.4);
      const InequalityReport b = rigidity_report(g.beta.left_multiplied(r1), g.measure.rotated_rows(r1));
      rot_dev = std::max(rot_dev, std::abs(a.ratio - b.ratio) / a.ratio);

      // beta_r(x) = beta(x / r) on the cube scaled by r: same samples, Burgers weights times r.
      const double r = 4.0;
      auto big = Domain::scaled_cube(n, {0.5 * r, 0.5 * r, 0.5 * r}, 0.5 * r, N);
      IncompatibilityMeasure m(big);
      for (auto p : g.measure.points) {
        for (auto& x : p.position) x *= r;
        for (auto& b2 : p.burgers) b2 *= r;
        m.points.push_back(p);
      }
      for (auto s : g.measure.segments) {
        for (auto& x : s.start) x *= r;
        for (auto& x : s.end) x *= r;
        for (auto& b2 : s.burgers) b2 *= r;
        m.segments.push_back(s);
      }
      if (g.measure.has_ac()) {
        m.init_ac(g.measure.ac_placement());
        for (int i = 0; i < n; ++i)
          for (int p = 0; p < pair_count(n); ++p) {
            m.ac(i, p) = g.measure.ac(i, p);
            for (double& x : m.ac(i, p).values()) x /= r;
          }
      }
      const InequalityReport s = rigidity_report(g.beta.rebased(big), m);
      scale_dev = std::max(scale_dev, drift(a.ratio, s.ratio));
    }
  v.notes << "left rotation " << rot_dev << ", scaling by 4 " << 100 * scale_dev << "%";
  v.require(rot_dev <= 1e-10, "left rotation");
  v.require(scale_dev <= 0.05, "scaling");
  return v;
}

// 9. Whitney covers on square, L-shape and ball masks.
Verdict covering() {
  Verdict v;
  for (int n : {2, 3})
    for (const std::string name : {"square", "lshape", "ball"}) {
      const int N = n == 2 ? 256 : 64;
      auto dom = Domain::named(name, n, N);
      const WhitneyCover c = whitney_cover(dom);
      const CoverCheck k = check_cover(c);
      const PartitionOfUnity p = partition_of_unity(c);
      bool window = true;
      for (const WhitneyCube& q : c.cubes) window = window && q.half_side <= q.distance && q.distance <= 6.0 * q.half_side;
      const std::string tag = name + " " + std::to_string(N) + "^" + std::to_string(n);
      v.notes << tag << ": " << c.cubes.size() << " cubes, |Dphi| r <= " << p.gradient_bound << "; ";
      v.require(k.chain && k.chain_violations == 0, tag + " chain");
      v.require(window && k.distance_window, tag + " distance window");
      v.require(p.sum_defect <= 1e-12, tag + " partition sum");
      v.require(p.gradient_sum_defect <= 1e-12, tag + " gradient sum");
      v.require(p.gradient_bound <= partition_gradient_constant, tag + " gradient bound");
    }
  return v;
}

// 10. Constructive pipeline against the direct fit.
Verdict pipeline() {
  Verdict v;
  double worst = 0.0, exact = 0.0;
  for (int n : {2, 3}) {
    auto dom = Domain::unit_cube(n, n == 2 ? 32 : 16);
    auto mask = Domain::l_shape(n, n == 2 ? 64 : 32);
    // Cubes go through the Hodge split, masks through the Whitney gluing.
    for (auto d : {dom, mask})
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TensorField beta = gen_compatible(d, seed, 0.1 + 0.05 * seed).left_multiplied(rot(n, 0.5, 0.1, 0.2 * seed));
        const PipelineResult p = theorem1_pipeline(beta, IncompatibilityMeasure(d));
        worst = std::max(worst, p.constructive.ratio / p.direct.ratio);
      }
    for (auto d : {dom, mask}) {
      const Mat r0 = rot(n, -0.8, 0.3, 0.6);
      const PipelineResult e = theorem1_pipeline(TensorField::constant(d, r0, Placement::cell_centered), IncompatibilityMeasure(d));
      exact = std::max(exact, e.constructive.lhs);
    }
  }
  v.notes << "constructive / direct <= " << worst << "; lhs on constant rotations " << exact;
  v.require(worst <= 2.0, "factor 2");
  v.require(exact <= 1e-12, "exact on rotations");
  return v;
}

// 11. Fits against brute-force parameter searches on 50 random fields each.
Verdict fitting_oracles() {
  Verdict v;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> eps(0.05, 0.5);
  int rot_bad = 0, skew_bad = 0;
  double rot_gap = 0.0, skew_gap = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = t % 2 == 0 ? 2 : 3;
    const double p = t % 4 < 2 ? critical_exponent(n) : 1.5 + (t % 3) * 0.5;
    const MatrixSamples s = oracle::noisy_rotation_samples(n, 24, eps(rng), rng);
    const RotationFit f = fit_rotation(s, p);
    // The 2D oracle walks a 1e-4 angle grid; the 3D oracle refines a coarse grid to 1e-8.
    const Mat g = n == 2 ? oracle::grid_rotation(s, p, 1e-4, 1e-4) : oracle::grid_rotation(s, p, 0.2, 1e-8);
    const double tol = n == 2 ? 2e-4 : 1e-6;
    const double gap = (f.rotation - g).norm();
    rot_gap = std::max(rot_gap, gap);
    if (gap > tol || lp_objective(s, f.rotation, p) > lp_objective(s, g, p) + 1e-12) ++rot_bad;

    const MatrixSamples r = oracle::random_samples(n, 24, rng);
    const double q = 1.5 + (t % 4) * 0.5;
    const Mat a = fit_antisymmetric(r, q);
    const Mat o = oracle::coordinate_antisymmetric(r, q);
    const double sgap = (a - o).norm();
    skew_gap = std::max(skew_gap, sgap);
    if (sgap > 1e-8 || (a + a.transpose()).norm() != 0.0) ++skew_bad;
  }
  v.notes << "rotation fits off the grid minimizer: " << rot_bad << " (max gap " << rot_gap
          << "); antisymmetric fits off the search: " << skew_bad << " (max gap " << skew_gap << ")";
  v.require(rot_bad == 0, "rotation fits");
  v.require(skew_bad == 0, "antisymmetric fits");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"operator exactness", operator_exactness},
      {"manufactured convergence", manufactured_convergence},
      {"Hodge split certification", hodge_certification},
      {"3D Lemma ratio bounded", screw_boundedness},
      {"2D Lemma ratio unbounded", planar_failure},
      {"rigidity ratio stability", rigidity_stability},
      {"Korn ratio stability", korn_stability},
      {"invariance", invariance},
      {"Whitney covering", covering},
      {"constructive pipeline", pipeline},
      {"fitting oracles", fitting_oracles},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[c].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.notes << "threw: " << e.what();
    }
    if (!v.ok) ++failed;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f s", seconds_since(t0));
    std::cout << (v.ok ? "PASS" : "FAIL") << " " << c + 1 << " " << criteria[c].first << " (" << secs << "): "
              << v.notes.str() << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
