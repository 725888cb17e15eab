#include "rigidlab/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rigidlab/div_curl.hpp"
#include "rigidlab/errors.hpp"

namespace rigidlab {

using nlohmann::json;

const char* to_string(CaseKind k) {
  switch (k) {
    case CaseKind::rotation: return "rotation";
    case CaseKind::gradient: return "gradient";
    case CaseKind::edge_dislocation_2d: return "edge-dislocation-2d";
    case CaseKind::screw_dislocation_3d: return "screw-dislocation-3d";
    case CaseKind::dislocation_loop_3d: return "dislocation-loop-3d";
    case CaseKind::mixture: return "mixture";
  }
  return "rotation";
}

CaseKind case_kind_from_string(const std::string& s) {
  for (CaseKind k : {CaseKind::rotation, CaseKind::gradient, CaseKind::edge_dislocation_2d,
                     CaseKind::screw_dislocation_3d, CaseKind::dislocation_loop_3d, CaseKind::mixture})
    if (s == to_string(k)) return k;
  throw InputError("unknown case kind " + s);
}

json to_json(const CaseSpec& c) {
  return json{{"id", c.id},
              {"kind", to_string(c.kind)},
              {"dim", c.dim},
              {"domain", c.domain},
              {"seed", c.seed},
              {"amplitude", c.amplitude},
              {"rotation", c.rotation},
              {"burgers", c.burgers},
              {"position", c.position},
              {"axis", c.axis},
              {"size", c.size},
              {"dislocations", c.dislocations},
              {"linear", c.linear}};
}

CaseSpec case_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError("case must be an object", 0, path);
  CaseSpec c;
  auto field = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(out);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad value: ") + e.what(), 0, path + "." + key);
    }
  };
  field("id", c.id);
  std::string kind = to_string(c.kind);
  field("kind", kind);
  try {
    c.kind = case_kind_from_string(kind);
  } catch (const InputError& e) {
    throw ParseError(e.what(), 0, path + ".kind");
  }
  field("dim", c.dim);
  if (c.dim != 2 && c.dim != 3) throw ParseError("dim must be 2 or 3", 0, path + ".dim");
  field("domain", c.domain);
  field("seed", c.seed);
  field("amplitude", c.amplitude);
  if (c.amplitude < 0.0) throw ParseError("amplitude must be >= 0", 0, path + ".amplitude");
  field("rotation", c.rotation);
  field("burgers", c.burgers);
  field("position", c.position);
  field("axis", c.axis);
  if (c.axis < 0 || c.axis > 2) throw ParseError("axis must be 0, 1 or 2", 0, path + ".axis");
  field("size", c.size);
  field("dislocations", c.dislocations);
  field("linear", c.linear);
  return c;
}

namespace {

// Angle swept by p -> q seen from x0, in the plane of axes (j, k).
double swept_angle(const Point3& p, const Point3& q, const Point3& x0, int j, int k) {
  const double ux = p[j] - x0[j], uy = p[k] - x0[k];
  const double vx = q[j] - x0[j], vy = q[k] - x0[k];
  return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
}

// Fills row `row` of beta with (b / 2 pi) grad theta in the (j, k) plane about x0.
void planar_vortex(TensorField& beta, int row, double b, const Point3& x0, int j, int k) {
  const Grid& g = beta.grid();
  for (int axis : {j, k}) {
    Array3& a = beta(row, axis);
    const double h = g.spacing[axis];
    for_each_index(a.extents(), [&](int p, int q, int r) {
      Point3 lo = g.cell_center(p, q, r);
      lo[axis] -= h;
      Point3 hi = lo;
      hi[axis] += h;
      a(p, q, r) = b * swept_angle(lo, hi, x0, j, k) / (2.0 * std::numbers::pi * h);
    });
  }
}

void check_off_lattice(const Grid& g, const Point3& x0, int axis) {
  const double h = g.spacing[axis];
  const double t = (x0[axis] - g.origin[axis]) / h - 0.5;
  if (std::abs(t - std::round(t)) < 0.25) throw PlacementError("dislocation too close to a dual-grid line");
}

}  // namespace

GeneratedCase gen_point_dislocation_2d(const DomainPtr& dom, const std::array<double, 2>& b, const Point3& x0) {
  if (dom->dim() != 2) throw DimensionError("point dislocations live in 2D");
  const Grid& g = dom->grid();
  const Point3 hi = g.upper();
  for (int a = 0; a < 2; ++a) {
    if (x0[a] - g.origin[a] < 4.0 * g.spacing[a] || hi[a] - x0[a] < 4.0 * g.spacing[a])
      throw PlacementError("dislocation closer than 4h to the boundary");
    check_off_lattice(g, x0, a);
  }
  GeneratedCase out{TensorField(dom, Placement::staggered), IncompatibilityMeasure(dom)};
  for (int i = 0; i < 2; ++i) planar_vortex(out.beta, i, b[i], x0, 0, 1);
  out.measure.points.push_back({{x0[0], x0[1], 0.0}, {b[0], b[1], 0.0}});
  return out;
}

GeneratedCase gen_screw_dislocation_3d(const DomainPtr& dom, double b, int axis, const Point3& position) {
  if (dom->dim() != 3) throw DimensionError("screw lines live in 3D");
  if (axis < 0 || axis > 2) throw InputError("axis must be 0, 1 or 2");
  const Grid& g = dom->grid();
  const Point3 hi = g.upper();
  const int j = (axis + 1) % 3, k = (axis + 2) % 3;
  for (int a : {j, k}) {
    if (!(position[a] > g.origin[a] && position[a] < hi[a])) throw DomainError("screw line misses the domain");
    check_off_lattice(g, position, a);
  }
  GeneratedCase out{TensorField(dom, Placement::staggered), IncompatibilityMeasure(dom)};
  planar_vortex(out.beta, axis, b, position, j, k);
  SingularSegment s;
  s.start = position;
  s.end = position;
  s.start[axis] = g.origin[axis];
  s.end[axis] = hi[axis];
  s.burgers[axis] = b;
  out.measure.segments.push_back(s);
  return out;
}

GeneratedCase gen_dislocation_loop_3d(const DomainPtr& dom, const std::array<double, 3>& b, int axis,
                                      const Point3& center, double size) {
  if (dom->dim() != 3) throw DimensionError("loops live in 3D");
  const int j = (axis + 1) % 3, k = (axis + 2) % 3;
  IncompatibilityMeasure m(dom);
  const double dj[4] = {-1, 1, 1, -1}, dk[4] = {-1, -1, 1, 1};
  for (int q = 0; q < 4; ++q) {
    SingularSegment s;
    s.start = center;
    s.end = center;
    s.start[j] += dj[q] * size;
    s.start[k] += dk[q] * size;
    s.end[j] += dj[(q + 1) % 4] * size;
    s.end[k] += dk[(q + 1) % 4] * size;
    s.burgers = b;
    if (!dom->grid().contains_point(s.start)) throw DomainError("loop leaves the domain");
    m.segments.push_back(s);
  }
  DivCurlSolution z = solve_div_curl(rasterize(m), dom);
  return GeneratedCase{std::move(z.field), std::move(m)};
}

TensorField gen_displacement_gradient(const DomainPtr& dom, std::uint64_t seed, double amplitude) {
  if (amplitude < 0.0) throw InputError("amplitude must be >= 0");
  const Grid& g = dom->grid();
  const int n = g.dim;
  CellVectorField u(dom);
  if (amplitude > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    struct Mode {
      std::array<int, 3> k;
      double coef;
      double phase;
    };
    std::vector<std::vector<Mode>> modes(n);
    const int kz = n == 3 ? 2 : 0;
    double energy = 0.0;
    for (int i = 0; i < n; ++i)
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
          for (int c = -kz; c <= kz; ++c) {
            const int k2 = a * a + b * b + c * c;
            if (k2 == 0 || k2 > 8) continue;
            // half space: one of each +-k pair
            if (a < 0 || (a == 0 && b < 0) || (a == 0 && b == 0 && c < 0)) continue;
            const double kn = 2.0 * std::numbers::pi * std::sqrt(static_cast<double>(k2));
            const double coef = normal(rng) / kn;
            modes[i].push_back({{a, b, c}, coef, phase(rng)});
            energy += 0.5 * coef * coef * kn * kn;
          }
    const double scale = amplitude / std::sqrt(energy);
    double side[3] = {1.0, 1.0, 1.0};
    for (int a = 0; a < n; ++a) side[a] = g.cells[a] * g.spacing[a];
    for (int i = 0; i < n; ++i)
      for_each_index(g.cells, [&](int p, int q, int r) {
        const Point3 x = g.cell_center(p, q, r);
        double v = 0.0;
        for (const auto& m : modes[i]) {
          double arg = m.phase;
          for (int a = 0; a < n; ++a) arg += 2.0 * std::numbers::pi * m.k[a] * (x[a] - g.origin[a]) / side[a];
          v += m.coef * std::cos(arg);
        }
        u.rows[i](p, q, r) = scale * v * side[0];
      });
  }
  return grad(u);
}

TensorField gen_compatible(const DomainPtr& dom, std::uint64_t seed, double amplitude) {
  TensorField beta = gen_displacement_gradient(dom, seed, amplitude);
  const int n = dom->dim();
  beta += TensorField::constant(dom, Mat::Identity(n, n), Placement::staggered);
  return beta;
}

namespace {

std::uint64_t mix_seed(std::uint64_t s, std::uint64_t salt) {
  std::uint64_t z = s + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Mat base_matrix(const CaseSpec& spec, int n) {
  const int k = skew_parameter_count(n);
  std::span<const double> t(spec.rotation.data(), k);
  return spec.linear ? skew_from_parameters(n, t) : rotation_from_parameters(n, t);
}

// Dislocation part (without the identity) of a single-defect case.
GeneratedCase defect(const CaseSpec& spec, const DomainPtr& dom) {
  switch (spec.kind) {
    case CaseKind::edge_dislocation_2d:
      return gen_point_dislocation_2d(dom, {spec.burgers[0], spec.burgers[1]}, spec.position);
    case CaseKind::screw_dislocation_3d:
      return gen_screw_dislocation_3d(dom, spec.burgers[0], spec.axis, spec.position);
    case CaseKind::dislocation_loop_3d:
      return gen_dislocation_loop_3d(dom, spec.burgers, spec.axis, spec.position, spec.size);
    default:
      return GeneratedCase{TensorField(dom, Placement::staggered), IncompatibilityMeasure(dom)};
  }
}

// beta = R (I + part) with measure R m, or W + part with measure m.
GeneratedCase assemble(const CaseSpec& spec, const DomainPtr& dom, GeneratedCase part) {
  const int n = dom->dim();
  const Mat base = base_matrix(spec, n);
  if (spec.linear) {
    part.beta += TensorField::constant(dom, base, Placement::staggered);
    return part;
  }
  part.beta += TensorField::constant(dom, Mat::Identity(n, n), Placement::staggered);
  return GeneratedCase{part.beta.left_multiplied(base), part.measure.rotated_rows(base)};
}

}  // namespace

GeneratedCase gen_mixture(const CaseSpec& spec, const DomainPtr& dom) {
  const int n = dom->dim();
  GeneratedCase part{gen_displacement_gradient(dom, spec.seed, spec.amplitude), IncompatibilityMeasure(dom)};
  std::mt19937_64 rng(mix_seed(spec.seed, 7));
  std::uniform_int_distribution<int> slot(2, 6);
  std::uniform_int_distribution<int> axis(0, 2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double b0 = spec.burgers[0] != 0.0 ? std::abs(spec.burgers[0]) : 0.1;
  for (int d = 0; d < spec.dislocations; ++d) {
    CaseSpec one = spec;
    one.burgers = {b0 * unit(rng), b0 * unit(rng), b0 * unit(rng)};
    if (n == 2) {
      one.kind = CaseKind::edge_dislocation_2d;
      one.position = {slot(rng) / 8.0, slot(rng) / 8.0, 0.0};
    } else if (d % 2 == 0 || !dom->is_cube()) {
      one.kind = CaseKind::screw_dislocation_3d;
      one.axis = axis(rng);
      one.position = {slot(rng) / 8.0, slot(rng) / 8.0, slot(rng) / 8.0};
    } else {
      one.kind = CaseKind::dislocation_loop_3d;
      one.axis = axis(rng);
      one.position = {0.5, 0.5, slot(rng) / 8.0};
      one.position[one.axis] = slot(rng) / 8.0;
      one.size = 0.125 * (1 + (d % 2));
    }
    GeneratedCase g = defect(one, dom);
    part.beta += g.beta;
    part.measure += g.measure;
  }
  return assemble(spec, dom, std::move(part));
}

GeneratedCase generate(const CaseSpec& spec, const DomainPtr& dom) {
  if (spec.dim != dom->dim()) throw DimensionError("case dimension does not match domain");
  switch (spec.kind) {
    case CaseKind::rotation:
      return assemble(spec, dom, GeneratedCase{TensorField(dom, Placement::staggered), IncompatibilityMeasure(dom)});
    case CaseKind::gradient:
      return assemble(spec, dom,
                      GeneratedCase{gen_displacement_gradient(dom, spec.seed, spec.amplitude), IncompatibilityMeasure(dom)});
    case CaseKind::mixture:
      return gen_mixture(spec, dom);
    default: {
      GeneratedCase part = defect(spec, dom);
      if (spec.amplitude > 0.0) part.beta += gen_displacement_gradient(dom, spec.seed, spec.amplitude);
      return assemble(spec, dom, std::move(part));
    }
  }
}

GeneratedCase generate(const CaseSpec& spec, int resolution) {
  return generate(spec, Domain::named(spec.domain, spec.dim, resolution));
}

std::vector<CaseSpec> standard_corpus(int dim, std::uint64_t seed, bool linear) {
  if (dim != 2 && dim != 3) throw DimensionError("corpus needs n = 2 or 3");
  std::mt19937_64 rng(mix_seed(seed, 1));
  std::uniform_real_distribution<double> angle(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.05, 0.2);
  std::uniform_int_distribution<int> slot(3, 5);
  std::vector<CaseSpec> out;
  auto base = [&](CaseKind kind, const std::string& id) {
    CaseSpec c;
    c.id = id;
    c.kind = kind;
    c.dim = dim;
    c.linear = linear;
    c.seed = mix_seed(seed, out.size() + 100);
    const double scale = linear ? 0.2 : 1.0;
    for (int q = 0; q < skew_parameter_count(dim); ++q) c.rotation[q] = scale * angle(rng);
    return c;
  };
  for (int q = 0; q < 6; ++q) {
    CaseSpec c = base(CaseKind::rotation, "rotation-" + std::to_string(q));
    if (q == 0) c.rotation = {0.0, 0.0, 0.0};
    out.push_back(c);
  }
  const double amps[8] = {0.02, 0.05, 0.08, 0.1, 0.15, 0.2, 0.25, 0.3};
  for (int q = 0; q < 8; ++q) {
    CaseSpec c = base(CaseKind::gradient, "gradient-" + std::to_string(q));
    c.amplitude = amps[q];
    out.push_back(c);
  }
  for (int q = 0; q < 8; ++q) {
    CaseSpec c;
    if (dim == 2) {
      c = base(CaseKind::edge_dislocation_2d, "edge-" + std::to_string(q));
      c.position = {slot(rng) / 8.0, slot(rng) / 8.0, 0.0};
      c.burgers = {weight(rng), weight(rng) * angle(rng), 0.0};
    } else if (q < 4) {
      c = base(CaseKind::screw_dislocation_3d, "screw-" + std::to_string(q));
      c.axis = q % 3;
      c.position = {slot(rng) / 8.0, slot(rng) / 8.0, slot(rng) / 8.0};
      c.burgers = {weight(rng), 0.0, 0.0};
    } else {
      c = base(CaseKind::dislocation_loop_3d, "loop-" + std::to_string(q));
      c.axis = q % 3;
      c.position = {0.5, 0.5, 0.5};
      c.size = q % 2 ? 0.25 : 0.125;
      c.burgers = {weight(rng) * angle(rng), weight(rng) * angle(rng), weight(rng)};
    }
    out.push_back(c);
  }
  for (int q = 0; q < 8; ++q) {
    CaseSpec c = base(CaseKind::mixture, "mixture-" + std::to_string(q));
    c.amplitude = amps[q] * 0.5;
    c.dislocations = 1 + q % 3;
    c.burgers = {weight(rng), 0.0, 0.0};
    out.push_back(c);
  }
  return out;
}

}  // namespace rigidlab
