#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "rigidlab/measure.hpp"

namespace rigidlab {

enum class CaseKind { rotation, gradient, edge_dislocation_2d, screw_dislocation_3d, dislocation_loop_3d, mixture };

const char* to_string(CaseKind k);
CaseKind case_kind_from_string(const std::string& s);

/// Reproducible description of a test field. Resolution is supplied at generation time.
struct CaseSpec {
  std::string id;
  CaseKind kind = CaseKind::rotation;
  int dim = 3;
  std::string domain = "cube";
  std::uint64_t seed = 0;
  /// Amplitude of the band-limited displacement.
  double amplitude = 0.0;
  /// Rotation parameters (angle in 2D, rotation vector in 3D) of the constant rotation.
  std::array<double, 3> rotation{0.0, 0.0, 0.0};
  /// Burgers vector (2D) or scalar Burgers weight in component 0 (screw lines).
  std::array<double, 3> burgers{0.0, 0.0, 0.0};
  /// Dislocation point, line position (transverse coordinates) or loop center.
  Point3 position{0.5, 0.5, 0.5};
  int axis = 2;
  /// Loop half-size.
  double size = 0.25;
  /// Random dislocations added by mixtures.
  int dislocations = 0;
  /// Linearized mixture W + a D psi + dislocations instead of R (I + a D psi + dislocations).
  bool linear = false;
};

nlohmann::json to_json(const CaseSpec& c);
/// Throws ParseError (with the field path) on malformed specs.
CaseSpec case_from_json(const nlohmann::json& j, const std::string& path = "case");

struct GeneratedCase {
  TensorField beta;
  IncompatibilityMeasure measure;
};

/// beta_i = (b_i / 2 pi) grad theta about x0, sampled on faces as exact line integrals along the
/// dual edges, so every discrete circulation is exact. Throws PlacementError when x0 is within
/// 4h of the boundary or within h/4 of a dual-grid line.
GeneratedCase gen_point_dislocation_2d(const DomainPtr& dom, const std::array<double, 2>& b, const Point3& x0);

/// Screw line parallel to `axis` through the transverse point `position`: the planar field in
/// row `axis`, constant along the line. Throws DomainError when the line misses the box.
GeneratedCase gen_screw_dislocation_3d(const DomainPtr& dom, double b, int axis, const Point3& position);

/// Closed square loop normal to `axis` with half-size `size`, Burgers vector b; the field is
/// the div-curl solution for the rasterized loop (box domains only).
GeneratedCase gen_dislocation_loop_3d(const DomainPtr& dom, const std::array<double, 3>& b, int axis,
                                      const Point3& center, double size);

/// beta = D(id + amplitude psi) for a band-limited random psi (staggered, curl-free).
TensorField gen_compatible(const DomainPtr& dom, std::uint64_t seed, double amplitude);
/// amplitude * D psi only.
TensorField gen_displacement_gradient(const DomainPtr& dom, std::uint64_t seed, double amplitude);

/// Any case kind, on `dom`.
GeneratedCase generate(const CaseSpec& spec, const DomainPtr& dom);
/// Same, on the named domain at resolution N.
GeneratedCase generate(const CaseSpec& spec, int resolution);
GeneratedCase gen_mixture(const CaseSpec& spec, const DomainPtr& dom);

/// 30 cases: rotations, compatible fields, single dislocations, mixtures. With `linear`, the
/// same corpus in the linearized (Korn) regime.
std::vector<CaseSpec> standard_corpus(int dim, std::uint64_t seed, bool linear = false);

}  // namespace rigidlab
