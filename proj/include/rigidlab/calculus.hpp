#pragma once

#include <vector>

#include "rigidlab/measure.hpp"

namespace rigidlab {

enum class BoundaryRule { one_sided, reflected_ghost };

/// Finite-difference scheme: staggered placement gives compact differences onto faces;
/// cell-centered placement gives centered second-order differences at cell centers.
struct Stencil {
  Placement placement = Placement::staggered;
  BoundaryRule boundary = BoundaryRule::one_sided;
};

/// (Du)_{ij} = d_j u_i. On the staggered layout interior faces use the compact difference
/// and boundary faces a one-sided second-order stencil (or the mirrored ghost, giving 0).
TensorField grad(const CellVectorField& u, const Stencil& stencil = {});

/// (div beta)_i = sum_j d_j beta_{ij} at cell centers. Staggered input only; the result is
/// the exact negative adjoint of grad on fields vanishing on boundary faces.
CellVectorField div_rows(const TensorField& beta);

/// Discrete Curl on interior edges, m_{ijk} = d_k beta_{ij} - d_j beta_{ik}, stored per
/// [row][pair]. Boundary edges carry no unknown and are zero. Staggered input only.
std::vector<Array3> curl_edges(const TensorField& beta);

/// Curl as an (ac-only) measure: edge-based for staggered fields, centered differences
/// at cell centers otherwise.
IncompatibilityMeasure curl_general(const TensorField& beta);

/// alpha_{il} = sum_{jk} eps_{ljk} m_{ijk} at cell centers (ac part). |alpha| = sqrt(2) |m|
/// in the Frobenius norm. Throws DimensionError unless n = 3.
TensorField identify_alpha3(const IncompatibilityMeasure& m);

/// Even reflection across every face, convolution with the normalized bump
/// (1 - |x|^2/r^2)^4, restricted to the grid enlarged by ceil(r/h) cells per side.
/// Cube domains only; radius < h throws ResolutionError. Output is cell-centered.
TensorField extend_reflect_mollify(const TensorField& beta, double radius);

/// Samples a scalar function at cell centers.
template <class F>
Array3 sample_cells(const Grid& g, F&& f) {
  Array3 a(g.cells, 0.0);
  for_each_index(g.cells, [&](int i, int j, int k) { a(i, j, k) = f(g.cell_center(i, j, k)); });
  return a;
}

/// Location of face (axis, index) in space.
Point3 face_center(const Grid& g, int axis, const Index3& idx);

}  // namespace rigidlab
