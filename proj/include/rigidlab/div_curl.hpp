#pragma once

#include <vector>

#include "rigidlab/calculus.hpp"
#include "rigidlab/neumann.hpp"

namespace rigidlab {

/// div Z = 0, curl Z = f, Z.n = 0 on a box, row by row. In 2D f is the scalar
/// curl (pair (0,1)) at interior nodes and no divergence condition applies.
struct DivCurlProblem {
  IncompatibilityMeasure data;
  double divergence_tolerance = 1e-10;
};

struct DivCurlSolution {
  TensorField field;
  std::vector<SolveDiagnostics> diagnostics;
  /// Relative discrete divergence of the input edge data.
  double divergence_violation = 0.0;
};

/// Solves with the staggered field orthogonal to discrete gradients. Singular data are
/// rasterized first. Throws PreconditionError when the data are not divergence-free.
DivCurlSolution solve_div_curl(const DivCurlProblem& p, const NeumannOptions& opts = {});
/// Same, from edge data laid out as returned by rasterize/curl_edges.
DivCurlSolution solve_div_curl(const std::vector<Array3>& edges, DomainPtr dom,
                               double divergence_tolerance = 1e-10, const NeumannOptions& opts = {});

/// max_nodes |div f| h / max |f| over interior nodes (3D); 0 for n = 2 or f = 0.
double edge_divergence_violation(const std::vector<Array3>& edges, const Grid& g);

/// Staggered gradient of a cell potential using face differences between active cells;
/// faces on the boundary take `boundary` (or 0 when it is null).
TensorField masked_gradient(const CellVectorField& u, const TensorField* boundary);

}  // namespace rigidlab
