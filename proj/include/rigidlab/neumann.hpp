#pragma once

#include <string>
#include <vector>

#include "rigidlab/domain.hpp"

namespace rigidlab {

/// Discrete Neumann problem  Lap u = f in Omega,  d_n u = g on the boundary.
///
/// boundary_flux[j] is indexed like faces normal to axis j and holds the value of d_j u
/// (not the outward normal derivative) on boundary faces; other entries are ignored.
/// Empty flux arrays mean homogeneous data.
struct NeumannProblem {
  Array3 rhs;
  std::array<Array3, 3> boundary_flux;
  bool allow_projection = false;
};

enum class NeumannMethod { automatic, cosine_transform, multigrid_cg };

struct NeumannOptions {
  NeumannMethod method = NeumannMethod::automatic;
  double tolerance = 1e-10;
  int max_iterations = 500;
  double compatibility_tolerance = 1e-10;
};

struct SolveDiagnostics {
  std::string method;
  int iterations = 0;
  std::vector<double> residual_history;
  double final_residual = 0.0;
  double compatibility_residual = 0.0;
  /// Mean removed from the effective right-hand side to make it compatible.
  double projected_mean = 0.0;
};

struct NeumannSolution {
  Array3 u;
  SolveDiagnostics diagnostics;
};

/// Zero-mean solution over the domain cells. Cubes use a cosine transform, masks
/// conjugate gradients preconditioned by aggregation multigrid. Throws SolvabilityError
/// when the data are incompatible (and projection is off), ConvergenceError when CG stalls.
NeumannSolution solve_neumann(const NeumannProblem& p, const Domain& dom, const NeumannOptions& opts = {});

/// Laplacian with homogeneous Neumann data: face differences between active cells only.
Array3 neumann_laplacian(const Array3& u, const Domain& dom);

}  // namespace rigidlab
