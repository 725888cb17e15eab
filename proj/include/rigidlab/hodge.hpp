#pragma once

#include <vector>

#include "rigidlab/div_curl.hpp"

namespace rigidlab {

/// Residuals measured after the split, all relative:
/// divergence = max |div Y| h / max |beta|, normal_trace = max |Y.n| / max |beta|,
/// curl_transfer = max |curl Y - curl beta| h / max |beta|.
struct HodgeResiduals {
  double divergence = 0.0;
  double normal_trace = 0.0;
  double curl_transfer = 0.0;
};

/// beta = Du + Y with div Y = 0 and Y.n = 0.
struct HodgeSplit {
  TensorField gradient_part;
  TensorField residual;
  CellVectorField potential;
  HodgeResiduals certified;
  std::vector<SolveDiagnostics> diagnostics;
};

/// Row-wise Neumann solve  Lap u_i = div beta_i,  d_n u_i = beta_i.n, using the staggered
/// normal components of beta on boundary faces as flux. Staggered input only.
HodgeSplit hodge_split(const TensorField& beta, const NeumannOptions& opts = {});

/// Recomputes the certified residuals of Y against beta.
HodgeResiduals certify_residual(const TensorField& beta, const TensorField& y);

/// ||Y||_{L^{1*}} / TV(curl Y). Throws PreconditionError when Y is not divergence-free
/// and tangential to `tolerance`, InconsistencyError when curl Y vanishes but Y does not.
double lemma_bb_ratio(const TensorField& y, double tolerance = 1e-6);

}  // namespace rigidlab
