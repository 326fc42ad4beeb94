#pragma once

#include "haldane/common.hpp"

namespace haldane {

struct KrylovOptions {
  int max_dim = 30;        // Krylov subspace size per substep
  double tol = 1e-12;      // per-substep truncation error target
  int max_substeps = 64;   // internal halving limit per call
};

// v <- exp(-i H t) v for Hermitian sparse H, by the Lanczos (Krylov)
// exponential with an a-posteriori error estimate and adaptive halving.
// Throws when the error budget cannot be met.
Vec krylov_expm_apply(const SparseMat& h, const Vec& v, double t,
                      const KrylovOptions& opts = {});

}  // namespace haldane
