#pragma once

#include <functional>

#include "haldane/common.hpp"

namespace haldane {

struct LanczosOptions {
  int k = 1;                  // eigenpairs wanted
  int max_basis = 200;        // Krylov basis size per restart cycle
  int max_restarts = 40;
  double tol = 1e-10;         // residual tolerance |Hv - Ev|
  unsigned long long seed = 12345;
};

struct LanczosResult {
  std::vector<double> values;   // ascending
  std::vector<Vec> vectors;     // orthonormal
  std::vector<double> residuals;
  bool converged = true;
  int iterations = 0;
};

// Lowest eigenpairs of a Hermitian operator given by its action, using
// Lanczos with full reorthogonalization and thick restarts.
LanczosResult lanczos_lowest(const std::function<void(const Vec&, Vec&)>& apply,
                             long long dim, const LanczosOptions& opts,
                             const std::vector<Vec>& initial_guesses = {});

LanczosResult lanczos_lowest(const SparseMat& h, const LanczosOptions& opts,
                             const std::vector<Vec>& initial_guesses = {});

}  // namespace haldane
