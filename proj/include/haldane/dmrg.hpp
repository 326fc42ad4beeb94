#pragma once

#include <optional>

#include "haldane/mpo.hpp"
#include "haldane/mps.hpp"

namespace haldane {

struct DmrgOptions {
  int chi_max = 64;
  int max_sweeps = 30;
  double tol = 1e-10;           // energy change per full sweep
  double weight_tol = 1e-12;    // discarded Schmidt weight fraction
  int local_basis = 20;         // Lanczos basis per two-site solve
  int local_restarts = 3;
  double local_tol = 1e-10;
  unsigned long long seed = 20109;
};

struct DmrgReport {
  std::vector<double> half_sweep_energies;
  int sweeps = 0;
  bool converged = false;
};

struct DmrgResult {
  Mps state;
  double energy = 0.0;
  DmrgReport report;
};

// Two-site variational ground-state search. When two_sz is given, the state
// is restricted to that total-2S^z sector via per-bond charge labels; the
// returned Mps keeps the labels.
DmrgResult dmrg_ground(const Mpo& mpo, std::optional<int> two_sz,
                       const DmrgOptions& opts = {});

}  // namespace haldane
