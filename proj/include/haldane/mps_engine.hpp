#pragma once

#include <optional>
#include <random>

#include "haldane/chain_model.hpp"
#include "haldane/dmrg.hpp"
#include "haldane/mps.hpp"
#include "haldane/spin_algebra.hpp"

namespace haldane {

DmrgResult spec_ground(const ChainSpec& spec, std::optional<int> two_sz,
                       const DmrgOptions& opts = {});

// Phase-locked edge doublet of a right-qubit chain: g0 from the 2S^z = +1
// sector, g1 from -1 with its phase fixed through the total-lowering matrix
// element <g1|S^-|g0>.
struct MpsDoublet {
  Mps g0, g1;
  double energy = 0.0;
  double lowering_overlap = 0.0;  // |<g1|S^-_tot|g0>|, 1 for an exact doublet
};

MpsDoublet suffix_doublet_mps(const ChainSpec& spec, const DmrgOptions& opts = {});

// Closed-form valence-bond chain of n spin-1 sites with boundary closure
// (-Z)^nu X^mu, realized as a trace over 2x2 site matrices and compressed.
Mps aklt_mps(int n_sites, int mu, int nu);

// Same family resolved by virtual edge indices: amplitude proportional to
// (Pi site matrices)_{right_edge, left_edge}.
Mps aklt_edge_mps(int n_sites, int left_edge, int right_edge);

// 2x2 matrix M_ij = <D_i|g_j>: overlap of the site-decoupled orthonormal
// basis built on the next suffix with the current suffix doublet. Scalar
// (proportional to identity) up to finite-size edge corrections.
Mat decouple_mixing(const MpsDoublet& current, const MpsDoublet& next);

// Decoupled state on [site] (x) next-suffix for a given logical input.
Mps cg_construct(const MpsDoublet& next, cd a0, cd a1, int chi_max = 64);

struct MpsStep {
  std::string label;
  int outcome_index = -1;
  double probability = 0.0;
  Eigen::Vector2cd new_logical;
  double leakage = 0.0;   // input weight outside the decoupled basis
  double fidelity = 1.0;  // renormalized logical fidelity of the decoupling
};

// One primitive step in the projection model: the logical amplitudes are
// carried explicitly, mapped through the mixing matrix, then through the
// branch operator of the chosen outcome. forced_outcome = -1 samples.
MpsStep decouple_and_measure(const Eigen::Vector2cd& logical,
                             const MpsDoublet& current, const MpsDoublet& next,
                             const MeasBasis& basis, int forced_outcome,
                             std::mt19937_64* rng = nullptr,
                             const Mat* cached_mixing = nullptr);

// <psi| O_k ... |psi> with one inserted operator per listed site.
cd mps_site_expectation(const Mps& mps,
                        const std::vector<std::pair<int, Mat>>& ops);

// <S^z_k exp(i pi sum_{k<l<m} S^z_l) S^z_m>, real part.
double string_order(const Mps& mps, int k, int m);

struct CorrelationFit {
  double xi = 0.0;
  double residual = 0.0;
  bool decaying = false;
};

// Exponential fit of connected mid-chain S^z correlations.
CorrelationFit correlation_length(const Mps& mps);

}  // namespace haldane
