#pragma once

#include <optional>
#include <random>

#include "haldane/chain_model.hpp"
#include "haldane/krylov_propagator.hpp"
#include "haldane/lanczos.hpp"
#include "haldane/sector_basis.hpp"
#include "haldane/spin_algebra.hpp"

namespace haldane {

// Dense state vector over the full product basis; site 0 is the most
// significant index.
struct PureState {
  Vec amps;
  std::vector<int> dims;

  long long dim() const { return amps.size(); }
  double norm() const { return amps.norm(); }
  void normalize();
};

cd overlap(const PureState& a, const PureState& b);

// Ordered, phase-fixed pair spanning the S_tot = 1/2 ground space:
// g0 has S^z_tot = +1/2, g1 = normalized total-lowering image of g0.
struct GroundDoublet {
  PureState g0, g1;
  double energy = 0.0;
  double gap_to_next = 0.0;  // within the +1/2 sector
  std::string phase_convention =
      "g0 largest amplitude real positive; g1 = S^-_tot g0 normalized";
};

struct LogicalReadout {
  cd a0{0.0, 0.0}, a1{0.0, 0.0};
  double leakage = 0.0;
  double weight() const { return std::norm(a0) + std::norm(a1); }
};

struct SectorEig {
  std::vector<double> values;
  std::vector<PureState> vectors;
  std::vector<double> residuals;
  bool converged = true;
};

// k lowest eigenpairs in the fixed total-2S^z sector of the spec's chain.
SectorEig ground_sector(const ChainSpec& spec, int two_sz, int k,
                        const LanczosOptions& opts = {});

GroundDoublet ground_doublet(const ChainSpec& spec,
                             const LanczosOptions& opts = {});

PureState embed_logical(const GroundDoublet& doublet, cd a0, cd a1);

LogicalReadout extract_logical(const PureState& state,
                               const GroundDoublet& doublet);

// Time-dependent Schroedinger evolution with H(t) = H_rest + lambda(t) h_bond,
// stepwise midpoint propagator on the schedule grid.
PureState adiabatic_evolve(const PureState& state, const ChainSpec& spec,
                           int bond, const std::vector<SchedulePoint>& schedule,
                           const KrylovOptions& opts = {});

// Exact Eq.-(2)-type construction: the decoupled state on [site j] (x)
// [suffix j+1] built from the next suffix's doublet and the CG amplitudes.
PureState decoupled_state(const GroundDoublet& next, cd a0, cd a1);

// Single-site branch matrices: decoupled(a) = sum_s |s> (x) (M_s a) . doublet,
// with s running over the S^z basis {+1, 0, -1}.
std::array<Mat, 3> decouple_site_matrices();

// Logical branch matrix of a measurement bra (applied to ket components).
Mat branch_matrix(const RowVec& bra);

struct DecoupleResult {
  PureState state;          // on [site j] (x) suffix(j+1) space
  LogicalReadout input;     // amplitudes of the input in the suffix-j doublet
  double fidelity = 1.0;    // |<decoupled | input state>|^2
};

// Decouple the first spin of the suffix chain described by spec. Doublets are
// computed on demand when not supplied. Throws when input leakage exceeds
// leakage_tol.
DecoupleResult decouple_symmetry(const PureState& state, const ChainSpec& spec,
                                 const GroundDoublet* current = nullptr,
                                 const GroundDoublet* next = nullptr,
                                 double leakage_tol = 1e-8);

ChainSpec suffix_spec(const ChainSpec& spec, int drop_front);

struct MeasurementRecord {
  std::string label;
  int outcome_index = -1;
  double probability = 0.0;
  PureState post;
};

// Projective measurement of one site. forced_outcome = -1 samples from rng.
MeasurementRecord measure_site(const PureState& state, int site,
                               const MeasBasis& basis, int forced_outcome,
                               std::mt19937_64* rng = nullptr);

// Diagonal two-spin-1 entangler 1 - 2|+1,+1><+1,+1|.
Mat two_chain_unitary();

struct TwoChainResult {
  std::string label_a, label_b;
  double probability = 0.0;
  // Two-qubit logical amplitudes, basis |00>,|01>,|10>,|11> (A major).
  Eigen::Vector4cd logical;
  double leakage = 0.0;
};

// Joint gate + standard measurements on two decoupled chains. Inputs are the
// decoupled states (dims [3, suffixA...]) and ([3, suffixB...]) and the next
// suffix doublets used for extraction.
TwoChainResult two_chain_gate(const PureState& chain_a, const PureState& chain_b,
                              const GroundDoublet& next_a,
                              const GroundDoublet& next_b, int forced_a,
                              int forced_b, const MeasBasis& basis);

// Schmidt weights across the cut after the given number of leading sites.
std::vector<double> schmidt_weights(const PureState& state, int sites_left);

double entanglement_entropy_bits(const std::vector<double>& weights);

// <state| O_k ... |state> with one local operator per listed site.
cd expect_local(const PureState& state, const std::vector<std::pair<int, Mat>>& ops);

}  // namespace haldane
