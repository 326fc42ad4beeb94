#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>

#include <nlohmann/json_fwd.hpp>

#include "haldane/exact_engine.hpp"
#include "haldane/mps_engine.hpp"

namespace haldane {

// Accumulated logical byproduct X^x Z^z, tracked by exponents only; the
// global phase is irrelevant to every fidelity and readout we report.
struct ByproductFrame {
  int x_exp = 0;
  int z_exp = 0;

  Mat matrix() const;           // X^x Z^z as a 2x2 matrix
  Eigen::Vector2cd correct(const Eigen::Vector2cd& amps) const;  // frame^-1 amps
};

struct Rotation {
  RotationAxis axis = RotationAxis::z;
  double angle = 0.0;
};

struct LogicalProgram {
  std::vector<Rotation> rotations;

  Mat unitary() const;  // rotations applied in list order
  static LogicalProgram from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// The angle actually measured so that the consuming outcomes commute to the
// target rotation through the current frame.
double executed_angle(const Rotation& rot, const ByproductFrame& frame);

// Frame update for one measurement outcome of a rotation block. Outcome
// indices follow rotated_basis order; index 2 is the retry outcome that only
// lands a Pauli. Returns true when the rotation was consumed.
bool apply_outcome(ByproductFrame& frame, const Rotation& rot, int outcome);

struct MeasurementPlan {
  std::vector<Rotation> rotations;  // each a repeat-until-success block
};

MeasurementPlan compile(const LogicalProgram& program);

struct WireStepRecord {
  int step = 0;
  int site = 0;
  std::string basis;
  std::string outcome;
  int outcome_index = -1;
  double probability = 0.0;
  int frame_x = 0;
  int frame_z = 0;
};

struct WireTrace {
  std::vector<WireStepRecord> steps;
  int first_site = 0;
  int last_site = -1;  // inclusive; -1 when nothing was consumed
  ByproductFrame frame;
  Eigen::Vector2cd readout{0.0, 0.0};  // frame-corrected logical amplitudes
  double leakage = 0.0;
  bool exhausted = false;  // chain ran out before the program finished
  int rotations_done = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// One logical wire bound to a chain; consumes sites left to right.
class WireBackend {
 public:
  virtual ~WireBackend() = default;
  virtual int sites_remaining() const = 0;
  virtual int frontier_site() const = 0;
  // Decouple the frontier site and measure it. forced < 0 samples from rng.
  virtual MpsStep consume(const MeasBasis& basis, int forced,
                          std::mt19937_64* rng) = 0;
  // Amplitudes of the surviving state in the current suffix doublet.
  virtual Eigen::Vector2cd logical() const = 0;
  virtual double leakage() const = 0;
};

std::unique_ptr<WireBackend> make_oracle_backend(const ChainSpec& spec, cd a0,
                                                 cd a1);

// Shared suffix data for MPS wires: doublets and mixing matrices are computed
// on demand and cached, so tomography inputs over the same chain reuse them.
class MpsWireEnv {
 public:
  MpsWireEnv(const ChainSpec& spec, const DmrgOptions& opts);
  const ChainSpec& spec() const { return spec_; }
  const MpsDoublet& doublet(int depth);  // suffix after dropping `depth` sites
  const Mat& mixing(int depth);          // between depth and depth + 1
  int max_depth() const;

 private:
  ChainSpec spec_;
  DmrgOptions opts_;
  std::vector<std::optional<MpsDoublet>> doublets_;
  std::vector<std::optional<Mat>> mixings_;
};

std::unique_ptr<WireBackend> make_mps_backend(std::shared_ptr<MpsWireEnv> env,
                                              cd a0, cd a1);

struct WireOptions {
  // Outcome per step; when exhausted (or empty) outcomes are sampled.
  std::vector<int> forced;
  std::uint64_t seed = 0;
  int site_margin = 2;  // frontier stops this many sites before the chain end
};

WireTrace run_wire(WireBackend& backend, const LogicalProgram& program,
                   const WireOptions& opts, std::mt19937_64* rng = nullptr);

// Process fidelity of the full wire against the program unitary, from a
// linear reconstruction over informationally complete inputs with forced
// consuming outcomes.
double wire_process_fidelity(
    const std::function<std::unique_ptr<WireBackend>(cd, cd)>& make_backend,
    const LogicalProgram& program);

struct ReadoutResult {
  bool conclusive = false;
  int bit = -1;
  int sites_consumed = 0;
  ByproductFrame frame;  // frame after the scan (retries land Z)
  std::vector<WireStepRecord> steps;
};

// Site-by-site S^z-eigenbasis readout: outcome +-1 terminates with
// bit = (outcome == -1) XOR frame.x_exp; outcome 0 lands Z and continues.
ReadoutResult readout_scan(WireBackend& backend, const ByproductFrame& frame,
                           int forced_first = -1, std::mt19937_64* rng = nullptr,
                           int max_sites = -1);

// Open-chain logical wire over the degenerate ground manifold, used for the
// mixed-state scheme. Edge-resolved ground states are orthonormalized once;
// branch propagation stays inside the manifold, which is exact at the
// frustration-free point.
struct EdgeManifold {
  ChainSpec spec;
  std::vector<Vec> ortho;  // 4 orthonormal states, (a, b) edge order, b minor
  Mat from_edge;           // coefficients of raw edge states in ortho basis
};

EdgeManifold build_edge_manifold(const ChainSpec& spec);

// Density matrix on the orthonormal manifold basis from closure weights
// lambda over the four family members (mu, nu) in order (0,0),(0,1),(1,0),(1,1).
Mat mixture_density(const EdgeManifold& manifold,
                    const std::vector<double>& lambda);

struct MixedStepRecord {
  int site = 0;
  std::string outcome;
  double probability = 0.0;
};

struct MixedWireResult {
  Mat channel_output;       // 2x2 logical density matrix after the program
  double record_probability = 0.0;
  int fiducial_sites = 0;   // sites consumed by the readout insertion
  ByproductFrame frame;
  std::vector<MixedStepRecord> steps;
};

// Runs the fiducial-insertion readout followed by the program on a mixed
// ground state, conditioning on one forced outcome record. The logical output
// is the frame-corrected reduced density matrix of the left edge.
MixedWireResult mixed_state_wire(const EdgeManifold& manifold,
                                 const Mat& density,
                                 const LogicalProgram& program,
                                 const std::vector<int>& forced_record,
                                 int tail_guard = 4);

double trace_distance(const Mat& rho, const Mat& sigma);

// Upper regularized incomplete gamma Q(a, x); chi-squared tail probability
// for k degrees of freedom is Q(k/2, x/2).
double gamma_q(double a, double x);
double chi_squared_pvalue(const std::vector<double>& observed,
                          const std::vector<double>& expected);

}  // namespace haldane
