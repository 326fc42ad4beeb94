#include "haldane/ground_code.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace haldane {

namespace {

Mat pauli_x() { return (Mat(2, 2) << 0, 1, 1, 0).finished(); }
Mat pauli_z() { return (Mat(2, 2) << 1, 0, 0, -1).finished(); }

Mat rotation_unitary(const Rotation& rot) {
  Mat rz = (Mat(2, 2) << 1, 0, 0, std::exp(cd(0, rot.angle))).finished();
  if (rot.axis == RotationAxis::z) return rz;
  Mat h = (Mat(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  return h * rz * h;
}

MeasBasis sz_eigenbasis() {
  MeasBasis basis;
  basis.labels = {"+1", "0", "-1"};
  for (int s = 0; s < 3; ++s) {
    RowVec bra = RowVec::Zero(3);
    bra[s] = 1.0;
    basis.bras.push_back(bra);
  }
  basis.observable = spin_operators(1.0).sz;
  return basis;
}

}  // namespace

Mat ByproductFrame::matrix() const {
  Mat m = Mat::Identity(2, 2);
  if (x_exp & 1) m = pauli_x() * m;
  if (z_exp & 1) m = m * pauli_z();
  return m;
}

Eigen::Vector2cd ByproductFrame::correct(const Eigen::Vector2cd& amps) const {
  // The inverse of X^x Z^z equals X^x Z^z up to a global sign.
  return matrix() * amps;
}

Mat LogicalProgram::unitary() const {
  Mat u = Mat::Identity(2, 2);
  for (const Rotation& rot : rotations) u = rotation_unitary(rot) * u;
  return u;
}

LogicalProgram LogicalProgram::from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("program: expected an array");
  LogicalProgram prog;
  for (const auto& item : doc) {
    if (!item.is_object())
      throw std::invalid_argument("program: each entry must be an object");
    for (auto it = item.begin(); it != item.end(); ++it)
      if (it.key() != "axis" && it.key() != "angle")
        throw std::invalid_argument("program: unknown key '" + it.key() + "'");
    if (!item.contains("axis") || !item.contains("angle"))
      throw std::invalid_argument("program: entries need axis and angle");
    std::string axis = item.at("axis").get<std::string>();
    Rotation rot;
    if (axis == "z")
      rot.axis = RotationAxis::z;
    else if (axis == "x")
      rot.axis = RotationAxis::x;
    else
      throw std::invalid_argument("program: axis must be 'z' or 'x'");
    rot.angle = item.at("angle").get<double>();
    if (!std::isfinite(rot.angle))
      throw std::invalid_argument("program: angle must be finite");
    prog.rotations.push_back(rot);
  }
  return prog;
}

nlohmann::json LogicalProgram::to_json() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const Rotation& rot : rotations)
    doc.push_back({{"axis", rot.axis == RotationAxis::z ? "z" : "x"},
                   {"angle", rot.angle}});
  return doc;
}

double executed_angle(const Rotation& rot, const ByproductFrame& frame) {
  // Consuming outcomes apply R(theta_exec) left of the frame; commuting the
  // rotation through X flips the z angle, through Z flips the x angle. The
  // base sign comes from the branch forms R^z(t)X and Z R^x(t).
  if (rot.axis == RotationAxis::z)
    return (frame.x_exp & 1) ? rot.angle : -rot.angle;
  return (frame.z_exp & 1) ? -rot.angle : rot.angle;
}

bool apply_outcome(ByproductFrame& frame, const Rotation& rot, int outcome) {
  if (outcome < 0 || outcome > 2)
    throw std::invalid_argument("apply_outcome: outcome index out of range");
  if (rot.axis == RotationAxis::z) {
    switch (outcome) {
      case 0: frame.x_exp ^= 1; return true;               // R^z X
      case 1: frame.x_exp ^= 1; frame.z_exp ^= 1; return true;  // R^z Z X
      default: frame.z_exp ^= 1; return false;             // Z, retry
    }
  }
  switch (outcome) {
    case 0: frame.z_exp ^= 1; return true;                 // Z R^x
    case 1: frame.x_exp ^= 1; frame.z_exp ^= 1; return true;  // Z R^x X
    default: frame.x_exp ^= 1; return false;               // X, retry
  }
}

MeasurementPlan compile(const LogicalProgram& program) {
  MeasurementPlan plan;
  for (const Rotation& rot : program.rotations) {
    if (!std::isfinite(rot.angle))
      throw std::invalid_argument("compile: non-finite rotation angle");
    plan.rotations.push_back(rot);
  }
  return plan;
}

nlohmann::json WireTrace::to_json() const {
  nlohmann::json steps_doc = nlohmann::json::array();
  for (const WireStepRecord& s : steps)
    steps_doc.push_back({{"step", s.step},
                         {"site", s.site},
                         {"basis", s.basis},
                         {"outcome", s.outcome},
                         {"outcome_index", s.outcome_index},
                         {"prob", s.probability},
                         {"frame_x", s.frame_x},
                         {"frame_z", s.frame_z}});
  return {{"steps", steps_doc},
          {"first_site", first_site},
          {"last_site", last_site},
          {"frame", {{"x_exp", frame.x_exp}, {"z_exp", frame.z_exp}}},
          {"readout_re", {readout[0].real(), readout[1].real()}},
          {"readout_im", {readout[0].imag(), readout[1].imag()}},
          {"leakage", leakage},
          {"exhausted", exhausted},
          {"rotations_done", rotations_done}};
}

std::string WireTrace::to_csv() const {
  std::ostringstream out;
  out << "step,site,basis,outcome,prob,frame_x,frame_z\n";
  out.precision(17);
  for (const WireStepRecord& s : steps)
    out << s.step << ',' << s.site << ',' << s.basis << ',' << s.outcome << ','
        << s.probability << ',' << s.frame_x << ',' << s.frame_z << '\n';
  return out.str();
}

namespace {

class OracleWireBackend final : public WireBackend {
 public:
  OracleWireBackend(const ChainSpec& spec, cd a0, cd a1)
      : spec_(spec), doublet_(ground_doublet(spec)) {
    state_ = embed_logical(doublet_, a0, a1);
    total_sites_ = spec.n_sites;
  }

  int sites_remaining() const override { return spec_.n_sites - 2; }
  int frontier_site() const override { return total_sites_ - spec_.n_sites; }

  MpsStep consume(const MeasBasis& basis, int forced,
                  std::mt19937_64* rng) override {
    if (sites_remaining() <= 0)
      throw std::runtime_error("oracle wire: chain exhausted");
    ChainSpec next_spec = suffix_spec(spec_, 1);
    GroundDoublet next = ground_doublet(next_spec);
    DecoupleResult dec = decouple_symmetry(state_, spec_, &doublet_, &next);
    MeasurementRecord rec = measure_site(dec.state, 0, basis, forced, rng);
    MpsStep step;
    step.label = rec.label;
    step.outcome_index = rec.outcome_index;
    step.probability = rec.probability;
    step.fidelity = dec.fidelity;
    step.leakage = 1.0 - dec.input.weight();
    state_ = rec.post;
    spec_ = next_spec;
    doublet_ = std::move(next);
    LogicalReadout lr = extract_logical(state_, doublet_);
    step.new_logical = Eigen::Vector2cd{lr.a0, lr.a1};
    step.new_logical.normalize();
    leakage_ = std::max(leakage_, lr.leakage);
    return step;
  }

  Eigen::Vector2cd logical() const override {
    LogicalReadout lr = extract_logical(state_, doublet_);
    Eigen::Vector2cd amps{lr.a0, lr.a1};
    amps.normalize();
    return amps;
  }

  double leakage() const override { return leakage_; }

 private:
  ChainSpec spec_;
  PureState state_;
  GroundDoublet doublet_;
  int total_sites_ = 0;
  double leakage_ = 0.0;
};

}  // namespace

std::unique_ptr<WireBackend> make_oracle_backend(const ChainSpec& spec, cd a0,
                                                 cd a1) {
  return std::make_unique<OracleWireBackend>(spec, a0, a1);
}

MpsWireEnv::MpsWireEnv(const ChainSpec& spec, const DmrgOptions& opts)
    : spec_(spec), opts_(opts) {
  doublets_.resize(static_cast<size_t>(max_depth()) + 1);
  mixings_.resize(static_cast<size_t>(max_depth()));
}

int MpsWireEnv::max_depth() const { return spec_.n_sites - 2; }

const MpsDoublet& MpsWireEnv::doublet(int depth) {
  if (depth < 0 || depth > max_depth())
    throw std::out_of_range("MpsWireEnv: suffix depth out of range");
  auto& slot = doublets_[static_cast<size_t>(depth)];
  if (!slot) slot = suffix_doublet_mps(suffix_spec(spec_, depth), opts_);
  return *slot;
}

const Mat& MpsWireEnv::mixing(int depth) {
  if (depth < 0 || depth >= max_depth())
    throw std::out_of_range("MpsWireEnv: mixing depth out of range");
  auto& slot = mixings_[static_cast<size_t>(depth)];
  if (!slot) slot = decouple_mixing(doublet(depth), doublet(depth + 1));
  return *slot;
}

namespace {

class MpsWireBackend final : public WireBackend {
 public:
  MpsWireBackend(std::shared_ptr<MpsWireEnv> env, cd a0, cd a1)
      : env_(std::move(env)) {
    logical_ << a0, a1;
    logical_.normalize();
  }

  int sites_remaining() const override { return env_->max_depth() - depth_; }
  int frontier_site() const override { return depth_; }

  MpsStep consume(const MeasBasis& basis, int forced,
                  std::mt19937_64* rng) override {
    if (sites_remaining() <= 0)
      throw std::runtime_error("mps wire: chain exhausted");
    MpsStep step =
        decouple_and_measure(logical_, env_->doublet(depth_),
                             env_->doublet(depth_ + 1), basis, forced, rng,
                             &env_->mixing(depth_));
    logical_ = step.new_logical;
    leakage_ = std::max(leakage_, step.leakage);
    ++depth_;
    return step;
  }

  Eigen::Vector2cd logical() const override { return logical_; }
  double leakage() const override { return leakage_; }

 private:
  std::shared_ptr<MpsWireEnv> env_;
  Eigen::Vector2cd logical_;
  int depth_ = 0;
  double leakage_ = 0.0;
};

}  // namespace

std::unique_ptr<WireBackend> make_mps_backend(std::shared_ptr<MpsWireEnv> env,
                                              cd a0, cd a1) {
  return std::make_unique<MpsWireBackend>(std::move(env), a0, a1);
}

WireTrace run_wire(WireBackend& backend, const LogicalProgram& program,
                   const WireOptions& opts, std::mt19937_64* rng) {
  MeasurementPlan plan = compile(program);
  WireTrace trace;
  trace.first_site = backend.frontier_site();

  std::mt19937_64 owned(opts.seed);
  if (!rng) rng = &owned;

  size_t forced_pos = 0;
  int step_no = 0;
  for (const Rotation& rot : plan.rotations) {
    bool consumed = false;
    while (!consumed) {
      if (backend.sites_remaining() <= opts.site_margin) {
        trace.exhausted = true;
        break;
      }
      double theta = executed_angle(rot, trace.frame);
      MeasBasis basis = rotated_basis(rot.axis, theta);
      int forced = forced_pos < opts.forced.size()
                       ? opts.forced[forced_pos]
                       : -1;
      ++forced_pos;
      int site = backend.frontier_site();
      MpsStep step = backend.consume(basis, forced, rng);
      consumed = apply_outcome(trace.frame, rot, step.outcome_index);
      trace.steps.push_back({step_no++, site,
                             rot.axis == RotationAxis::z ? "rz" : "rx",
                             step.label, step.outcome_index, step.probability,
                             trace.frame.x_exp, trace.frame.z_exp});
      trace.last_site = site;
    }
    if (trace.exhausted) break;
    ++trace.rotations_done;
  }

  trace.readout = trace.frame.correct(backend.logical());
  trace.leakage = backend.leakage();
  return trace;
}

double wire_process_fidelity(
    const std::function<std::unique_ptr<WireBackend>(cd, cd)>& make_backend,
    const LogicalProgram& program) {
  ChannelRunner runner = [&](const Vec& input) {
    auto backend = make_backend(input[0], input[1]);
    WireOptions opts;
    opts.forced.assign(program.rotations.size(), 0);  // always consume
    WireTrace trace = run_wire(*backend, program, opts);
    if (trace.exhausted)
      throw std::runtime_error("wire tomography: chain exhausted");
    RunnerOutput out;
    out.amps = Vec(2);
    out.amps << trace.readout[0], trace.readout[1];
    out.leakage = trace.leakage;
    return out;
  };
  ChannelReconstruction rec = reconstruct_channel(runner, 2);
  return process_fidelity(program.unitary(), rec.matrix);
}

ReadoutResult readout_scan(WireBackend& backend, const ByproductFrame& frame,
                           int forced_first, std::mt19937_64* rng,
                           int max_sites) {
  MeasBasis basis = sz_eigenbasis();
  ReadoutResult res;
  res.frame = frame;
  std::mt19937_64 owned(12021);
  if (!rng) rng = &owned;
  int step_no = 0;
  while (backend.sites_remaining() > 0 &&
         (max_sites < 0 || res.sites_consumed < max_sites)) {
    int forced = res.sites_consumed == 0 ? forced_first : -1;
    int site = backend.frontier_site();
    MpsStep step = backend.consume(basis, forced, rng);
    ++res.sites_consumed;
    if (step.outcome_index == 1) {
      res.frame.z_exp ^= 1;  // outcome 0 lands Z, populations preserved
    }
    res.steps.push_back({step_no++, site, "sz", step.label, step.outcome_index,
                         step.probability, res.frame.x_exp, res.frame.z_exp});
    if (step.outcome_index != 1) {
      res.conclusive = true;
      res.bit = (step.outcome_index == 2 ? 1 : 0) ^ (res.frame.x_exp & 1);
      return res;
    }
  }
  return res;
}

namespace {

// Valence-bond site matrices of the edge description; the branch of bra beta
// on the left edge index is sum_s beta_s A[s].
Mat edge_branch(const RowVec& bra) {
  std::array<Mat, 3> a = valence_bond_matrices();
  Mat b = Mat::Zero(2, 2);
  for (int s = 0; s < 3; ++s) b += bra[s] * a[s];
  return b;
}

}  // namespace

EdgeManifold build_edge_manifold(const ChainSpec& spec) {
  if (spec.boundary != Boundary::open)
    throw std::invalid_argument("edge manifold: needs an open chain");
  if (std::abs(spec.beta + 1.0 / 3.0) > 1e-12)
    throw std::invalid_argument(
        "edge manifold: ground manifold is exact only at beta = -1/3");
  EdgeManifold m;
  m.spec = spec;
  std::vector<Vec> raw;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      raw.push_back(aklt_edge_mps(spec.n_sites, a, b).to_dense());
  Mat gram(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gram(i, j) = raw[i].adjoint() * raw[j];
  // Loewdin orthonormalization keeps the basis as close to the raw edge
  // states as possible; the correction is exponentially small in N.
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  Mat inv_sqrt = es.eigenvectors() *
                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().adjoint();
  for (int i = 0; i < 4; ++i) {
    Vec q = Vec::Zero(raw[0].size());
    for (int j = 0; j < 4; ++j) q += raw[j] * inv_sqrt(j, i);
    m.ortho.push_back(std::move(q));
  }
  m.from_edge = inv_sqrt.inverse();  // ortho coefficients of each raw state
  return m;
}

Mat mixture_density(const EdgeManifold& manifold,
                    const std::vector<double>& lambda) {
  if (lambda.size() != 4)
    throw std::invalid_argument("mixture: need 4 closure weights");
  double sum = 0.0;
  for (double w : lambda) {
    if (w < -1e-12 || !std::isfinite(w))
      throw std::invalid_argument("mixture: weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mixture: weights must sum to 1");

  Mat x = (Mat(2, 2) << 0, 1, 1, 0).finished();
  Mat mz = (Mat(2, 2) << -1, 0, 0, 1).finished();
  Mat rho = Mat::Zero(4, 4);
  int idx = 0;
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu) {
      // Family member with closure (-Z)^nu X^mu: coefficients over raw edge
      // states are the closure matrix entries, row-major (a, b).
      Mat closure = Mat::Identity(2, 2);
      for (int k = 0; k < nu; ++k) closure = mz * closure;
      for (int k = 0; k < mu; ++k) closure = closure * x;
      Vec raw_coeff(4);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) raw_coeff[2 * a + b] = closure(a, b);
      Vec c = manifold.from_edge * raw_coeff;
      c.normalize();
      rho += lambda[idx] * c * c.adjoint();
      ++idx;
    }
  return rho;
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho - sigma);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

MixedWireResult mixed_state_wire(const EdgeManifold& manifold,
                                 const Mat& density,
                                 const LogicalProgram& program,
                                 const std::vector<int>& forced_record,
                                 int tail_guard) {
  if (density.rows() != 4 || density.cols() != 4)
    throw std::invalid_argument("mixed wire: density must be 4x4");
  if (std::abs(density.trace().real() - 1.0) > 1e-9 ||
      (density - density.adjoint()).norm() > 1e-9)
    throw std::invalid_argument("mixed wire: density must be Hermitian, trace 1");

  Eigen::SelfAdjointEigenSolver<Mat> es(density);
  struct Component {
    double weight;
    Mat coeff;  // 2x2 edge coefficient matrix C, state = sum C_ab E_ab
    double prob = 1.0;
  };
  std::vector<Component> comps;
  Mat to_edge = manifold.from_edge.inverse();
  for (int k = 0; k < 4; ++k) {
    double w = es.eigenvalues()[k];
    if (w < 1e-12) continue;
    // Eigenvector in the orthonormal basis, mapped to raw edge coefficients.
    Vec raw = to_edge * es.eigenvectors().col(k);
    Mat c(2, 2);
    c << raw[0], raw[1], raw[2], raw[3];
    comps.push_back({w, c});
  }

  // The raw edge states are orthonormal only up to exponentially small Gram
  // corrections; branch propagation of the coefficient matrix is exact at the
  // frustration-free point, so the record probabilities below carry the same
  // exponentially small error. Branch matrices carry weight 3 per site on
  // average, normalized out per step.
  MixedWireResult res;
  size_t pos = 0;
  int site = 0;
  int n_sites = manifold.spec.n_sites;
  auto next_forced = [&]() {
    return pos < forced_record.size() ? forced_record[pos++] : 0;
  };

  auto branch_all = [&](const RowVec& bra, double norm2) {
    double prob = 0.0;
    Mat b = edge_branch(bra) / std::sqrt(3.0);
    for (Component& c : comps) {
      Mat nc = b * c.coeff;
      double p = nc.squaredNorm() / std::max(c.coeff.squaredNorm(), 1e-300);
      c.prob *= p / norm2;
      c.coeff = nc;
      prob += c.weight * c.prob;
    }
    return prob;
  };

  // Fiducial insertion: S^z readout until a terminating outcome.
  MeasBasis sz = sz_eigenbasis();
  bool fiducial = false;
  while (!fiducial) {
    if (site >= n_sites - tail_guard - static_cast<int>(program.rotations.size()) * 3)
      throw std::runtime_error("mixed wire: region guard violated");
    int o = next_forced();
    double p = branch_all(sz.bras[o], 1.0);
    res.steps.push_back({site, sz.labels[o], p});
    ++site;
    ++res.fiducial_sites;
    if (o == 1) {
      res.frame.z_exp ^= 1;
    } else {
      fiducial = true;
    }
  }

  // Program rotations with the standard adaptation rules.
  for (const Rotation& rot : program.rotations) {
    bool consumed = false;
    while (!consumed) {
      if (site >= n_sites - tail_guard)
        throw std::runtime_error("mixed wire: region guard violated");
      double theta = executed_angle(rot, res.frame);
      MeasBasis basis = rotated_basis(rot.axis, theta);
      int o = next_forced();
      double p = branch_all(basis.bras[o], 1.0);
      consumed = apply_outcome(res.frame, rot, o);
      res.steps.push_back({site, basis.labels[o], p});
      ++site;
    }
  }

  // Logical output: left edge index of the surviving coefficient matrices,
  // frame corrected. The right edge is a spectator and is traced out.
  Mat rho = Mat::Zero(2, 2);
  double total = 0.0;
  for (const Component& c : comps) {
    double w = c.weight * c.prob;
    if (w < 1e-300) continue;
    Mat n = c.coeff / c.coeff.norm();
    rho += w * n * n.adjoint();
    total += w;
  }
  if (total < 1e-14)
    throw std::runtime_error("mixed wire: forced record has zero probability");
  rho /= total;
  Mat f = res.frame.matrix();
  res.channel_output = f.adjoint() * rho * f;
  res.record_probability = total;
  return res;
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // Lower series, then complement.
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  // Continued fraction (modified Lentz).
  double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double chi_squared_pvalue(const std::vector<double>& observed,
                          const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi squared: size mismatch");
  double stat = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0)
      throw std::invalid_argument("chi squared: expected counts must be > 0");
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  double dof = static_cast<double>(observed.size()) - 1.0;
  return gamma_q(dof / 2.0, stat / 2.0);
}

}  // namespace haldane
