#include "haldane/exact_engine.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace haldane {

void PureState::normalize() {
  double n = amps.norm();
  if (n < 1e-300) throw std::runtime_error("PureState: cannot normalize zero state");
  amps /= n;
}

cd overlap(const PureState& a, const PureState& b) {
  if (a.dims != b.dims) throw std::invalid_argument("overlap: dimension mismatch");
  return a.amps.dot(b.amps);
}

namespace {

std::vector<TwoSiteTerm> chain_terms(const ChainSpec& spec) {
  std::vector<int> dims = spec.site_dims();
  int off = spec.chain_site_offset();
  std::vector<TwoSiteTerm> terms;
  Mat hb = bond_term(spec.beta, spec.j_coupling);
  for (int b = 0; b < spec.n_sites - 1; ++b)
    terms.push_back({off + b, hb, spec.ramp_factor(b)});
  if (off == 1) {
    Mat t = boundary_term(spec.j_coupling);
    Mat swapped(6, 6);
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m < 3; ++m)
        for (int q2 = 0; q2 < 2; ++q2)
          for (int m2 = 0; m2 < 3; ++m2)
            swapped(q * 3 + m, q2 * 3 + m2) = t(m * 2 + q, m2 * 2 + q2);
    terms.push_back({0, swapped, 1.0});
  }
  if (spec.boundary == Boundary::right_qubit || spec.boundary == Boundary::both)
    terms.push_back({off + spec.n_sites - 1, boundary_term(spec.j_coupling), 1.0});
  return terms;
}

Vec apply_site_op(const Vec& amps, const std::vector<int>& dims, int site,
                  const Mat& op) {
  long long left = 1, right = 1;
  int d = dims[site];
  for (int i = 0; i < site; ++i) left *= dims[i];
  for (size_t i = site + 1; i < dims.size(); ++i) right *= dims[i];
  Vec out = Vec::Zero(amps.size());
  for (long long l = 0; l < left; ++l)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        cd v = op(a, b);
        if (std::abs(v) < 1e-300) continue;
        out.segment((l * d + a) * right, right) +=
            v * amps.segment((l * d + b) * right, right);
      }
  return out;
}

Vec apply_total_lowering(const Vec& amps, const std::vector<int>& dims) {
  Vec out = Vec::Zero(amps.size());
  for (size_t k = 0; k < dims.size(); ++k) {
    SpinOps s = spin_operators(dims[k] == 3 ? 1.0 : 0.5);
    out += apply_site_op(amps, dims, static_cast<int>(k), s.sm());
  }
  return out;
}

}  // namespace

SectorEig ground_sector(const ChainSpec& spec, int two_sz, int k,
                        const LanczosOptions& opts) {
  spec.validate();
  if (spec.hilbert_dim() > 2'200'000)
    throw std::runtime_error("ground_sector: Hilbert dimension guard exceeded");
  SectorBasis basis(spec.site_dims(), two_sz);
  if (basis.size() == 0)
    throw std::invalid_argument("ground_sector: empty S^z sector");
  SparseMat h = sector_hamiltonian(basis, chain_terms(spec));
  LanczosOptions lo = opts;
  lo.k = k;
  LanczosResult res = lanczos_lowest(h, lo);
  if (!res.converged) {
    double worst = 0.0;
    for (double r : res.residuals) worst = std::max(worst, r);
    throw std::runtime_error("ground_sector: eigensolver did not converge, residual " +
                             std::to_string(worst));
  }
  SectorEig out;
  out.values = res.values;
  out.residuals = res.residuals;
  out.converged = res.converged;
  for (const Vec& v : res.vectors)
    out.vectors.push_back(PureState{basis.to_full(v), spec.site_dims()});
  return out;
}

GroundDoublet ground_doublet(const ChainSpec& spec, const LanczosOptions& opts) {
  SectorEig eig = ground_sector(spec, +1, 2, opts);
  double split = eig.values[1] - eig.values[0];
  if (split < 1e-8)
    throw std::runtime_error(
        "ground_doublet: sector degeneracy beyond doublet (E0=" +
        std::to_string(eig.values[0]) + ", E1=" + std::to_string(eig.values[1]) + ")");
  GroundDoublet d;
  d.g0 = eig.vectors[0];
  d.energy = eig.values[0];
  d.gap_to_next = split;
  // Phase convention: largest-magnitude amplitude real positive.
  Eigen::Index imax = 0;
  d.g0.amps.cwiseAbs().maxCoeff(&imax);
  cd ph = d.g0.amps[imax] / std::abs(d.g0.amps[imax]);
  d.g0.amps /= ph;
  d.g1.dims = d.g0.dims;
  d.g1.amps = apply_total_lowering(d.g0.amps, d.g0.dims);
  double n1 = d.g1.amps.norm();
  if (n1 < 1e-8)
    throw std::runtime_error("ground_doublet: lowering annihilated g0");
  d.g1.amps /= n1;
  return d;
}

PureState embed_logical(const GroundDoublet& doublet, cd a0, cd a1) {
  double w = std::norm(a0) + std::norm(a1);
  if (std::abs(w - 1.0) > 1e-8)
    throw std::invalid_argument("embed_logical: amplitudes must be normalized");
  PureState s;
  s.dims = doublet.g0.dims;
  s.amps = a0 * doublet.g0.amps + a1 * doublet.g1.amps;
  s.normalize();
  return s;
}

LogicalReadout extract_logical(const PureState& state, const GroundDoublet& doublet) {
  LogicalReadout r;
  r.a0 = overlap(doublet.g0, state);
  r.a1 = overlap(doublet.g1, state);
  r.leakage = std::max(0.0, state.amps.squaredNorm() - r.weight());
  return r;
}

PureState adiabatic_evolve(const PureState& state, const ChainSpec& spec,
                           int bond, const std::vector<SchedulePoint>& schedule,
                           const KrylovOptions& opts) {
  if (schedule.size() < 2)
    throw std::invalid_argument("adiabatic_evolve: schedule needs >= 2 points");
  ChainSpec off = spec;
  off.ramp[bond] = 0.0;
  ChainSpec on = spec;
  on.ramp[bond] = 1.0;
  SparseMat h_rest = build_dense(off);
  SparseMat h_bond = build_dense(on) - h_rest;

  PureState cur = state;
  for (size_t i = 0; i + 1 < schedule.size(); ++i) {
    double dt = schedule[i + 1].time - schedule[i].time;
    if (dt <= 0) throw std::invalid_argument("adiabatic_evolve: schedule not increasing");
    double lam = 0.5 * (schedule[i].lambda + schedule[i + 1].lambda);
    SparseMat h = h_rest + lam * h_bond;
    cur.amps = krylov_expm_apply(h, cur.amps, dt, opts);
  }
  cur.normalize();
  return cur;
}

std::array<Mat, 3> decouple_site_matrices() {
  const double s23 = std::sqrt(2.0 / 3.0), s13 = std::sqrt(1.0 / 3.0);
  Mat mp = Mat::Zero(2, 2), m0 = Mat::Zero(2, 2), mm = Mat::Zero(2, 2);
  mp(1, 0) = -s23;
  m0(0, 0) = s13;
  m0(1, 1) = -s13;
  mm(0, 1) = s23;
  return {mp, m0, mm};
}

Mat branch_matrix(const RowVec& bra) {
  if (bra.size() != 3) throw std::invalid_argument("branch_matrix: bra must have length 3");
  auto m = decouple_site_matrices();
  return bra[0] * m[0] + bra[1] * m[1] + bra[2] * m[2];
}

PureState decoupled_state(const GroundDoublet& next, cd a0, cd a1) {
  auto m = decouple_site_matrices();
  long long sub = next.g0.dim();
  PureState out;
  out.dims = {3};
  out.dims.insert(out.dims.end(), next.g0.dims.begin(), next.g0.dims.end());
  out.amps = Vec::Zero(3 * sub);
  Eigen::Vector2cd a(a0, a1);
  for (int s = 0; s < 3; ++s) {
    Eigen::Vector2cd c = m[s] * a;
    out.amps.segment(s * sub, sub) = c[0] * next.g0.amps + c[1] * next.g1.amps;
  }
  return out;
}

ChainSpec suffix_spec(const ChainSpec& spec, int drop_front) {
  if (spec.boundary == Boundary::left_qubit || spec.boundary == Boundary::both)
    throw std::invalid_argument("suffix_spec: left boundary qubit not supported");
  ChainSpec s = spec;
  s.n_sites = spec.n_sites - drop_front;
  if (s.n_sites < 2) throw std::invalid_argument("suffix_spec: chain exhausted");
  s.ramp.clear();
  for (const auto& [bond, factor] : spec.ramp)
    if (bond >= drop_front) s.ramp[bond - drop_front] = factor;
  return s;
}

DecoupleResult decouple_symmetry(const PureState& state, const ChainSpec& spec,
                                 const GroundDoublet* current,
                                 const GroundDoublet* next, double leakage_tol) {
  GroundDoublet cur_storage, next_storage;
  if (!current) {
    cur_storage = ground_doublet(spec);
    current = &cur_storage;
  }
  if (!next) {
    next_storage = ground_doublet(suffix_spec(spec, 1));
    next = &next_storage;
  }
  DecoupleResult res;
  res.input = extract_logical(state, *current);
  if (res.input.leakage > leakage_tol)
    throw std::runtime_error("decouple_symmetry: input leakage " +
                             std::to_string(res.input.leakage) +
                             " exceeds tolerance");
  double w = std::sqrt(res.input.weight());
  res.state = decoupled_state(*next, res.input.a0 / w, res.input.a1 / w);
  res.fidelity = std::norm(overlap(res.state, state));
  return res;
}

MeasurementRecord measure_site(const PureState& state, int site,
                               const MeasBasis& basis, int forced_outcome,
                               std::mt19937_64* rng) {
  int d = state.dims[site];
  long long left = 1, right = 1;
  for (int i = 0; i < site; ++i) left *= state.dims[i];
  for (size_t i = site + 1; i < state.dims.size(); ++i) right *= state.dims[i];

  auto project = [&](int o) {
    const RowVec& bra = basis.bras[o];
    Vec post = Vec::Zero(left * right);
    for (long long l = 0; l < left; ++l)
      for (int p = 0; p < d; ++p)
        post.segment(l * right, right) +=
            bra[p] * state.amps.segment((l * d + p) * right, right);
    return post;
  };

  int chosen = forced_outcome;
  std::vector<double> probs(basis.bras.size());
  std::vector<Vec> posts(basis.bras.size());
  for (size_t o = 0; o < basis.bras.size(); ++o) {
    posts[o] = project(static_cast<int>(o));
    probs[o] = posts[o].squaredNorm();
  }
  if (chosen < 0) {
    if (!rng) throw std::invalid_argument("measure_site: rng required for sampling");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(*rng), acc = 0.0;
    chosen = static_cast<int>(probs.size()) - 1;
    for (size_t o = 0; o < probs.size(); ++o) {
      acc += probs[o];
      if (r <= acc) { chosen = static_cast<int>(o); break; }
    }
  } else if (probs[chosen] < 1e-14) {
    throw std::runtime_error("measure_site: forced outcome '" +
                             basis.labels[chosen] + "' has vanishing probability");
  }

  MeasurementRecord rec;
  rec.label = basis.labels[chosen];
  rec.outcome_index = chosen;
  rec.probability = probs[chosen];
  rec.post.dims = state.dims;
  rec.post.dims.erase(rec.post.dims.begin() + site);
  rec.post.amps = posts[chosen] / std::sqrt(probs[chosen]);
  return rec;
}

Mat two_chain_unitary() {
  Mat u = Mat::Identity(9, 9);
  u(0, 0) = -1.0;  // |+1,+1> is index 0 in the pair basis
  return u;
}

TwoChainResult two_chain_gate(const PureState& chain_a, const PureState& chain_b,
                              const GroundDoublet& next_a,
                              const GroundDoublet& next_b, int forced_a,
                              int forced_b, const MeasBasis& basis) {
  long long da = chain_a.dim(), db = chain_b.dim();
  long long sa = da / 3, sb = db / 3;
  // Joint amplitudes as a (3*sa) x (3*sb) matrix, gate applied diagonally.
  Mat joint(da, db);
  for (long long i = 0; i < da; ++i)
    for (long long j = 0; j < db; ++j) {
      double sign = (i < sa && j < sb) ? -1.0 : 1.0;  // both spins at S^z=+1
      joint(i, j) = sign * chain_a.amps[i] * chain_b.amps[j];
    }
  const RowVec& bra_a = basis.bras[forced_a];
  const RowVec& bra_b = basis.bras[forced_b];
  Mat post = Mat::Zero(sa, sb);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      post += bra_a[p] * bra_b[q] * joint.block(p * sa, q * sb, sa, sb);

  TwoChainResult res;
  res.label_a = basis.labels[forced_a];
  res.label_b = basis.labels[forced_b];
  res.probability = post.squaredNorm();
  if (res.probability < 1e-14)
    throw std::runtime_error("two_chain_gate: forced outcome pair has vanishing probability");
  post /= std::sqrt(res.probability);
  const Vec* ga[2] = {&next_a.g0.amps, &next_a.g1.amps};
  const Vec* gb[2] = {&next_b.g0.amps, &next_b.g1.amps};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      res.logical[2 * i + j] = (ga[i]->adjoint() * post * gb[j]->conjugate())(0);
  res.leakage = std::max(0.0, 1.0 - res.logical.squaredNorm());
  return res;
}

std::vector<double> schmidt_weights(const PureState& state, int sites_left) {
  if (sites_left < 1 || sites_left >= static_cast<int>(state.dims.size()))
    throw std::invalid_argument("schmidt_weights: invalid cut");
  long long left = 1, right = 1;
  for (int i = 0; i < sites_left; ++i) left *= state.dims[i];
  for (size_t i = sites_left; i < state.dims.size(); ++i) right *= state.dims[i];
  Mat m = Eigen::Map<const Mat>(state.amps.data(), right, left).transpose();
  Eigen::JacobiSVD<Mat> svd(m);
  std::vector<double> w;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    double s = svd.singularValues()[i];
    w.push_back(s * s);
  }
  return w;
}

double entanglement_entropy_bits(const std::vector<double>& weights) {
  double s = 0.0;
  for (double w : weights)
    if (w > 1e-300) s -= w * std::log2(w);
  return s;
}

cd expect_local(const PureState& state,
                const std::vector<std::pair<int, Mat>>& ops) {
  Vec v = state.amps;
  for (const auto& [site, op] : ops) v = apply_site_op(v, state.dims, site, op);
  return state.amps.dot(v);
}

}  // namespace haldane
