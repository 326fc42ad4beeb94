#include "haldane/mps_engine.hpp"

#include <cmath>

#include "haldane/exact_engine.hpp"

namespace haldane {

DmrgResult spec_ground(const ChainSpec& spec, std::optional<int> two_sz,
                       const DmrgOptions& opts) {
  spec.validate();
  DmrgResult res = dmrg_ground(build_mpo(spec), two_sz, opts);
  if (!res.report.converged)
    throw std::runtime_error("spec_ground: DMRG did not converge");
  return res;
}

MpsDoublet suffix_doublet_mps(const ChainSpec& spec, const DmrgOptions& opts) {
  if (spec.boundary != Boundary::right_qubit)
    throw std::invalid_argument("suffix_doublet_mps: right-qubit chain required");
  DmrgResult up = spec_ground(spec, 1, opts);
  DmrgResult dn = spec_ground(spec, -1, opts);
  if (std::abs(up.energy - dn.energy) > 1e-6)
    throw std::runtime_error("suffix_doublet_mps: sector energies split");

  std::vector<int> dims = spec.site_dims();
  std::vector<Mat> lowering;
  for (int d : dims) lowering.push_back(spin_operators(d == 3 ? 1.0 : 0.5).sm());
  cd s = mps_expectation(dn.state, sum_site_mpo(dims, lowering), up.state);
  if (std::abs(s) < 0.2)
    throw std::runtime_error("suffix_doublet_mps: lowering overlap too small for a phase lock");

  MpsDoublet doublet;
  doublet.g0 = std::move(up.state);
  doublet.g1 = std::move(dn.state);
  doublet.energy = up.energy;
  doublet.lowering_overlap = std::abs(s);
  cd phase = s / std::abs(s);
  int c = doublet.g1.center >= 0 ? doublet.g1.center : 0;
  for (Mat& a : doublet.g1.tensors[c]) a *= phase;
  return doublet;
}

namespace {

// S^z basis {+1, 0, -1} site matrices of the valence-bond chain.
std::array<Mat, 3> valence_bond_matrices() {
  Mat sp = (Mat(2, 2) << 0, 1, 0, 0).finished();
  Mat sm = (Mat(2, 2) << 0, 0, 1, 0).finished();
  Mat z = (Mat(2, 2) << 1, 0, 0, -1).finished();
  return {-std::sqrt(2.0) * sp, z, std::sqrt(2.0) * sm};
}

// Open MPS for amplitudes tr[closure A[s_N] ... A[s_1]], via the bond-4
// doubling N[s] = A[s]^T (x) I so the product leg and the trace leg travel
// together.
Mps aklt_with_closure(int n, const Mat& closure) {
  if (n < 1) throw std::invalid_argument("aklt: need at least one site");
  auto a = valence_bond_matrices();
  Mat id = Mat::Identity(2, 2);
  std::array<Mat, 3> big;
  for (int s = 0; s < 3; ++s) big[s] = kron(a[s].transpose(), id);
  Vec v_l = Vec::Zero(4), v_r = Vec::Zero(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) v_l[2 * i + j] = closure(i, j);
  v_r[0] = v_r[3] = 1.0;

  Mps mps;
  mps.phys.assign(n, 3);
  mps.tensors.resize(n);
  for (int k = 0; k < n; ++k) {
    mps.tensors[k].resize(3);
    for (int s = 0; s < 3; ++s) {
      Mat t = big[s];
      if (k == 0) t = v_l.transpose() * t;
      if (k == n - 1) t = t * v_r;
      mps.tensors[k][s] = t;
    }
  }
  mps.compress(4);
  return mps;
}

}  // namespace

Mps aklt_mps(int n_sites, int mu, int nu) {
  if ((mu | nu) > 1 || mu < 0 || nu < 0)
    throw std::invalid_argument("aklt_mps: mu, nu must be bits");
  Mat x = (Mat(2, 2) << 0, 1, 1, 0).finished();
  Mat mz = (Mat(2, 2) << -1, 0, 0, 1).finished();
  Mat closure = Mat::Identity(2, 2);
  if (nu) closure = mz * closure;
  if (mu) closure = closure * x;
  return aklt_with_closure(n_sites, closure);
}

Mps aklt_edge_mps(int n_sites, int left_edge, int right_edge) {
  if (left_edge < 0 || left_edge > 1 || right_edge < 0 || right_edge > 1)
    throw std::invalid_argument("aklt_edge_mps: edge indices must be bits");
  Mat closure = Mat::Zero(2, 2);
  closure(left_edge, right_edge) = 1.0;
  return aklt_with_closure(n_sites, closure);
}

Mat decouple_mixing(const MpsDoublet& current, const MpsDoublet& next) {
  auto m = decouple_site_matrices();
  const Mps* cur[2] = {&current.g0, &current.g1};
  const Mps* nxt[2] = {&next.g0, &next.g1};
  // Overlap of each |s> (x) g_d product with each current doublet member.
  cd ov[3][2][2];
  for (int s = 0; s < 3; ++s) {
    Vec ket = Vec::Zero(3);
    ket[s] = 1.0;
    for (int d = 0; d < 2; ++d) {
      Mps bra = prepend_site(ket, *nxt[d]);
      for (int j = 0; j < 2; ++j) ov[s][d][j] = mps_overlap(bra, *cur[j]);
    }
  }
  Mat mix = Mat::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int s = 0; s < 3; ++s)
        for (int d = 0; d < 2; ++d)
          mix(i, j) += std::conj(m[s](d, i)) * ov[s][d][j];
  return mix;
}

Mps cg_construct(const MpsDoublet& next, cd a0, cd a1, int chi_max) {
  auto m = decouple_site_matrices();
  const Mps* nxt[2] = {&next.g0, &next.g1};
  std::vector<std::pair<cd, Mps>> terms;
  for (int s = 0; s < 3; ++s) {
    Vec ket = Vec::Zero(3);
    ket[s] = 1.0;
    Eigen::Vector2cd coeff = m[s] * Eigen::Vector2cd{a0, a1};
    for (int d = 0; d < 2; ++d) {
      if (std::abs(coeff[d]) < 1e-300) continue;
      terms.emplace_back(coeff[d], prepend_site(ket, *nxt[d]));
    }
  }
  Mps out = mps_sum(terms);
  out.compress(chi_max);
  return out;
}

MpsStep decouple_and_measure(const Eigen::Vector2cd& logical,
                             const MpsDoublet& current, const MpsDoublet& next,
                             const MeasBasis& basis, int forced_outcome,
                             std::mt19937_64* rng, const Mat* cached_mixing) {
  Eigen::Vector2cd a = logical / logical.norm();
  Mat mix = cached_mixing ? *cached_mixing : decouple_mixing(current, next);
  Eigen::Vector2cd b = mix * a;
  MpsStep step;
  step.leakage = std::max(0.0, 1.0 - b.squaredNorm());
  if (b.norm() < 1e-6)
    throw std::runtime_error("decouple_and_measure: decoupling annihilated the state");
  // Fidelity of the surviving (renormalized) logical state. The mixing matrix
  // is scalar by symmetry, so uniform amplitude loss shows up only as leakage
  // while the logical channel stays exact; deviations of the mixing matrix
  // from a scalar are what this fidelity measures.
  step.fidelity = std::norm(a.dot(b)) / b.squaredNorm();

  std::vector<double> probs;
  std::vector<Eigen::Vector2cd> branches;
  for (const RowVec& bra : basis.bras) {
    Eigen::Vector2cd c = branch_matrix(bra) * b;
    probs.push_back(c.squaredNorm() / b.squaredNorm());
    branches.push_back(c);
  }
  int chosen = forced_outcome;
  if (chosen < 0) {
    if (!rng)
      throw std::invalid_argument("decouple_and_measure: rng required for sampling");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(*rng), acc = 0.0;
    chosen = static_cast<int>(probs.size()) - 1;
    for (size_t o = 0; o < probs.size(); ++o) {
      acc += probs[o];
      if (r <= acc) {
        chosen = static_cast<int>(o);
        break;
      }
    }
  } else if (probs[chosen] < 1e-14) {
    throw std::runtime_error("decouple_and_measure: forced outcome '" +
                             basis.labels[chosen] + "' has vanishing probability");
  }
  step.label = basis.labels[chosen];
  step.outcome_index = chosen;
  step.probability = probs[chosen];
  step.new_logical = branches[chosen] / branches[chosen].norm();
  return step;
}

cd mps_site_expectation(const Mps& mps,
                        const std::vector<std::pair<int, Mat>>& ops) {
  Mat e = Mat::Ones(1, 1);
  for (int k = 0; k < mps.size(); ++k) {
    Mat op;
    for (const auto& [site, o] : ops)
      if (site == k) op = op.size() == 0 ? o : Mat(o * op);
    Mat next = Mat::Zero(mps.tensors[k][0].cols(), mps.tensors[k][0].cols());
    for (int pb = 0; pb < mps.phys[k]; ++pb) {
      if (op.size() == 0) {
        next += mps.tensors[k][pb].adjoint() * e * mps.tensors[k][pb];
        continue;
      }
      for (int pk = 0; pk < mps.phys[k]; ++pk) {
        cd c = op(pb, pk);
        if (c == cd(0, 0)) continue;
        next += c * (mps.tensors[k][pb].adjoint() * e * mps.tensors[k][pk]);
      }
    }
    e = std::move(next);
  }
  return e(0, 0);
}

double string_order(const Mps& mps, int k, int m) {
  if (k < 0 || m >= mps.size() || k >= m)
    throw std::invalid_argument("string_order: need 0 <= k < m < N");
  if (mps.phys[k] != 3 || mps.phys[m] != 3)
    throw std::invalid_argument("string_order: endpoints must be spin-1 sites");
  Mat sz = spin_operators(1.0).sz;
  Mat str = Mat::Zero(3, 3);
  str(0, 0) = -1.0;
  str(1, 1) = 1.0;
  str(2, 2) = -1.0;  // exp(i pi S^z)
  std::vector<std::pair<int, Mat>> ops = {{k, sz}, {m, sz}};
  for (int l = k + 1; l < m; ++l) {
    if (mps.phys[l] != 3)
      throw std::invalid_argument("string_order: string crosses a non-spin-1 site");
    ops.emplace_back(l, str);
  }
  return mps_site_expectation(mps, ops).real();
}

CorrelationFit correlation_length(const Mps& mps) {
  int n_spin = 0;
  for (int d : mps.phys)
    if (d == 3) ++n_spin;
  if (n_spin < 8)
    throw std::invalid_argument("correlation_length: chain too short for a fit window");
  int offset = mps.phys[0] == 3 ? 0 : 1;
  int k0 = offset + n_spin / 4;
  int rmax = std::min(n_spin / 2, n_spin - n_spin / 4 - 2);
  rmax = std::min(rmax, 24);

  Mat sz = spin_operators(1.0).sz;
  std::vector<double> rs, ys;
  double mean_k = mps_site_expectation(mps, {{k0, sz}}).real();
  for (int r = 1; r <= rmax; ++r) {
    int m = k0 + r;
    double mean_m = mps_site_expectation(mps, {{m, sz}}).real();
    double c = mps_site_expectation(mps, {{k0, sz}, {m, sz}}).real() - mean_k * mean_m;
    if (std::abs(c) < 1e-14) continue;
    rs.push_back(r);
    ys.push_back(std::log(std::abs(c)));
  }
  CorrelationFit fit;
  if (rs.size() < 3) return fit;  // non-decaying / zero signal

  // Least squares y = a + b r.
  double n = rs.size(), sr = 0, sy = 0, srr = 0, sry = 0;
  for (size_t i = 0; i < rs.size(); ++i) {
    sr += rs[i];
    sy += ys[i];
    srr += rs[i] * rs[i];
    sry += rs[i] * ys[i];
  }
  double denom = n * srr - sr * sr;
  double slope = (n * sry - sr * sy) / denom;
  double inter = (sy - slope * sr) / n;
  double rss = 0;
  for (size_t i = 0; i < rs.size(); ++i) {
    double e = ys[i] - (inter + slope * rs[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  if (slope < -1e-6) {
    fit.decaying = true;
    fit.xi = -1.0 / slope;
  }
  return fit;
}

}  // namespace haldane
