#include "haldane/dmrg.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/SVD>

#include "haldane/lanczos.hpp"
#include "haldane/sector_basis.hpp"

namespace haldane {

namespace {

using Env = std::vector<Mat>;  // one (bra-chi x ket-chi) block per MPO index

Env boundary_env() { return Env(1, Mat::Ones(1, 1)); }

Env advance_left(const Env& env, const Mpo& mpo, int k,
                 const std::vector<Mat>& site) {
  Env next(mpo.right_dim(k));
  Eigen::Index chi = site[0].cols();
  for (auto& m : next) m = Mat::Zero(chi, chi);
  for (int l = 0; l < mpo.left_dim(k); ++l) {
    if (env[l].size() == 0) continue;
    for (int r = 0; r < mpo.right_dim(k); ++r) {
      const Mat& w = mpo.ops[k][l][r];
      if (w.size() == 0) continue;
      for (int pb = 0; pb < mpo.phys_dims[k]; ++pb)
        for (int pk = 0; pk < mpo.phys_dims[k]; ++pk) {
          cd c = w(pb, pk);
          if (c == cd(0, 0)) continue;
          next[r] += c * (site[pb].adjoint() * env[l] * site[pk]);
        }
    }
  }
  return next;
}

Env advance_right(const Env& env, const Mpo& mpo, int k,
                  const std::vector<Mat>& site) {
  Env next(mpo.left_dim(k));
  Eigen::Index chi = site[0].rows();
  for (auto& m : next) m = Mat::Zero(chi, chi);
  for (int l = 0; l < mpo.left_dim(k); ++l)
    for (int r = 0; r < mpo.right_dim(k); ++r) {
      const Mat& w = mpo.ops[k][l][r];
      if (w.size() == 0 || env[r].size() == 0) continue;
      for (int pb = 0; pb < mpo.phys_dims[k]; ++pb)
        for (int pk = 0; pk < mpo.phys_dims[k]; ++pk) {
          cd c = w(pb, pk);
          if (c == cd(0, 0)) continue;
          next[l] += c * (site[pb].conjugate() * env[r] * site[pk].transpose());
        }
    }
  return next;
}

// Charge-feasible product configuration summing to the target.
std::vector<int> initial_charges(const std::vector<int>& dims, int target) {
  int n = static_cast<int>(dims.size());
  std::vector<int> min_rest(n + 1, 0), max_rest(n + 1, 0);
  for (int k = n - 1; k >= 0; --k) {
    auto q = site_charges(dims[k]);
    min_rest[k] = min_rest[k + 1] + *std::min_element(q.begin(), q.end());
    max_rest[k] = max_rest[k + 1] + *std::max_element(q.begin(), q.end());
  }
  if (target < min_rest[0] || target > max_rest[0])
    throw std::invalid_argument("dmrg_ground: sector target unreachable");
  std::vector<int> picks;
  int remaining = target;
  for (int k = 0; k < n; ++k) {
    auto q = site_charges(dims[k]);
    int best = q[0];
    double best_score = 1e300;
    for (int c : q) {
      int rest = remaining - c;
      if (rest < min_rest[k + 1] || rest > max_rest[k + 1]) continue;
      double score = std::abs(c - double(remaining) / (n - k));
      if (score < best_score) {
        best_score = score;
        best = c;
      }
    }
    picks.push_back(best);
    remaining -= best;
  }
  return picks;
}

struct PairSplit {
  std::vector<Mat> left, right;  // new site tensors
  std::vector<int> mid_charges;  // empty in the uncharged path
  double truncated_weight = 0.0;
};

// theta(row = l*d1+p1, col = p2*chi_r + r) -> truncated SVD, blockwise by
// charge when labels are supplied.
PairSplit split_theta(const Mat& theta, int d1, int d2, int chi_max,
                      double weight_tol, const std::vector<int>* row_q,
                      const std::vector<int>* col_q, bool carry_left) {
  struct Block {
    int charge = 0;
    std::vector<int> rows, cols;
    Eigen::JacobiSVD<Mat> svd;
  };
  std::vector<Block> blocks;
  if (row_q) {
    std::vector<int> charges = *row_q;
    std::sort(charges.begin(), charges.end());
    charges.erase(std::unique(charges.begin(), charges.end()), charges.end());
    for (int q : charges) {
      Block b;
      b.charge = q;
      for (int i = 0; i < static_cast<int>(row_q->size()); ++i)
        if ((*row_q)[i] == q) b.rows.push_back(i);
      for (int j = 0; j < static_cast<int>(col_q->size()); ++j)
        if ((*col_q)[j] == q) b.cols.push_back(j);
      if (b.rows.empty() || b.cols.empty()) continue;
      Mat sub(b.rows.size(), b.cols.size());
      for (size_t i = 0; i < b.rows.size(); ++i)
        for (size_t j = 0; j < b.cols.size(); ++j)
          sub(i, j) = theta(b.rows[i], b.cols[j]);
      b.svd.compute(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
      blocks.push_back(std::move(b));
    }
  } else {
    Block b;
    b.rows.resize(theta.rows());
    b.cols.resize(theta.cols());
    std::iota(b.rows.begin(), b.rows.end(), 0);
    std::iota(b.cols.begin(), b.cols.end(), 0);
    b.svd.compute(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    blocks.push_back(std::move(b));
  }

  // Global truncation over all blocks.
  struct Entry {
    double s;
    int block, idx;
  };
  std::vector<Entry> entries;
  double total = 0.0;
  for (int bi = 0; bi < static_cast<int>(blocks.size()); ++bi) {
    const auto& s = blocks[bi].svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      entries.push_back({s[i], bi, static_cast<int>(i)});
      total += s[i] * s[i];
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.s > b.s; });
  int keep = 0;
  for (const Entry& e : entries) {
    if (keep >= chi_max) break;
    if (keep > 0 && total > 0 && e.s * e.s < weight_tol * total) break;
    ++keep;
  }
  keep = std::max(keep, 1);

  PairSplit out;
  for (int i = keep; i < static_cast<int>(entries.size()); ++i)
    out.truncated_weight += entries[i].s * entries[i].s;

  Eigen::Index chi_l = theta.rows() / d1, chi_r = theta.cols() / d2;
  out.left.assign(d1, Mat::Zero(chi_l, keep));
  out.right.assign(d2, Mat::Zero(keep, chi_r));
  for (int m = 0; m < keep; ++m) {
    const Entry& e = entries[m];
    const Block& b = blocks[e.block];
    double s = e.s;
    Vec u = b.svd.matrixU().col(e.idx);
    Vec v = b.svd.matrixV().col(e.idx).conjugate();  // row of V^dagger
    if (row_q) out.mid_charges.push_back(b.charge);
    for (size_t i = 0; i < b.rows.size(); ++i) {
      int row = b.rows[i];
      out.left[row % d1](row / d1, m) = (carry_left ? s : 1.0) * u[i];
    }
    for (size_t j = 0; j < b.cols.size(); ++j) {
      int col = b.cols[j];
      out.right[col / chi_r](m, col % chi_r) = (carry_left ? 1.0 : s) * v[j];
    }
  }
  return out;
}

}  // namespace

DmrgResult dmrg_ground(const Mpo& mpo, std::optional<int> two_sz,
                       const DmrgOptions& opts) {
  const std::vector<int>& dims = mpo.phys_dims;
  int n = static_cast<int>(dims.size());
  if (n < 2) throw std::invalid_argument("dmrg_ground: need at least two sites");
  if (opts.chi_max < 2) throw std::invalid_argument("dmrg_ground: chi_max < 2");

  Mps mps;
  mps.phys = dims;
  mps.tensors.resize(n);
  bool charged = two_sz.has_value();
  std::mt19937_64 rng(opts.seed);
  if (charged) {
    auto picks = initial_charges(dims, *two_sz);
    mps.bond_charges.assign(n + 1, {});
    mps.bond_charges[0] = {0};
    int acc = 0;
    for (int k = 0; k < n; ++k) {
      auto q = site_charges(dims[k]);
      std::vector<Mat> site(dims[k], Mat::Zero(1, 1));
      for (int p = 0; p < dims[k]; ++p)
        if (q[p] == picks[k]) site[p](0, 0) = 1.0;
      mps.tensors[k] = std::move(site);
      acc += picks[k];
      mps.bond_charges[k + 1] = {acc};
    }
  } else {
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
      Vec ket(dims[k]);
      for (int p = 0; p < dims[k]; ++p) ket[p] = cd(g(rng), g(rng));
      ket /= ket.norm();
      std::vector<Mat> site;
      for (int p = 0; p < dims[k]; ++p) site.push_back(Mat::Constant(1, 1, ket[p]));
      mps.tensors[k] = std::move(site);
    }
  }
  mps.center = 0;

  std::vector<Env> left(n), right(n);
  left[0] = boundary_env();
  right[n - 1] = boundary_env();
  for (int k = n - 1; k >= 1; --k)
    right[k - 1] = advance_right(right[k], mpo, k, mps.tensors[k]);

  DmrgResult res;
  res.state = std::move(mps);
  Mps& m = res.state;

  auto local_charges = [&](int k) {
    // Row and column charge labels of the fused two-site wavefunction.
    std::pair<std::vector<int>, std::vector<int>> out;
    auto q1 = site_charges(dims[k]), q2 = site_charges(dims[k + 1]);
    for (int ql : m.bond_charges[k])
      for (int p = 0; p < dims[k]; ++p) out.first.push_back(ql + q1[p]);
    for (int p = 0; p < dims[k + 1]; ++p)
      for (int qr : m.bond_charges[k + 2]) out.second.push_back(qr - q2[p]);
    return out;
  };
  double energy = 0.0;

  auto optimize_pair = [&](int k, bool to_right) {
    int d1 = dims[k], d2 = dims[k + 1];
    Eigen::Index chi_l = m.tensors[k][0].rows(), chi_r = m.tensors[k + 1][0].cols();
    long long dim = chi_l * d1 * d2 * chi_r;

    std::vector<int> rq, cq;
    std::vector<char> mask;
    if (charged) {
      std::tie(rq, cq) = local_charges(k);
      mask.assign(dim, 0);
      for (size_t i = 0; i < rq.size(); ++i)
        for (size_t j = 0; j < cq.size(); ++j)
          if (rq[i] == cq[j]) mask[i * cq.size() + j] = 1;
    }
    auto apply_mask = [&](Vec& v) {
      if (!charged) return;
      for (long long i = 0; i < dim; ++i)
        if (!mask[i]) v[i] = cd(0, 0);
    };

    // Guess from the current pair; theta(row=(l*d1+p1), col=(p2*chi_r+r)).
    Mat theta0(chi_l * d1, d2 * chi_r);
    for (int p1 = 0; p1 < d1; ++p1)
      for (int p2 = 0; p2 < d2; ++p2) {
        Mat t = m.tensors[k][p1] * m.tensors[k + 1][p2];
        for (Eigen::Index l = 0; l < chi_l; ++l)
          theta0.block(l * d1 + p1, p2 * chi_r, 1, chi_r) = t.row(l);
      }

    auto vec_of = [&](const Mat& t) {
      Vec v(dim);
      for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) v[i * t.cols() + j] = t(i, j);
      return v;
    };
    auto mat_of = [&](const Vec& v) {
      Mat t(chi_l * d1, d2 * chi_r);
      for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) t(i, j) = v[i * t.cols() + j];
      return t;
    };

    auto apply_h = [&](const Vec& in, Vec& out) {
      Mat t = mat_of(in);
      // T[p1][p2] blocks of (chi_l x chi_r).
      std::vector<std::vector<Mat>> tb(d1, std::vector<Mat>(d2));
      for (int p1 = 0; p1 < d1; ++p1)
        for (int p2 = 0; p2 < d2; ++p2) {
          Mat blk(chi_l, chi_r);
          for (Eigen::Index l = 0; l < chi_l; ++l)
            blk.row(l) = t.block(l * d1 + p1, p2 * chi_r, 1, chi_r);
          tb[p1][p2] = std::move(blk);
        }
      int wl = mpo.left_dim(k), wm = mpo.right_dim(k), wr = mpo.right_dim(k + 1);
      // U[b][q1][p2] = sum_{a,p1} W1[a][b](q1,p1) L[a] T[p1][p2]
      std::vector<std::vector<std::vector<Mat>>> u(
          wm, std::vector<std::vector<Mat>>(d1, std::vector<Mat>(d2)));
      for (int a = 0; a < wl; ++a) {
        if (left[k][a].size() == 0) continue;
        for (int b = 0; b < wm; ++b) {
          const Mat& w1 = mpo.ops[k][a][b];
          if (w1.size() == 0) continue;
          for (int q1 = 0; q1 < d1; ++q1)
            for (int p1 = 0; p1 < d1; ++p1) {
              cd c = w1(q1, p1);
              if (c == cd(0, 0)) continue;
              for (int p2 = 0; p2 < d2; ++p2) {
                Mat add = c * (left[k][a] * tb[p1][p2]);
                if (u[b][q1][p2].size() == 0)
                  u[b][q1][p2] = std::move(add);
                else
                  u[b][q1][p2] += add;
              }
            }
        }
      }
      std::vector<std::vector<Mat>> ob(d1, std::vector<Mat>(d2));
      for (int b = 0; b < wm; ++b)
        for (int c2 = 0; c2 < wr; ++c2) {
          const Mat& w2 = mpo.ops[k + 1][b][c2];
          if (w2.size() == 0 || right[k + 1][c2].size() == 0) continue;
          for (int q2 = 0; q2 < d2; ++q2)
            for (int p2 = 0; p2 < d2; ++p2) {
              cd c = w2(q2, p2);
              if (c == cd(0, 0)) continue;
              for (int q1 = 0; q1 < d1; ++q1) {
                if (u[b][q1][p2].size() == 0) continue;
                Mat add = c * (u[b][q1][p2] * right[k + 1][c2].transpose());
                if (ob[q1][q2].size() == 0)
                  ob[q1][q2] = std::move(add);
                else
                  ob[q1][q2] += add;
              }
            }
        }
      Mat to(chi_l * d1, d2 * chi_r);
      to.setZero();
      for (int q1 = 0; q1 < d1; ++q1)
        for (int q2 = 0; q2 < d2; ++q2) {
          if (ob[q1][q2].size() == 0) continue;
          for (Eigen::Index l = 0; l < chi_l; ++l)
            to.block(l * d1 + q1, q2 * chi_r, 1, chi_r) = ob[q1][q2].row(l);
        }
      out = vec_of(to);
      apply_mask(out);
    };

    Vec guess = vec_of(theta0);
    apply_mask(guess);
    if (guess.norm() < 1e-12) {
      std::normal_distribution<double> g(0.0, 1.0);
      for (long long i = 0; i < dim; ++i) guess[i] = cd(g(rng), g(rng));
      apply_mask(guess);
    }
    guess /= guess.norm();

    LanczosOptions lo;
    lo.k = 1;
    lo.max_basis = static_cast<int>(std::min<long long>(opts.local_basis, dim));
    lo.max_restarts = opts.local_restarts;
    lo.tol = opts.local_tol;
    lo.seed = rng();
    LanczosResult lr = lanczos_lowest(apply_h, dim, lo, {guess});
    energy = lr.values[0];
    Vec ground = lr.vectors[0];
    apply_mask(ground);
    ground /= ground.norm();

    PairSplit split = split_theta(mat_of(ground), d1, d2, opts.chi_max,
                                  opts.weight_tol, charged ? &rq : nullptr,
                                  charged ? &cq : nullptr, !to_right);
    m.tensors[k] = std::move(split.left);
    m.tensors[k + 1] = std::move(split.right);
    if (charged) m.bond_charges[k + 1] = split.mid_charges;
    if (to_right) {
      m.center = k + 1;
      left[k + 1] = advance_left(left[k], mpo, k, m.tensors[k]);
    } else {
      m.center = k;
      right[k] = advance_right(right[k + 1], mpo, k + 1, m.tensors[k + 1]);
    }
  };

  double prev_energy = 0.0;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (int k = 0; k < n - 1; ++k) optimize_pair(k, true);
    res.report.half_sweep_energies.push_back(energy);
    for (int k = n - 2; k >= 0; --k) optimize_pair(k, false);
    res.report.half_sweep_energies.push_back(energy);
    res.report.sweeps = sweep + 1;
    if (sweep > 0 && std::abs(energy - prev_energy) < opts.tol) {
      res.report.converged = true;
      break;
    }
    prev_energy = energy;
  }

  // Center sits at site 0 after the backward half-sweep.
  double nrm = m.norm();
  for (Mat& a : m.tensors[m.center]) a /= nrm;
  res.energy = energy;
  return res;
}

}  // namespace haldane
