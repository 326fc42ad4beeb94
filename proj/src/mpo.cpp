#include "haldane/mpo.hpp"

namespace haldane {

Mat Mpo::to_dense() const {
  // Accumulate partial products indexed by the running MPO bond.
  long long dim = 1;
  for (int d : phys_dims) dim *= d;
  if (dim > 4000) throw std::runtime_error("Mpo::to_dense: chain too large");

  std::vector<Mat> partial(1, Mat::Identity(1, 1));
  long long ldim = 1;
  for (int k = 0; k < size(); ++k) {
    int d = phys_dims[k];
    std::vector<Mat> next(right_dim(k), Mat::Zero(ldim * d, ldim * d));
    for (int l = 0; l < left_dim(k); ++l) {
      if (partial[l].size() == 0) continue;
      for (int r = 0; r < right_dim(k); ++r) {
        const Mat& w = ops[k][l][r];
        if (w.size() == 0) continue;
        next[r] += kron(partial[l], w);
      }
    }
    partial = std::move(next);
    ldim *= d;
  }
  return partial[0];
}

Mpo nearest_neighbour_mpo(const std::vector<int>& phys_dims,
                          const std::vector<BondPairs>& bond_terms,
                          const std::vector<Mat>& onsite_terms) {
  int n = static_cast<int>(phys_dims.size());
  if (static_cast<int>(bond_terms.size()) != n - 1)
    throw std::invalid_argument("nearest_neighbour_mpo: bond list size mismatch");
  Mpo mpo;
  mpo.phys_dims = phys_dims;
  mpo.ops.resize(n);
  // Virtual index layout at bond b: 0 = pending (identity so far),
  // 1..m_b = one pair's left operator placed at site b, last = done.
  for (int k = 0; k < n; ++k) {
    int d = phys_dims[k];
    int ml = k > 0 ? static_cast<int>(bond_terms[k - 1].pairs.size()) : 0;
    int mr = k < n - 1 ? static_cast<int>(bond_terms[k].pairs.size()) : 0;
    int dl = k == 0 ? 1 : 2 + ml;
    int dr = k == n - 1 ? 1 : 2 + mr;
    mpo.ops[k].assign(dl, std::vector<Mat>(dr));
    Mat id = Mat::Identity(d, d);
    Mat onsite = (k < static_cast<int>(onsite_terms.size()) &&
                  onsite_terms[k].size() != 0)
                     ? onsite_terms[k]
                     : Mat();

    int pending_l = 0, done_l = dl - 1;
    int pending_r = 0, done_r = dr - 1;
    if (k < n - 1) {
      mpo.ops[k][pending_l][pending_r] = id;
      for (int m = 0; m < mr; ++m)
        mpo.ops[k][pending_l][1 + m] = bond_terms[k].pairs[m].first;
      if (onsite.size() != 0) mpo.ops[k][pending_l][done_r] = onsite;
    } else {
      if (onsite.size() != 0)
        mpo.ops[k][pending_l][0] = onsite;
      else if (dl == 1)
        mpo.ops[k][pending_l][0] = Mat::Zero(d, d);
    }
    if (k > 0) {
      for (int m = 0; m < ml; ++m)
        mpo.ops[k][1 + m][done_r] = bond_terms[k - 1].pairs[m].second;
      mpo.ops[k][done_l][done_r] = id;
      if (k == n - 1 && onsite.size() != 0) {
        // onsite merged into the pending row above; pending row at the last
        // site carries only the onsite term.
        mpo.ops[k][pending_l][0] = onsite;
      }
    }
  }
  return mpo;
}

Mpo single_site_mpo(const std::vector<int>& phys_dims, int site, const Mat& op) {
  int n = static_cast<int>(phys_dims.size());
  Mpo mpo;
  mpo.phys_dims = phys_dims;
  mpo.ops.resize(n);
  for (int k = 0; k < n; ++k) {
    mpo.ops[k].assign(1, std::vector<Mat>(1));
    mpo.ops[k][0][0] = k == site ? op : Mat::Identity(phys_dims[k], phys_dims[k]);
  }
  return mpo;
}

Mpo sum_site_mpo(const std::vector<int>& phys_dims, const std::vector<Mat>& site_ops) {
  int n = static_cast<int>(phys_dims.size());
  Mpo mpo;
  mpo.phys_dims = phys_dims;
  mpo.ops.resize(n);
  for (int k = 0; k < n; ++k) {
    int d = phys_dims[k];
    int dl = k == 0 ? 1 : 2;
    int dr = k == n - 1 ? 1 : 2;
    mpo.ops[k].assign(dl, std::vector<Mat>(dr));
    Mat id = Mat::Identity(d, d);
    if (k == 0 && k == n - 1) {
      mpo.ops[k][0][0] = site_ops[k];
    } else if (k == 0) {
      mpo.ops[k][0][0] = id;
      mpo.ops[k][0][1] = site_ops[k];
    } else if (k == n - 1) {
      mpo.ops[k][0][0] = site_ops[k];
      mpo.ops[k][1][0] = id;
    } else {
      mpo.ops[k][0][0] = id;
      mpo.ops[k][0][1] = site_ops[k];
      mpo.ops[k][1][1] = id;
    }
  }
  return mpo;
}

}  // namespace haldane
