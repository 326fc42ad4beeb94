#pragma once

#include "haldane/common.hpp"

namespace haldane {

// Matrix product operator with per-site rectangular virtual dimensions.
// W[k] is a (left_dim x right_dim) grid of d_k x d_k site operators; empty
// cells are zero. Site 0 has left_dim 1, the last site right_dim 1.
struct Mpo {
  // ops[k][l][r] : site operator (may have size 0 meaning zero).
  std::vector<std::vector<std::vector<Mat>>> ops;
  std::vector<int> phys_dims;

  int size() const { return static_cast<int>(ops.size()); }
  int left_dim(int k) const { return static_cast<int>(ops[k].size()); }
  int right_dim(int k) const { return static_cast<int>(ops[k][0].size()); }

  // Dense matrix on the full product space; small chains only.
  Mat to_dense() const;
};

// Nearest-neighbour MPO from per-bond lists of (left op, right op) pairs
// plus optional on-site terms. pair_terms[b] couples sites b and b+1.
struct BondPairs {
  std::vector<std::pair<Mat, Mat>> pairs;
};

Mpo nearest_neighbour_mpo(const std::vector<int>& phys_dims,
                          const std::vector<BondPairs>& bond_terms,
                          const std::vector<Mat>& onsite_terms = {});

// MPO of a single-site operator embedded in an identity chain.
Mpo single_site_mpo(const std::vector<int>& phys_dims, int site, const Mat& op);

// MPO of a sum of one single-site operator per site (e.g. total S^z or S^-).
Mpo sum_site_mpo(const std::vector<int>& phys_dims, const std::vector<Mat>& ops);

}  // namespace haldane
