#pragma once

#include <string>
#include <vector>

#include "haldane/common.hpp"
#include "haldane/mpo.hpp"

namespace haldane {

struct EntanglementData {
  int cut = 0;                   // number of sites on the left
  std::vector<double> weights;   // descending Schmidt probabilities
  double entropy_bits = 0.0;
};

// Open-boundary tensor train; tensors[k][p] is the chi_l x chi_r matrix of
// site k at physical index p. Site 0 is the most significant index, matching
// PureState. bond_charges, when non-empty, holds one integer 2*S^z label per
// virtual state on each of the N+1 bonds (prefix charge from the left).
struct Mps {
  std::vector<std::vector<Mat>> tensors;
  std::vector<int> phys;
  int center = -1;  // mixed-canonical center; -1 when unknown
  std::vector<std::vector<int>> bond_charges;

  int size() const { return static_cast<int>(tensors.size()); }
  int bond_dim(int b) const;  // b in [0, N]
  int max_bond_dim() const;
  bool has_charges() const { return !bond_charges.empty(); }

  double norm() const;
  void normalize();
  // Sweeps QR/LQ factors so that sites < c are left-isometries and
  // sites > c are right-isometries. Drops charge labels.
  void canonicalize(int c);
  // SVD truncation to chi_max, discarding weights below weight_tol.
  // Leaves the state normalized with center at the last site.
  void compress(int chi_max, double weight_tol = 1e-14);

  Vec to_dense() const;

  void save(const std::string& path) const;
  static Mps load(const std::string& path);
};

Mps product_mps(const std::vector<Vec>& kets);

// Extra leading site in the given local state.
Mps prepend_site(const Vec& ket, const Mps& rest);

cd mps_overlap(const Mps& bra, const Mps& ket);

// <bra| mpo |ket>; states need not be normalized.
cd mps_expectation(const Mps& bra, const Mpo& mpo, const Mps& ket);

// sum_i coeff_i |term_i>, assembled by bond-wise direct sum (uncompressed).
Mps mps_sum(const std::vector<std::pair<cd, Mps>>& terms);

// Schmidt data across the bond after `cut` sites; input is copied.
EntanglementData mps_entanglement(const Mps& mps, int cut);

// Largest deviation from the left/right isometry conditions given the center.
double canonical_residual(const Mps& mps);

}  // namespace haldane
