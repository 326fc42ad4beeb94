#pragma once

#include <unordered_map>

#include "haldane/common.hpp"

namespace haldane {

// Local 2*S^z charges in descending order for a site of dimension d:
// d=3 -> {+2, 0, -2}, d=2 -> {+1, -1}.
std::vector<int> site_charges(int dim);

// Enumeration of the product states with a fixed total 2*S^z, with O(n)
// ranking between full-space and sector indices. Site 0 is the most
// significant digit of the full-space index.
class SectorBasis {
 public:
  SectorBasis(std::vector<int> dims, int two_sz_total);

  long long size() const { return static_cast<long long>(states_.size()); }
  const std::vector<long long>& states() const { return states_; }
  long long full_index(long long sector_index) const { return states_[sector_index]; }
  // -1 when the full-space state does not lie in the sector.
  long long sector_index(long long full_index) const;

  const std::vector<int>& dims() const { return dims_; }
  int two_sz() const { return two_sz_; }

  void decode(long long full_index, std::vector<int>& digits) const;
  long long encode(const std::vector<int>& digits) const;

  Vec to_full(const Vec& sector_vec) const;
  Vec to_sector(const Vec& full_vec) const;

 private:
  std::vector<int> dims_;
  int two_sz_;
  std::vector<long long> states_;
  std::unordered_map<long long, long long> rank_;
};

// Sector-restricted sparse Hamiltonian built from two-site terms.
// terms: (site k, matrix on sites (k,k+1), factor).
struct TwoSiteTerm {
  int site;
  Mat matrix;
  double factor = 1.0;
};

SparseMat sector_hamiltonian(const SectorBasis& basis,
                             const std::vector<TwoSiteTerm>& terms);

}  // namespace haldane
