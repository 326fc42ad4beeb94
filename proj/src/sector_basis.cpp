#include "haldane/sector_basis.hpp"

#include <functional>

namespace haldane {

std::vector<int> site_charges(int dim) {
  if (dim == 3) return {2, 0, -2};
  if (dim == 2) return {1, -1};
  throw std::invalid_argument("site_charges: local dimension must be 2 or 3");
}

SectorBasis::SectorBasis(std::vector<int> dims, int two_sz_total)
    : dims_(std::move(dims)), two_sz_(two_sz_total) {
  int n = static_cast<int>(dims_.size());
  // Reachable charge bounds for the remaining suffix, for pruning.
  std::vector<int> min_rest(n + 1, 0), max_rest(n + 1, 0);
  for (int k = n - 1; k >= 0; --k) {
    auto q = site_charges(dims_[k]);
    min_rest[k] = min_rest[k + 1] + q.back();
    max_rest[k] = max_rest[k + 1] + q.front();
  }
  std::vector<int> digits(n, 0);
  std::vector<long long> strides(n, 1);
  for (int k = n - 2; k >= 0; --k) strides[k] = strides[k + 1] * dims_[k + 1];

  // Iterative depth-first enumeration in ascending full-index order.
  std::function<void(int, int, long long)> walk = [&](int k, int charge,
                                                      long long index) {
    if (k == n) {
      if (charge == two_sz_) states_.push_back(index);
      return;
    }
    int need = two_sz_ - charge;
    if (need < min_rest[k] || need > max_rest[k]) return;
    auto q = site_charges(dims_[k]);
    for (int p = 0; p < dims_[k]; ++p)
      walk(k + 1, charge + q[p], index + p * strides[k]);
  };
  walk(0, 0, 0);
  rank_.reserve(states_.size() * 2);
  for (long long i = 0; i < size(); ++i) rank_[states_[i]] = i;
}

long long SectorBasis::sector_index(long long full_index) const {
  auto it = rank_.find(full_index);
  return it == rank_.end() ? -1 : it->second;
}

void SectorBasis::decode(long long full_index, std::vector<int>& digits) const {
  int n = static_cast<int>(dims_.size());
  digits.resize(n);
  for (int k = n - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(full_index % dims_[k]);
    full_index /= dims_[k];
  }
}

long long SectorBasis::encode(const std::vector<int>& digits) const {
  long long idx = 0;
  for (size_t k = 0; k < dims_.size(); ++k) idx = idx * dims_[k] + digits[k];
  return idx;
}

Vec SectorBasis::to_full(const Vec& sector_vec) const {
  long long full = 1;
  for (int d : dims_) full *= d;
  Vec out = Vec::Zero(full);
  for (long long i = 0; i < size(); ++i) out[states_[i]] = sector_vec[i];
  return out;
}

Vec SectorBasis::to_sector(const Vec& full_vec) const {
  Vec out(size());
  for (long long i = 0; i < size(); ++i) out[i] = full_vec[states_[i]];
  return out;
}

SparseMat sector_hamiltonian(const SectorBasis& basis,
                             const std::vector<TwoSiteTerm>& terms) {
  const auto& dims = basis.dims();
  int n = static_cast<int>(dims.size());
  // Per term, per source pair-state: list of (target pair-state, amplitude).
  struct Column {
    std::vector<std::pair<int, cd>> entries;
  };
  struct Prepared {
    int site;
    int d2;
    std::vector<Column> cols;
  };
  std::vector<Prepared> prepared;
  for (const auto& term : terms) {
    if (term.site < 0 || term.site + 1 >= n)
      throw std::invalid_argument("sector_hamiltonian: term site out of range");
    if (term.factor == 0.0) continue;
    int d1 = dims[term.site], d2 = dims[term.site + 1];
    Prepared p{term.site, d2, std::vector<Column>(d1 * d2)};
    for (int b = 0; b < d1 * d2; ++b)
      for (int a = 0; a < d1 * d2; ++a) {
        cd v = term.factor * term.matrix(a, b);
        if (std::abs(v) > 1e-300) p.cols[b].entries.emplace_back(a, v);
      }
    prepared.push_back(std::move(p));
  }

  std::vector<Eigen::Triplet<cd>> triplets;
  std::vector<int> digits;
  for (long long col = 0; col < basis.size(); ++col) {
    basis.decode(basis.full_index(col), digits);
    for (const auto& p : prepared) {
      int k = p.site;
      int b = digits[k] * p.d2 + digits[k + 1];
      for (const auto& [a, v] : p.cols[b].entries) {
        int save1 = digits[k], save2 = digits[k + 1];
        digits[k] = a / p.d2;
        digits[k + 1] = a % p.d2;
        long long row = basis.sector_index(basis.encode(digits));
        digits[k] = save1;
        digits[k + 1] = save2;
        if (row < 0) continue;  // charge-violating entry (exactly zero anyway)
        triplets.emplace_back(row, col, v);
      }
    }
  }
  SparseMat h(basis.size(), basis.size());
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();
  return h;
}

}  // namespace haldane
