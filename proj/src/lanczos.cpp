#include "haldane/lanczos.hpp"

#include <random>

#include <Eigen/Eigenvalues>

namespace haldane {

namespace {

Vec random_vector(long long dim, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Vec v(dim);
  for (long long i = 0; i < dim; ++i) v[i] = cd(dist(rng), dist(rng));
  v.normalize();
  return v;
}

// Two-pass classical Gram-Schmidt; returns the accumulated coefficients.
Vec orthogonalize(const std::vector<Vec>& basis, Vec& w) {
  Vec coeffs = Vec::Zero(basis.size());
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t i = 0; i < basis.size(); ++i) {
      cd c = basis[i].dot(w);
      w -= c * basis[i];
      coeffs[i] += c;
    }
  }
  return coeffs;
}

}  // namespace

LanczosResult lanczos_lowest(const std::function<void(const Vec&, Vec&)>& apply,
                             long long dim, const LanczosOptions& opts,
                             const std::vector<Vec>& initial_guesses) {
  if (opts.k < 1 || opts.k > dim)
    throw std::invalid_argument("lanczos_lowest: bad k");
  std::mt19937_64 rng(opts.seed);
  int max_basis = static_cast<int>(std::min<long long>(
      dim, dim > 50'000 ? std::min(opts.max_basis, 80) : opts.max_basis));

  LanczosResult result;
  std::vector<Vec> seeds = initial_guesses;
  int iterations = 0;

  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    std::vector<Vec> basis;
    // Seed the cycle with previous Ritz vectors (thick restart) or guesses.
    for (const Vec& s : seeds) {
      Vec v = s;
      orthogonalize(basis, v);
      double nrm = v.norm();
      if (nrm > 1e-8) basis.push_back(v / nrm);
    }
    while (static_cast<int>(basis.size()) < opts.k) {
      Vec v = random_vector(dim, rng);
      orthogonalize(basis, v);
      double nrm = v.norm();
      if (nrm > 1e-8) basis.push_back(v / nrm);
    }

    Mat t = Mat::Zero(max_basis, max_basis);
    std::vector<std::vector<bool>> rec(max_basis, std::vector<bool>(max_basis, false));
    size_t applied = 0;
    bool invariant = false;
    while (static_cast<int>(basis.size()) < max_basis) {
      // Apply H to the next unprocessed basis vector.
      if (applied >= basis.size()) break;
      Vec w(dim);
      apply(basis[applied], w);
      ++iterations;
      Vec coeffs = orthogonalize(basis, w);
      for (size_t i = 0; i < basis.size(); ++i) {
        t(i, applied) = coeffs[i];
        rec[i][applied] = true;
      }
      double nrm = w.norm();
      ++applied;
      if (nrm < 1e-12) {
        // Invariant subspace; extend with a random direction if possible.
        Vec v = random_vector(dim, rng);
        orthogonalize(basis, v);
        double n2 = v.norm();
        if (n2 < 1e-8) { invariant = true; break; }
        basis.push_back(v / n2);
      } else {
        t(basis.size(), applied - 1) = nrm;
        rec[basis.size()][applied - 1] = true;
        basis.push_back(w / nrm);
      }
    }
    // Finish applying H to any remaining seeded vectors so T is complete.
    while (applied < basis.size()) {
      Vec w(dim);
      apply(basis[applied], w);
      ++iterations;
      for (size_t i = 0; i < basis.size(); ++i) {
        t(i, applied) = basis[i].dot(w);
        rec[i][applied] = true;
      }
      ++applied;
    }
    int m = static_cast<int>(basis.size());
    Mat tm(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        tm(i, j) = rec[i][j] ? t(i, j) : std::conj(t(j, i));
    tm = 0.5 * (tm + tm.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(tm);

    int k = std::min<int>(opts.k, m);
    result.values.assign(k, 0.0);
    result.vectors.assign(k, Vec());
    result.residuals.assign(k, 0.0);
    for (int j = 0; j < k; ++j) {
      result.values[j] = es.eigenvalues()[j];
      Vec rv = Vec::Zero(dim);
      for (int i = 0; i < m; ++i) rv += es.eigenvectors()(i, j) * basis[i];
      rv.normalize();
      result.vectors[j] = rv;
    }
    // Residuals via one extra application each.
    bool done = true;
    for (int j = 0; j < k; ++j) {
      Vec w(dim);
      apply(result.vectors[j], w);
      ++iterations;
      result.residuals[j] = (w - result.values[j] * result.vectors[j]).norm();
      if (result.residuals[j] > opts.tol) done = false;
    }
    result.iterations = iterations;
    if (done || invariant || m >= dim) {
      result.converged = done || m >= dim;
      return result;
    }
    // Thick restart from the current Ritz vectors plus the next few above.
    seeds.clear();
    int extra = std::min(m, k + 4);
    for (int j = 0; j < extra; ++j) {
      Vec rv = Vec::Zero(dim);
      for (int i = 0; i < m; ++i) rv += es.eigenvectors()(i, j) * basis[i];
      seeds.push_back(rv.normalized());
    }
  }
  result.converged = false;
  return result;
}

LanczosResult lanczos_lowest(const SparseMat& h, const LanczosOptions& opts,
                             const std::vector<Vec>& initial_guesses) {
  return lanczos_lowest(
      [&h](const Vec& x, Vec& y) { y.noalias() = h * x; }, h.rows(), opts,
      initial_guesses);
}

}  // namespace haldane
