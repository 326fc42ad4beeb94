#include "haldane/krylov_propagator.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace haldane {

namespace {

// Single Krylov step; returns the result and an error estimate from the
// last-component magnitude of the small exponential.
Vec krylov_step(const SparseMat& h, const Vec& v, double t, int m,
                double* err_estimate) {
  double beta = v.norm();
  if (beta < 1e-300) {
    *err_estimate = 0.0;
    return v;
  }
  long long dim = v.size();
  m = static_cast<int>(std::min<long long>(m, dim));
  std::vector<Vec> basis;
  basis.push_back(v / beta);
  Mat tsmall = Mat::Zero(m, m);
  int built = 1;
  for (int j = 0; j < m; ++j) {
    Vec w = h * basis[j];
    // Full reorthogonalization keeps the small matrix accurate.
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < built; ++i) {
        cd c = basis[i].dot(w);
        tsmall(i, j) += c;
        w -= c * basis[i];
      }
    if (j + 1 < m) {
      double nrm = w.norm();
      if (nrm < 1e-14) { m = j + 1; break; }
      tsmall(j + 1, j) = nrm;
      basis.push_back(w / nrm);
      ++built;
    }
  }
  Mat tm = tsmall.topLeftCorner(m, m);
  tm = 0.5 * (tm + tm.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(tm);
  Vec phases(m);
  for (int i = 0; i < m; ++i)
    phases[i] = std::exp(cd(0, -t * es.eigenvalues()[i]));
  Vec e0 = Vec::Zero(m);
  e0[0] = 1.0;
  Vec small = es.eigenvectors() *
              (phases.array() * (es.eigenvectors().adjoint() * e0).array()).matrix();
  Vec out = Vec::Zero(dim);
  for (int i = 0; i < m; ++i) out += beta * small[i] * basis[i];
  *err_estimate = m > 1 ? beta * std::abs(small[m - 1]) : 0.0;
  return out;
}

}  // namespace

Vec krylov_expm_apply(const SparseMat& h, const Vec& v, double t,
                      const KrylovOptions& opts) {
  int substeps = 1;
  while (substeps <= opts.max_substeps) {
    double dt = t / substeps;
    Vec cur = v;
    double worst = 0.0;
    for (int s = 0; s < substeps; ++s) {
      double err = 0.0;
      cur = krylov_step(h, cur, dt, opts.max_dim, &err);
      worst = std::max(worst, err);
    }
    if (worst <= opts.tol) {
      // Unitarity restoration; drift is within the error estimate.
      double nrm = cur.norm();
      if (nrm > 1e-300) cur /= nrm;
      return cur;
    }
    substeps *= 2;
  }
  throw std::runtime_error(
      "krylov_expm_apply: propagator error estimate exceeds budget");
}

}  // namespace haldane
