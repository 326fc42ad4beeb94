#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace haldane {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RowVec = Eigen::RowVectorXcd;
using SparseMat = Eigen::SparseMatrix<cd>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec kron_vec(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Frobenius distance up to a global phase, minimized over the phase.
inline double phase_free_distance(const Mat& a, const Mat& b) {
  cd ov = (a.adjoint() * b).trace();
  cd phase = std::abs(ov) > 1e-300 ? ov / std::abs(ov) : cd(1.0, 0.0);
  return (a * phase - b).norm();
}

}  // namespace haldane
