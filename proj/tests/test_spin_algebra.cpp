#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "haldane/spin_algebra.hpp"

using namespace haldane;

namespace {

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

cd braket(const RowVec& a, const RowVec& b) {
  return (a.conjugate() * b.transpose())(0, 0);
}

std::vector<double> sorted_eigs(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  std::vector<double> v(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
  return v;
}

}  // namespace

TEST_CASE("spin operators: algebra and Casimir") {
  for (double s : {0.5, 1.0}) {
    SpinOps ops = spin_operators(s);
    CHECK((ops.sx - ops.sx.adjoint()).norm() < 1e-14);
    CHECK((commutator(ops.sx, ops.sy) - cd(0, 1) * ops.sz).norm() < 1e-14);
    CHECK((commutator(ops.sy, ops.sz) - cd(0, 1) * ops.sx).norm() < 1e-14);
    CHECK((commutator(ops.sz, ops.sx) - cd(0, 1) * ops.sy).norm() < 1e-14);
    Mat casimir = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
    double c = s * (s + 1);
    CHECK((casimir - c * Mat::Identity(casimir.rows(), casimir.cols())).norm() < 1e-14);
  }
  CHECK_THROWS_AS(spin_operators(1.5), std::invalid_argument);
}

TEST_CASE("spin-1: S^z defining representation and S^x spectrum") {
  SpinOps ops = spin_operators(1.0);
  Vec up(3);
  up << 1, 0, 0;
  CHECK((ops.sz * up - up).norm() < 1e-14);
  auto ev = sorted_eigs(ops.sx);
  CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("standard basis: literal components, Gram, observable eigenpairs") {
  MeasBasis b = standard_basis();
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(b.bras[0][0] - cd(-r)) < 1e-15);
  CHECK(std::abs(b.bras[0][1]) < 1e-15);
  CHECK(std::abs(b.bras[0][2] - cd(r)) < 1e-15);

  Mat gram(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gram(i, j) = braket(b.bras[i], b.bras[j]);
  CHECK((gram - Mat::Identity(3, 3)).norm() < 1e-14);

  // <x|, <y|, <z| are eigen-bras of m^z(0) with eigenvalues (+1, -1, 0).
  std::vector<double> vals = {1.0, -1.0, 0.0};
  for (int i = 0; i < 3; ++i)
    CHECK((b.bras[i] * b.observable - vals[i] * b.bras[i]).norm() < 1e-13);
}

TEST_CASE("measurement observable: literal matrix and spectrum") {
  Mat m0 = measurement_observable(0.0);
  Mat expected = Mat::Zero(3, 3);
  expected(0, 2) = -1.0;
  expected(2, 0) = -1.0;
  CHECK((m0 - expected).norm() < 1e-14);

  for (int i = 0; i < 64; ++i) {
    double theta = 2 * kPi * i / 64.0;
    auto ev = sorted_eigs(measurement_observable(theta));
    CHECK(std::abs(ev[0] + 1.0) < 1e-12);
    CHECK(std::abs(ev[1]) < 1e-12);
    CHECK(std::abs(ev[2] - 1.0) < 1e-12);
  }
}

TEST_CASE("rotated basis: collapse at theta=0, swap at theta=pi") {
  MeasBasis std_b = standard_basis();
  MeasBasis b0 = rotated_basis(RotationAxis::z, 0.0);
  for (int i = 0; i < 3; ++i)
    CHECK((b0.bras[i] - std_b.bras[i]).norm() < 1e-14);
  MeasBasis bpi = rotated_basis(RotationAxis::z, kPi);
  CHECK((bpi.bras[0] - std_b.bras[1]).norm() < 1e-14);
  CHECK((bpi.bras[1] - std_b.bras[0]).norm() < 1e-14);
}

TEST_CASE("rotated basis: orthonormal and diagonalizes m^z(theta), both axes") {
  for (int i = 0; i < 64; ++i) {
    double theta = 2 * kPi * i / 64.0 + 0.013;
    for (RotationAxis axis : {RotationAxis::z, RotationAxis::x}) {
      MeasBasis b = rotated_basis(axis, theta);
      Mat completeness = Mat::Zero(3, 3);
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          cd g = braket(b.bras[k], b.bras[l]);
          CHECK(std::abs(g - (k == l ? cd(1) : cd(0))) < 1e-12);
        }
        completeness += b.bras[k].transpose() * b.bras[k].conjugate();
        // Eigen-bra of the attached observable.
        RowVec mb = b.bras[k] * b.observable;
        cd lambda = braket(b.bras[k], mb);
        CHECK((mb - lambda.real() * b.bras[k]).norm() < 1e-12);
      }
      CHECK((completeness - Mat::Identity(3, 3)).norm() < 1e-12);
    }
  }
}

TEST_CASE("Clebsch-Gordan map: isometry and literal half-sector amplitudes") {
  CgMap cg = cg_half_one();
  CHECK((cg.isometry.adjoint() * cg.isometry - Mat::Identity(6, 6)).norm() < 1e-14);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist;
  for (int t = 0; t < 20; ++t) {
    Eigen::Vector2cd a(cd(dist(rng), dist(rng)), cd(dist(rng), dist(rng)));
    a.normalize();
    Vec image = cg.half_block() * a;
    CHECK(std::abs(image.norm() - 1.0) < 1e-14);
    // Literal amplitudes: sqrt(2/3)[ up (x) (a0/sqrt2 |0> + a1 |-1>)
    //                               - down (x) (a0 |+1> + a1/sqrt2 |0>) ].
    const double s23 = std::sqrt(2.0 / 3.0), r = 1.0 / std::sqrt(2.0);
    Vec expected = Vec::Zero(6);
    expected[1] = s23 * a[0] * r;
    expected[2] = s23 * a[1];
    expected[3] = -s23 * a[0];
    expected[4] = -s23 * a[1] * r;
    CHECK((image - expected).norm() < 1e-14);
  }

  // Stretched 3/2 state: edge up (x) |+1> with coefficient 1.
  CHECK(std::abs(cg.isometry(0, 2) - cd(1)) < 1e-14);
}

TEST_CASE("symmetry actions") {
  SymmetryAction tr = symmetry_action(SymmetryKind::time_reversal);
  CHECK(tr.antiunitary);
  // TR twice = identity on integer spin: U conj(U) = 1.
  CHECK((tr.unitary * tr.unitary.conjugate() - Mat::Identity(3, 3)).norm() < 1e-13);

  SymmetryAction rz = symmetry_action(SymmetryKind::pi_rotation_z);
  Mat expected = Mat::Zero(3, 3);
  expected(0, 0) = -1;
  expected(1, 1) = 1;
  expected(2, 2) = -1;
  CHECK((rz.unitary - expected).norm() < 1e-13);

  SpinOps s = spin_operators(1.0);
  for (const Mat& op : {s.sx, s.sy, s.sz})
    CHECK((tr.conjugate(op) + op).norm() < 1e-13);

  // pi z-rotation: S^z fixed, S^x and S^y flipped.
  CHECK((rz.conjugate(s.sz) - s.sz).norm() < 1e-13);
  CHECK((rz.conjugate(s.sx) + s.sx).norm() < 1e-13);
  CHECK((rz.conjugate(s.sy) + s.sy).norm() < 1e-13);
}

TEST_CASE("m^z(theta) invariant under TR and pi z-rotation") {
  SymmetryAction tr = symmetry_action(SymmetryKind::time_reversal);
  SymmetryAction rz = symmetry_action(SymmetryKind::pi_rotation_z);
  for (int i = 0; i < 64; ++i) {
    double theta = 2 * kPi * i / 64.0;
    Mat m = measurement_observable(theta);
    CHECK((tr.conjugate(m) - m).norm() < 1e-12);
    CHECK((rz.conjugate(m) - m).norm() < 1e-12);
  }
}
