#include "haldane/spin_algebra.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace haldane {

SpinOps spin_operators(double s) {
  if (s != 0.5 && s != 1.0)
    throw std::invalid_argument("spin_operators: spin must be 1/2 or 1");
  int dim = static_cast<int>(2 * s + 1.5);
  Mat sz = Mat::Zero(dim, dim), sp = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    double m = s - i;
    sz(i, i) = m;
    if (i > 0) sp(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  Mat sm = sp.adjoint();
  SpinOps ops;
  ops.sx = 0.5 * (sp + sm);
  ops.sy = cd(0, -0.5) * (sp - sm);
  ops.sz = sz;
  return ops;
}

MeasBasis standard_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  MeasBasis b;
  b.labels = {"x", "y", "z"};
  RowVec x(3), y(3), z(3);
  x << -r, 0, r;
  y << r, 0, r;
  z << 0, 1, 0;
  b.bras = {x, y, z};
  b.observable = measurement_observable(0.0);
  return b;
}

MeasBasis rotated_basis(RotationAxis axis, double theta) {
  if (!std::isfinite(theta))
    throw std::invalid_argument("rotated_basis: theta must be finite");
  MeasBasis std_b = standard_basis();
  const RowVec& bx = std_b.bras[0];
  const RowVec& by = std_b.bras[1];
  const RowVec& bz = std_b.bras[2];
  cd e = std::exp(cd(0, theta));

  MeasBasis b;
  if (axis == RotationAxis::z) {
    b.labels = {"plus", "minus", "z"};
    b.bras = {0.5 * ((1.0 + e) * bx + (1.0 - e) * by),
              0.5 * ((1.0 - e) * bx + (1.0 + e) * by), bz};
    b.observable = measurement_observable(theta);
  } else {
    // x rotation: exchange the roles of <x| and <z|.
    b.labels = {"plus", "minus", "x"};
    b.bras = {0.5 * ((1.0 + e) * bz + (1.0 - e) * by),
              0.5 * ((1.0 - e) * bz + (1.0 + e) * by), bx};
    // Same construction conjugated into the x-z exchanged frame: the bras
    // are eigenvectors of the observable obtained from m^z(theta) by the
    // basis change |x> <-> |z|.
    Mat u = Mat::Zero(3, 3);
    Vec kx = bx.transpose(), ky = by.transpose(), kz = bz.transpose();
    // Unitary mapping |x>-><z|..: swap the x and z zero-eigenvalue kets.
    u = kz * kx.adjoint() + ky * ky.adjoint() + kx * kz.adjoint();
    b.observable = u * measurement_observable(theta) * u.adjoint();
  }
  return b;
}

SiteOperator measurement_observable(double theta) {
  SpinOps s = spin_operators(1.0);
  Mat a = s.sx * s.sx - s.sy * s.sy;
  Mat c = s.sx * s.sy + s.sy * s.sx;
  return -(std::cos(theta) * a + std::sin(theta) * c);
}

CgMap cg_half_one() {
  const double s13 = std::sqrt(1.0 / 3.0), s23 = std::sqrt(2.0 / 3.0);
  Mat v = Mat::Zero(6, 6);
  // Input index: edge e in {0:up,1:down} major, site m in {0:+1,1:0,2:-1}.
  auto in = [](int e, int m) { return 3 * e + m; };
  // |1/2,+1/2> = sqrt(1/3)|up,0> - sqrt(2/3)|down,+1>
  v(in(0, 1), 0) = s13;
  v(in(1, 0), 0) = -s23;
  // |1/2,-1/2> = sqrt(2/3)|up,-1> - sqrt(1/3)|down,0>
  v(in(0, 2), 1) = s23;
  v(in(1, 1), 1) = -s13;
  // 3/2 sector, Condon-Shortley phases.
  v(in(0, 0), 2) = 1.0;                          // |3/2,+3/2>
  v(in(0, 1), 3) = s23; v(in(1, 0), 3) = s13;    // |3/2,+1/2>
  v(in(0, 2), 4) = s13; v(in(1, 1), 4) = s23;    // |3/2,-1/2>
  v(in(1, 2), 5) = 1.0;                          // |3/2,-3/2>
  return CgMap{v};
}

SymmetryAction symmetry_action(SymmetryKind kind, int dim) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("symmetry_action: dim must be 2 or 3");
  SpinOps s = spin_operators(dim == 3 ? 1.0 : 0.5);
  SymmetryAction a;
  a.kind = kind;
  switch (kind) {
    case SymmetryKind::time_reversal:
      a.unitary = (cd(0, -kPi) * s.sy).exp();
      a.antiunitary = true;
      break;
    case SymmetryKind::pi_rotation_x:
      a.unitary = (cd(0, kPi) * s.sx).exp();
      break;
    case SymmetryKind::pi_rotation_y:
      a.unitary = (cd(0, kPi) * s.sy).exp();
      break;
    case SymmetryKind::pi_rotation_z:
      a.unitary = (cd(0, kPi) * s.sz).exp();
      break;
    default:
      throw std::invalid_argument("symmetry_action: unsupported kind");
  }
  return a;
}

}  // namespace haldane
