#pragma once

#include <array>

#include "haldane/common.hpp"

namespace haldane {

// Complex matrix acting on one site's local Hilbert space (3x3 for spin-1,
// 2x2 for the boundary spin-1/2). Basis order is descending S^z:
// {|+1>,|0>,|-1>} for spin-1, {|up>,|down>} for spin-1/2.
using SiteOperator = Mat;

struct SpinOps {
  SiteOperator sx, sy, sz;
  SiteOperator sp() const { return sx + cd(0, 1) * sy; }
  SiteOperator sm() const { return sx - cd(0, 1) * sy; }
};

// s in {0.5, 1}. Standard S^z-diagonal representation.
SpinOps spin_operators(double s);

// An orthonormal single-spin-1 measurement basis: bras applied directly to
// ket components (no extra conjugation), plus the observable they diagonalize.
struct MeasBasis {
  std::vector<std::string> labels;
  std::vector<RowVec> bras;
  SiteOperator observable;
};

// {<x|, <y|, <z|}, the zero-eigenvalue states of S^x, S^y, S^z.
MeasBasis standard_basis();

enum class RotationAxis { z, x };

// Basis of the one-parameter family implementing logical rotations; axis z
// uses {1/2[(1 +- e^{i theta})<x| + (1 -+ e^{i theta})<y|], <z|}, axis x
// exchanges the roles of <x| and <z|.
MeasBasis rotated_basis(RotationAxis axis, double theta);

// m^z(theta) = -[cos t ((Sx)^2 - (Sy)^2) + sin t (SxSy + SySx)] on spin-1.
SiteOperator measurement_observable(double theta);

// Isometry of 1/2 (x) 1 = 1/2 (+) 3/2. Input basis is edge-major:
// (up,+1),(up,0),(up,-1),(down,+1),(down,0),(down,-1); output basis is
// [1/2: m=+1/2,-1/2 | 3/2: m=+3/2,+1/2,-1/2,-3/2].
struct CgMap {
  Mat isometry;  // 6x6 unitary
  Mat half_block() const { return isometry.leftCols(2); }
  Mat three_half_block() const { return isometry.rightCols(4); }
};

CgMap cg_half_one();

enum class SymmetryKind { time_reversal, pi_rotation_x, pi_rotation_y, pi_rotation_z };

// Antiunitaries act as O -> U conj(O) U^dag; unitaries as O -> U O U^dag.
struct SymmetryAction {
  SymmetryKind kind;
  SiteOperator unitary;
  bool antiunitary = false;

  Mat conjugate(const Mat& op) const {
    if (antiunitary) return unitary * op.conjugate() * unitary.adjoint();
    return unitary * op * unitary.adjoint();
  }
};

// Time reversal is e^{-i pi S^y} K with K conjugation in the S^z basis;
// pi rotations are e^{i pi S^alpha}. dim selects the spin (2 or 3).
SymmetryAction symmetry_action(SymmetryKind kind, int dim = 3);

}  // namespace haldane
