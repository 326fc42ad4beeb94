#pragma once

#include <map>

#include "haldane/common.hpp"
#include "haldane/mpo.hpp"

namespace haldane {

enum class Boundary { none, left_qubit, right_qubit, both };

std::string boundary_name(Boundary b);
Boundary boundary_from_name(const std::string& name);

// Declarative description of one chain instance. Bond index b in [0, n-2]
// couples spin-1 sites b and b+1; boundary bonds are always at strength 1.
struct ChainSpec {
  int n_sites = 2;
  double beta = 0.0;
  double j_coupling = 1.0;
  Boundary boundary = Boundary::none;
  std::map<int, double> ramp;  // bond index -> factor in [0,1]; default 1

  void validate() const;
  bool in_haldane_phase() const { return beta > -1.0 && beta < 1.0; }
  double ramp_factor(int bond) const;

  // Full assembled site list: [left qubit?] + n spin-1 sites + [right qubit?].
  std::vector<int> site_dims() const;
  int total_sites() const { return static_cast<int>(site_dims().size()); }
  // Index of spin-1 site j (0-based) within the assembled site list.
  int chain_site_offset() const {
    return boundary == Boundary::left_qubit || boundary == Boundary::both ? 1 : 0;
  }
  long long hilbert_dim() const;

  std::string to_json() const;
  static ChainSpec from_json(const std::string& text);
};

// 9x9 matrix of J [S.S - beta (S.S)^2] on a spin-1 pair.
Mat bond_term(double beta, double j_coupling);

// 6x6 matrix of (4J/3) S.s on spin-1 (x) spin-1/2.
Mat boundary_term(double j_coupling);

// Full-space sparse Hamiltonian; throws when the dimension guard (~2e6)
// would be exceeded.
SparseMat build_dense(const ChainSpec& spec);

Mpo build_mpo(const ChainSpec& spec);

enum class RampShape { linear, smoothstep };

struct SchedulePoint {
  double time;
  double lambda;
};

// Monotone descent of the bond factor from 1 to 0 over total_time.
std::vector<SchedulePoint> adiabatic_schedule(double total_time, int steps,
                                              RampShape shape);

}  // namespace haldane
