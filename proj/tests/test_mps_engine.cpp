#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "haldane/exact_engine.hpp"
#include "haldane/mps_engine.hpp"

using namespace haldane;

namespace {

constexpr double kAklt = -1.0 / 3.0;

ChainSpec qubit_chain(int n, double beta) {
  ChainSpec spec{.n_sites = n, .beta = beta, .j_coupling = 1.0};
  spec.boundary = Boundary::right_qubit;
  return spec;
}

Eigen::Vector2cd random_logical(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector2cd a{cd(g(rng), g(rng)), cd(g(rng), g(rng))};
  return a / a.norm();
}

double phase_free_vec2(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  Eigen::Vector2cd an = a / a.norm(), bn = b / b.norm();
  cd ph = an.dot(bn);
  if (std::abs(ph) > 1e-14) bn *= std::conj(ph) / std::abs(ph);
  return (an - bn).norm();
}

// Orthonormal basis of the degenerate ground space of the open chain.
std::vector<Vec> oracle_ground_space(const ChainSpec& spec, double energy_tol) {
  std::vector<Vec> basis;
  for (int q : {-2, 0, 2}) {
    auto eig = ground_sector(spec, q, q == 0 ? 3 : 2);
    for (size_t i = 0; i < eig.values.size(); ++i)
      if (eig.values[i] < eig.values[0] + energy_tol)
        basis.push_back(eig.vectors[i].amps);
  }
  return basis;
}

}  // namespace

TEST_CASE("valence-bond closed form matches the oracle ground space") {
  ChainSpec spec{.n_sites = 4, .beta = kAklt, .j_coupling = 1.0};
  Mat h = Mat(build_dense(spec));

  // Singlet member reproduces the sector-0 oracle ground state.
  Mps phi00 = aklt_mps(4, 0, 0);
  CHECK(phi00.norm() == doctest::Approx(1.0).epsilon(1e-12));
  Vec dense = phi00.to_dense();
  CHECK((h * dense - (-2.0) * dense).norm() < 1e-10);

  // The sector-0 ground level is two-fold degenerate (singlet + triplet m=0),
  // so membership is checked against the span.
  auto eig = ground_sector(spec, 0, 2);
  double in_span = 0.0;
  for (int i = 0; i < 2; ++i)
    in_span += std::norm((eig.vectors[i].amps.adjoint() * dense)(0));
  CHECK(in_span > 1.0 - 1e-12);

  // All four members lie in the degenerate ground space and span it.
  auto basis = oracle_ground_space(spec, 1e-8);
  CHECK(basis.size() == 4);
  Mat coeffs(4, 4);
  int col = 0;
  for (int mu : {0, 1})
    for (int nu : {0, 1}) {
      Vec v = aklt_mps(4, mu, nu).to_dense();
      double inside = 0.0;
      for (int i = 0; i < 4; ++i) {
        coeffs(i, col) = (basis[i].adjoint() * v)(0);
        inside += std::norm(coeffs(i, col));
      }
      CHECK(inside > 1.0 - 1e-10);
      ++col;
    }
  Eigen::JacobiSVD<Mat> svd(coeffs);
  CHECK(svd.singularValues()(3) > 1e-3);  // full rank: the family spans all 4
}

TEST_CASE("edge-resolved states span the same space and overlaps decay") {
  for (int n : {4, 6}) {
    ChainSpec spec{.n_sites = n, .beta = kAklt, .j_coupling = 1.0};
    Mat h = Mat(build_dense(spec));
    double e0 = -2.0 * (n - 1) / 3.0;
    for (int a : {0, 1})
      for (int b : {0, 1}) {
        Vec v = aklt_edge_mps(n, a, b).to_dense();
        CHECK((h * v - e0 * v).norm() < 1e-10);
      }
  }
  // Same-S^z edge states overlap only through the bulk, decaying with length.
  double o4 = std::abs(mps_overlap(aklt_edge_mps(4, 0, 1), aklt_edge_mps(4, 1, 0)));
  double o8 = std::abs(mps_overlap(aklt_edge_mps(8, 0, 1), aklt_edge_mps(8, 1, 0)));
  CHECK(o4 > 1e-4);
  CHECK(o8 < o4 / 10.0);
  CHECK(o4 < 0.2);
}

TEST_CASE("bulk entanglement and string order of the valence-bond chain") {
  Mps phi = aklt_mps(16, 0, 0);
  // Edge-fixed state: one bulk bit across a mid cut.
  EntanglementData ent = mps_entanglement(aklt_edge_mps(16, 0, 0), 8);
  CHECK(ent.weights[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(ent.entropy_bits == doctest::Approx(1.0).epsilon(1e-3));
  // The trace closure adds an edge-to-edge singlet bond threading every cut.
  EntanglementData closed = mps_entanglement(phi, 8);
  CHECK(closed.entropy_bits == doctest::Approx(2.0).epsilon(1e-2));

  CHECK(std::abs(string_order(phi, 3, 12)) == doctest::Approx(4.0 / 9.0).epsilon(1e-3));
  // Empty string reduces to the plain two-point function.
  SpinOps s = spin_operators(1.0);
  double plain = mps_site_expectation(phi, {{7, s.sz}, {8, s.sz}}).real();
  CHECK(string_order(phi, 7, 8) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("correlation length of the valence-bond chain") {
  Mps phi = aklt_mps(24, 0, 0);
  CorrelationFit fit = correlation_length(phi);
  CHECK(fit.decaying);
  CHECK(fit.xi == doctest::Approx(1.0 / std::log(3.0)).epsilon(0.05));

  Vec up = (Vec(3) << 1, 0, 0).finished();
  Mps prod = product_mps(std::vector<Vec>(12, up));
  CorrelationFit flat = correlation_length(prod);
  CHECK_FALSE(flat.decaying);
}

TEST_CASE("suffix doublet matches the oracle and locks the relative phase") {
  ChainSpec spec = qubit_chain(6, 0.0);
  DmrgOptions opts;
  opts.chi_max = 32;
  MpsDoublet d = suffix_doublet_mps(spec, opts);
  CHECK(d.lowering_overlap == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(mps_overlap(d.g0, d.g1)) < 1e-10);

  GroundDoublet od = ground_doublet(spec);
  CHECK(d.energy == doctest::Approx(od.energy).epsilon(1e-8));
  cd o0 = (od.g0.amps.adjoint() * d.g0.to_dense())(0);
  cd o1 = (od.g1.amps.adjoint() * d.g1.to_dense())(0);
  CHECK(std::norm(o0) > 1.0 - 1e-6);
  CHECK(std::norm(o1) > 1.0 - 1e-6);
  // Same residual phase on both members: the doublet frame is locked.
  CHECK(std::abs(o0 / o1 - cd(1.0, 0.0)) < 1e-5);
}

TEST_CASE("decouple mixing is a scalar at the frustration-free point") {
  DmrgOptions opts;
  opts.chi_max = 24;
  MpsDoublet cur = suffix_doublet_mps(qubit_chain(5, kAklt), opts);
  MpsDoublet nxt = suffix_doublet_mps(qubit_chain(4, kAklt), opts);
  Mat mix = decouple_mixing(cur, nxt);
  CHECK(std::abs(mix(0, 1)) < 1e-7);
  CHECK(std::abs(mix(1, 0)) < 1e-7);
  CHECK(std::abs(mix(0, 0) - mix(1, 1)) < 1e-7);
  CHECK(std::abs(mix(0, 0)) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("projection step reproduces the byproduct algebra") {
  DmrgOptions opts;
  opts.chi_max = 24;
  MpsDoublet cur = suffix_doublet_mps(qubit_chain(5, kAklt), opts);
  MpsDoublet nxt = suffix_doublet_mps(qubit_chain(4, kAklt), opts);
  Mat mix = decouple_mixing(cur, nxt);
  MeasBasis basis = standard_basis();
  Mat x = (Mat(2, 2) << 0, 1, 1, 0).finished();
  Mat z = (Mat(2, 2) << 1, 0, 0, -1).finished();
  Mat expected[3] = {x, z * x, z};

  std::mt19937_64 rng(7);
  for (int t = 0; t < 3; ++t) {
    Eigen::Vector2cd a = random_logical(rng);
    for (int o = 0; o < 3; ++o) {
      MpsStep step = decouple_and_measure(a, cur, nxt, basis, o, nullptr, &mix);
      CHECK(step.probability == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
      CHECK(step.leakage < 1e-8);
      CHECK(step.fidelity > 1.0 - 1e-8);
      CHECK(phase_free_vec2(step.new_logical, expected[o] * a) < 1e-6);
    }
  }
}

TEST_CASE("decoupled construction carries the fixed Schmidt spectrum") {
  DmrgOptions opts;
  opts.chi_max = 24;
  MpsDoublet nxt = suffix_doublet_mps(qubit_chain(4, 0.0), opts);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 3; ++t) {
    Eigen::Vector2cd a = random_logical(rng);
    Mps d = cg_construct(nxt, a[0], a[1]);
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-10));
    EntanglementData ent = mps_entanglement(d, 1);
    CHECK(ent.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(ent.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  }
}

TEST_CASE("projection step agrees with the oracle away from the fixed point") {
  ChainSpec spec = qubit_chain(6, 0.5);
  DmrgOptions opts;
  opts.chi_max = 32;
  MpsDoublet cur = suffix_doublet_mps(spec, opts);
  MpsDoublet nxt = suffix_doublet_mps(qubit_chain(5, 0.5), opts);
  Mat mix = decouple_mixing(cur, nxt);

  // Mixing is scalar by symmetry; uniform loss is leakage, not channel error.
  CHECK(std::abs(mix(0, 1)) < 1e-6);
  CHECK(std::abs(mix(1, 0)) < 1e-6);
  CHECK(std::abs(mix(0, 0) - mix(1, 1)) < 1e-6);
  CHECK(std::abs(mix(0, 0)) > 0.5);
  CHECK(std::abs(mix(0, 0)) < 0.95);  // genuinely lossy away from beta = -1/3

  // Oracle cross-check: |scalar|^2 equals the overlap of the symmetry-built
  // decoupled state with the true embedded ground state.
  GroundDoublet od = ground_doublet(spec);
  std::mt19937_64 rng(31);
  Eigen::Vector2cd a = random_logical(rng);
  PureState psi = embed_logical(od, a[0], a[1]);
  DecoupleResult oracle = decouple_symmetry(psi, spec, &od, nullptr, 1.0);
  CHECK(std::norm(mix(0, 0)) == doctest::Approx(oracle.fidelity).epsilon(1e-5));

  MpsStep step = decouple_and_measure(a, cur, nxt, standard_basis(), 0, nullptr, &mix);
  CHECK(step.fidelity > 1.0 - 1e-9);  // channel stays exact under scalar mixing
  CHECK(step.leakage == doctest::Approx(1.0 - std::norm(mix(0, 0))).epsilon(1e-9));
  CHECK(step.probability == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("variational ground states match the oracle across the phase") {
  DmrgOptions opts;
  opts.chi_max = 32;
  for (double beta : {-2.0 / 3.0, kAklt, 0.0, 0.5}) {
    ChainSpec spec{.n_sites = 6, .beta = beta, .j_coupling = 1.0};
    // Sector 0 holds a singlet and a triplet member that become degenerate
    // towards beta = -1/3; compare against the span of both.
    auto exact = ground_sector(spec, 0, 2);
    DmrgResult r = spec_ground(spec, 0, opts);
    CHECK(r.energy == doctest::Approx(exact.values[0]).epsilon(1e-9));
    Vec dense = r.state.to_dense();
    double in_span = 0.0;
    for (int i = 0; i < 2; ++i)
      in_span += std::norm((exact.vectors[i].amps.adjoint() * dense)(0));
    CHECK(in_span > 1.0 - 1e-6);
  }
}
