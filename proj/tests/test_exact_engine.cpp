#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "haldane/exact_engine.hpp"

using namespace haldane;

namespace {

constexpr double kAklt = -1.0 / 3.0;

ChainSpec aklt_chain(int n) {
  ChainSpec spec{.n_sites = n, .beta = kAklt, .j_coupling = 1.0};
  spec.boundary = Boundary::right_qubit;
  return spec;
}

Eigen::Vector2cd random_logical(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector2cd a{cd(g(rng), g(rng)), cd(g(rng), g(rng))};
  return a / a.norm();
}

// Frobenius distance after normalizing and aligning a global phase.
double phase_free(const Mat& a, const Mat& b) {
  Mat an = a / a.norm(), bn = b / b.norm();
  cd ph = (an.adjoint() * bn).trace();
  if (std::abs(ph) > 1e-14) bn *= std::conj(ph) / std::abs(ph);
  return (an - bn).norm();
}

double phase_free_vec(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  return phase_free(Mat(a), Mat(b));
}

Mat pauli_x() { return (Mat(2, 2) << 0, 1, 1, 0).finished(); }
Mat pauli_z() { return (Mat(2, 2) << 1, 0, 0, -1).finished(); }
Mat rot_z(double t) { return (Mat(2, 2) << 1, 0, 0, std::exp(cd(0, t))).finished(); }
Mat rot_x(double t) {
  Mat h = (Mat(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  return h * rot_z(t) * h;
}

cd total_sz(const PureState& state) {
  cd v = 0;
  for (size_t k = 0; k < state.dims.size(); ++k) {
    SpinOps s = spin_operators(state.dims[k] == 3 ? 1.0 : 0.5);
    v += expect_local(state, {{static_cast<int>(k), s.sz}});
  }
  return v;
}

}  // namespace

TEST_CASE("ground_sector recovers known small-chain energies") {
  {
    ChainSpec spec{.n_sites = 2, .beta = 0.0, .j_coupling = 1.0};
    auto eig = ground_sector(spec, 0, 1);
    CHECK(eig.converged);
    CHECK(eig.values[0] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(eig.residuals[0] < 1e-8);
  }
  {
    // Frustration-free bound -2J(N-1)/3 without the boundary qubit.
    ChainSpec spec{.n_sites = 5, .beta = kAklt, .j_coupling = 1.0};
    auto eig = ground_sector(spec, 0, 1);
    CHECK(eig.values[0] == doctest::Approx(-8.0 / 3.0).epsilon(1e-10));
  }
}

TEST_CASE("ground_doublet: degeneracy, sectors, phase convention") {
  ChainSpec spec = aklt_chain(4);
  GroundDoublet d = ground_doublet(spec);
  // Frustration-free with the edge bond: -2J(N-1)/3 - 4J/3.
  CHECK(d.energy == doctest::Approx(-10.0 / 3.0).epsilon(1e-10));
  CHECK(d.gap_to_next > 0.1);
  CHECK(d.g0.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.g1.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(overlap(d.g0, d.g1)) < 1e-10);
  CHECK(total_sz(d.g0).real() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(total_sz(d.g1).real() == doctest::Approx(-0.5).epsilon(1e-10));

  // g1 is degenerate with g0.
  Mat h = Mat(build_dense(spec));
  cd e1 = (d.g1.amps.adjoint() * h * d.g1.amps)(0);
  CHECK(e1.real() == doctest::Approx(d.energy).epsilon(1e-9));

  // Largest amplitude of g0 is real positive.
  Eigen::Index imax;
  d.g0.amps.cwiseAbs().maxCoeff(&imax);
  CHECK(d.g0.amps[imax].imag() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(d.g0.amps[imax].real() > 0.0);
}

TEST_CASE("embed/extract logical round trip") {
  ChainSpec spec = aklt_chain(3);
  GroundDoublet d = ground_doublet(spec);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 4; ++t) {
    Eigen::Vector2cd a = random_logical(rng);
    PureState psi = embed_logical(d, a[0], a[1]);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    LogicalReadout r = extract_logical(psi, d);
    CHECK(r.leakage < 1e-12);
    CHECK(std::abs(r.a0 - a[0]) < 1e-10);
    CHECK(std::abs(r.a1 - a[1]) < 1e-10);
  }
}

TEST_CASE("single-site branch matrices: literal values and completeness") {
  auto m = decouple_site_matrices();
  double r23 = std::sqrt(2.0 / 3.0), r13 = std::sqrt(1.0 / 3.0);
  CHECK((m[0] - (Mat(2, 2) << 0, 0, -r23, 0).finished()).norm() < 1e-14);
  CHECK((m[1] - r13 * pauli_z()).norm() < 1e-14);
  CHECK((m[2] - (Mat(2, 2) << 0, r23, 0, 0).finished()).norm() < 1e-14);
  Mat sum = m[0].adjoint() * m[0] + m[1].adjoint() * m[1] + m[2].adjoint() * m[2];
  CHECK((sum - Mat::Identity(2, 2)).norm() < 1e-14);

  MeasBasis std_basis = standard_basis();
  CHECK(phase_free(branch_matrix(std_basis.bras[0]), pauli_x()) < 1e-13);
  CHECK(phase_free(branch_matrix(std_basis.bras[1]), pauli_z() * pauli_x()) < 1e-13);
  CHECK(phase_free(branch_matrix(std_basis.bras[2]), pauli_z()) < 1e-13);
  // Each standard branch is (1/3) of a unitary: flat outcome statistics.
  for (const RowVec& bra : std_basis.bras) {
    Mat b = branch_matrix(bra);
    CHECK((b.adjoint() * b - Mat::Identity(2, 2) / 3.0).norm() < 1e-13);
  }
}

TEST_CASE("decoupled state: populations, Schmidt spectrum, entropy") {
  ChainSpec next = aklt_chain(3);
  GroundDoublet d = ground_doublet(next);
  {
    PureState psi = decoupled_state(d, 1.0, 0.0);
    CHECK(psi.dims[0] == 3);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    SpinOps s = spin_operators(1.0);
    Mat p_up = Mat::Zero(3, 3), p_mid = Mat::Zero(3, 3);
    p_up(0, 0) = 1.0;
    p_mid(1, 1) = 1.0;
    CHECK(expect_local(psi, {{0, p_up}}).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(expect_local(psi, {{0, p_mid}}).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    Eigen::Vector2cd a = random_logical(rng);
    PureState psi = decoupled_state(d, a[0], a[1]);
    auto w = schmidt_weights(psi, 1);
    std::sort(w.begin(), w.end(), std::greater<double>());
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(entanglement_entropy_bits(w) == doctest::Approx(0.9182958340544896).epsilon(1e-12));
  }
}

TEST_CASE("decouple_symmetry is exact at the frustration-free point") {
  ChainSpec spec = aklt_chain(4);
  GroundDoublet cur = ground_doublet(spec);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 3; ++t) {
    Eigen::Vector2cd a = random_logical(rng);
    PureState psi = embed_logical(cur, a[0], a[1]);
    DecoupleResult res = decouple_symmetry(psi, spec, &cur);
    CHECK(res.fidelity > 1.0 - 1e-10);
    CHECK(res.input.leakage < 1e-10);
    Eigen::Vector2cd got{res.input.a0, res.input.a1};
    CHECK((got - a).norm() < 1e-8);
  }
}

TEST_CASE("standard measurement: flat probabilities and Pauli byproducts") {
  ChainSpec next = aklt_chain(3);
  GroundDoublet d = ground_doublet(next);
  MeasBasis basis = standard_basis();
  std::mt19937_64 rng(13);
  Mat expected[3] = {pauli_x(), pauli_z() * pauli_x(), pauli_z()};
  for (int t = 0; t < 4; ++t) {
    Eigen::Vector2cd a = random_logical(rng);
    PureState psi = decoupled_state(d, a[0], a[1]);
    for (int o = 0; o < 3; ++o) {
      MeasurementRecord rec = measure_site(psi, 0, basis, o);
      CHECK(rec.probability == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
      LogicalReadout r = extract_logical(rec.post, d);
      CHECK(r.leakage < 1e-10);
      Eigen::Vector2cd got{r.a0, r.a1};
      CHECK(phase_free_vec(got, expected[o] * a) < 1e-8);
    }
  }
}

TEST_CASE("rotated measurement: branch operators carry the logical rotation") {
  ChainSpec next = aklt_chain(3);
  GroundDoublet d = ground_doublet(next);
  std::mt19937_64 rng(17);
  for (double theta : {kPi / 7, kPi / 2, 4 * kPi / 3}) {
    Eigen::Vector2cd a = random_logical(rng);
    PureState psi = decoupled_state(d, a[0], a[1]);
    {
      MeasBasis basis = rotated_basis(RotationAxis::z, theta);
      Mat expected[3] = {rot_z(theta) * pauli_x(),
                         rot_z(theta) * pauli_z() * pauli_x(), pauli_z()};
      for (int o = 0; o < 3; ++o) {
        MeasurementRecord rec = measure_site(psi, 0, basis, o);
        CHECK(rec.probability == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
        LogicalReadout r = extract_logical(rec.post, d);
        CHECK(phase_free_vec({r.a0, r.a1}, expected[o] * a) < 1e-8);
      }
    }
    {
      MeasBasis basis = rotated_basis(RotationAxis::x, theta);
      Mat expected[3] = {pauli_z() * rot_x(theta),
                         pauli_z() * rot_x(theta) * pauli_x(), pauli_x()};
      for (int o = 0; o < 3; ++o) {
        MeasurementRecord rec = measure_site(psi, 0, basis, o);
        CHECK(rec.probability == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
        LogicalReadout r = extract_logical(rec.post, d);
        CHECK(phase_free_vec({r.a0, r.a1}, expected[o] * a) < 1e-8);
      }
    }
  }
}

TEST_CASE("sampled measurement outcomes follow branch probabilities") {
  ChainSpec next = aklt_chain(2);
  GroundDoublet d = ground_doublet(next);
  PureState psi = decoupled_state(d, 0.6, cd(0.0, 0.8));
  MeasBasis basis = standard_basis();
  std::mt19937_64 rng(99);
  std::array<int, 3> counts{0, 0, 0};
  int shots = 3000;
  for (int i = 0; i < shots; ++i) {
    MeasurementRecord rec = measure_site(psi, 0, basis, -1, &rng);
    counts[rec.outcome_index]++;
  }
  for (int o = 0; o < 3; ++o)
    CHECK(std::abs(counts[o] / double(shots) - 1.0 / 3.0) < 0.04);
}

TEST_CASE("adiabatic ramp-off is stationary at the frustration-free point") {
  ChainSpec spec = aklt_chain(3);
  GroundDoublet cur = ground_doublet(spec);
  ChainSpec next_spec = suffix_spec(spec, 1);
  GroundDoublet next = ground_doublet(next_spec);
  std::mt19937_64 rng(31);
  Eigen::Vector2cd a = random_logical(rng);
  PureState psi = embed_logical(cur, a[0], a[1]);
  for (double t_total : {2.0, 8.0}) {
    auto sched = adiabatic_schedule(t_total, 40, RampShape::smoothstep);
    PureState evolved = adiabatic_evolve(psi, spec, 0, sched);
    CHECK(evolved.norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(total_sz(evolved) - total_sz(psi)) < 1e-9);
    PureState target = decoupled_state(next, a[0], a[1]);
    CHECK(std::norm(overlap(target, evolved)) > 1.0 - 1e-9);
  }
}

TEST_CASE("adiabatic ramp-off converges with ramp time away from the fixed point") {
  ChainSpec spec{.n_sites = 4, .beta = 0.0, .j_coupling = 1.0};
  spec.boundary = Boundary::right_qubit;
  GroundDoublet cur = ground_doublet(spec);
  std::mt19937_64 rng(41);
  Eigen::Vector2cd a = random_logical(rng);
  PureState psi = embed_logical(cur, a[0], a[1]);
  DecoupleResult target = decouple_symmetry(psi, spec, &cur, nullptr, 1e-6);
  double prev = 0.0;
  for (double t_total : {4.0, 10.0, 25.0}) {
    int steps = static_cast<int>(t_total * 8);
    auto sched = adiabatic_schedule(t_total, steps, RampShape::smoothstep);
    PureState evolved = adiabatic_evolve(psi, spec, 0, sched);
    double f = std::norm(overlap(target.state, evolved));
    CHECK(f > prev - 1e-6);
    prev = f;
  }
  CHECK(prev > 0.995);
}

TEST_CASE("suffix_spec bookkeeping") {
  ChainSpec spec = aklt_chain(5);
  spec.ramp[3] = 0.5;
  ChainSpec s = suffix_spec(spec, 2);
  CHECK(s.n_sites == 3);
  CHECK(s.boundary == Boundary::right_qubit);
  CHECK(s.ramp_factor(1) == doctest::Approx(0.5));
  CHECK(s.ramp_factor(0) == doctest::Approx(1.0));
  CHECK_THROWS(suffix_spec(spec, 4));
}

TEST_CASE("two-chain entangler: literal form and involution") {
  Mat u = two_chain_unitary();
  CHECK(u.rows() == 9);
  CHECK((u * u - Mat::Identity(9, 9)).norm() < 1e-14);
  CHECK((u - u.adjoint()).norm() < 1e-14);
  Mat expected = Mat::Identity(9, 9);
  expected(0, 0) = -1.0;  // |+1,+1> component
  CHECK((u - expected).norm() < 1e-14);

  // Polynomial form in S^z (x) S^z.
  SpinOps s = spin_operators(1.0);
  Mat q = s.sz + s.sz * s.sz;  // 2 |+1><+1|
  Mat poly = Mat::Identity(9, 9) - 0.5 * kron(q, q);
  CHECK((u - poly).norm() < 1e-13);
}

TEST_CASE("two-chain gate realizes CZ up to local Pauli byproducts") {
  ChainSpec next = aklt_chain(2);
  GroundDoublet d = ground_doublet(next);
  MeasBasis basis = standard_basis();
  Mat u = two_chain_unitary();
  auto m = decouple_site_matrices();

  // Independent per-outcome branch operator on the two logical qubits.
  auto joint_branch = [&](int oa, int ob) {
    Mat k = Mat::Zero(4, 4);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        double sign = (p == 0 && q == 0) ? -1.0 : 1.0;
        k += sign * basis.bras[oa][p] * basis.bras[ob][q] * kron(m[p], m[q]);
      }
    return k;
  };

  Mat cz = Mat::Identity(4, 4);
  cz(3, 3) = -1.0;
  Mat paulis[4] = {Mat::Identity(2, 2), pauli_x(), pauli_z(),
                   pauli_x() * pauli_z()};

  std::mt19937_64 rng(53);
  double prob_sum = 0.0;
  for (int oa = 0; oa < 3; ++oa) {
    for (int ob = 0; ob < 3; ++ob) {
      Mat k = joint_branch(oa, ob);
      // Outcomes x,y on both chains entangle: some Pauli pair turns the
      // branch into CZ. A z outcome on either side leaves that branch
      // separable (the gate deferred, only a local Z landed).
      double best_cz = 0.0, best_sep = 0.0;
      for (const Mat& pa : paulis)
        for (const Mat& pb : paulis) {
          best_cz = std::max(best_cz, 2.0 - phase_free(kron(pa, pb) * cz, k));
          best_sep = std::max(best_sep, 2.0 - phase_free(kron(pa, pb), k));
        }
      if (oa < 2 && ob < 2)
        CHECK(best_cz > 2.0 - 1e-10);
      else
        CHECK(best_sep > 2.0 - 1e-10);

      Eigen::Vector2cd aa = random_logical(rng), ab = random_logical(rng);
      PureState psi_a = decoupled_state(d, aa[0], aa[1]);
      PureState psi_b = decoupled_state(d, ab[0], ab[1]);
      TwoChainResult res = two_chain_gate(psi_a, psi_b, d, d, oa, ob, basis);
      Eigen::Vector4cd expected = k * kron_vec(Vec(aa), Vec(ab));
      CHECK(res.probability == doctest::Approx(expected.squaredNorm()).epsilon(1e-9));
      CHECK(res.leakage < 1e-9);
      CHECK(phase_free(Mat(res.logical), Mat(expected)) < 1e-7);
    }
  }

  // Completeness: outcome probabilities over the 9 pairs sum to 1.
  Eigen::Vector2cd aa = random_logical(rng), ab = random_logical(rng);
  PureState psi_a = decoupled_state(d, aa[0], aa[1]);
  PureState psi_b = decoupled_state(d, ab[0], ab[1]);
  prob_sum = 0.0;
  for (int oa = 0; oa < 3; ++oa)
    for (int ob = 0; ob < 3; ++ob)
      prob_sum += two_chain_gate(psi_a, psi_b, d, d, oa, ob, basis).probability;
  CHECK(prob_sum == doctest::Approx(1.0).epsilon(1e-10));
}
