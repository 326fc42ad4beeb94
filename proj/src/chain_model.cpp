#include "haldane/chain_model.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "haldane/spin_algebra.hpp"

namespace haldane {

using nlohmann::json;

std::string boundary_name(Boundary b) {
  switch (b) {
    case Boundary::none: return "none";
    case Boundary::left_qubit: return "left_qubit";
    case Boundary::right_qubit: return "right_qubit";
    case Boundary::both: return "both";
  }
  throw std::logic_error("boundary_name: bad enum");
}

Boundary boundary_from_name(const std::string& name) {
  if (name == "none") return Boundary::none;
  if (name == "left_qubit") return Boundary::left_qubit;
  if (name == "right_qubit") return Boundary::right_qubit;
  if (name == "both") return Boundary::both;
  throw std::invalid_argument("unknown boundary: " + name);
}

void ChainSpec::validate() const {
  if (n_sites < 2) throw std::invalid_argument("ChainSpec: n_sites must be >= 2");
  if (!(j_coupling > 0)) throw std::invalid_argument("ChainSpec: J must be > 0");
  if (!std::isfinite(beta)) throw std::invalid_argument("ChainSpec: beta must be finite");
  for (const auto& [bond, factor] : ramp) {
    if (bond < 0 || bond > n_sites - 2)
      throw std::invalid_argument("ChainSpec: ramp bond index out of range");
    if (!(factor >= 0.0 && factor <= 1.0))
      throw std::invalid_argument("ChainSpec: ramp factor must lie in [0,1]");
  }
}

double ChainSpec::ramp_factor(int bond) const {
  auto it = ramp.find(bond);
  return it == ramp.end() ? 1.0 : it->second;
}

std::vector<int> ChainSpec::site_dims() const {
  std::vector<int> dims;
  if (boundary == Boundary::left_qubit || boundary == Boundary::both) dims.push_back(2);
  dims.insert(dims.end(), n_sites, 3);
  if (boundary == Boundary::right_qubit || boundary == Boundary::both) dims.push_back(2);
  return dims;
}

long long ChainSpec::hilbert_dim() const {
  long long d = 1;
  for (int dim : site_dims()) d *= dim;
  return d;
}

std::string ChainSpec::to_json() const {
  json j;
  j["n_sites"] = n_sites;
  j["beta"] = beta;
  j["j_coupling"] = j_coupling;
  j["boundary"] = boundary_name(boundary);
  json r = json::object();
  for (const auto& [bond, factor] : ramp) r[std::to_string(bond)] = factor;
  j["ramp"] = r;
  return j.dump(2);
}

ChainSpec ChainSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  static const std::vector<std::string> known = {"n_sites", "beta", "j_coupling",
                                                 "boundary", "ramp"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw std::invalid_argument("ChainSpec: unknown key '" + it.key() + "'");
  }
  ChainSpec spec;
  spec.n_sites = j.at("n_sites").get<int>();
  spec.beta = j.at("beta").get<double>();
  spec.j_coupling = j.value("j_coupling", 1.0);
  spec.boundary = boundary_from_name(j.value("boundary", std::string("none")));
  if (j.contains("ramp")) {
    for (auto it = j["ramp"].begin(); it != j["ramp"].end(); ++it)
      spec.ramp[std::stoi(it.key())] = it.value().get<double>();
  }
  spec.validate();
  return spec;
}

Mat bond_term(double beta, double j_coupling) {
  if (!(j_coupling > 0)) throw std::invalid_argument("bond_term: J must be > 0");
  SpinOps s = spin_operators(1.0);
  Mat ss = kron(s.sx, s.sx) + kron(s.sy, s.sy) + kron(s.sz, s.sz);
  return j_coupling * (ss - beta * ss * ss);
}

Mat boundary_term(double j_coupling) {
  if (!(j_coupling > 0)) throw std::invalid_argument("boundary_term: J must be > 0");
  SpinOps big = spin_operators(1.0);
  SpinOps small = spin_operators(0.5);
  Mat ss = kron(big.sx, small.sx) + kron(big.sy, small.sy) + kron(big.sz, small.sz);
  return (4.0 * j_coupling / 3.0) * ss;
}

namespace {

void add_two_site_term(std::vector<Eigen::Triplet<cd>>& triplets,
                       const std::vector<int>& dims, int k, const Mat& term,
                       double factor) {
  if (std::abs(factor) == 0.0) return;
  int d1 = dims[k], d2 = dims[k + 1];
  long long left = 1, right = 1;
  for (int i = 0; i < k; ++i) left *= dims[i];
  for (size_t i = k + 2; i < dims.size(); ++i) right *= dims[i];
  for (int a = 0; a < d1 * d2; ++a) {
    for (int b = 0; b < d1 * d2; ++b) {
      cd v = factor * term(a, b);
      if (std::abs(v) < 1e-300) continue;
      for (long long l = 0; l < left; ++l) {
        long long row_base = (l * d1 * d2 + a) * right;
        long long col_base = (l * d1 * d2 + b) * right;
        for (long long r = 0; r < right; ++r)
          triplets.emplace_back(row_base + r, col_base + r, v);
      }
    }
  }
}

}  // namespace

SparseMat build_dense(const ChainSpec& spec) {
  spec.validate();
  long long dim = spec.hilbert_dim();
  if (dim > 2'200'000)
    throw std::runtime_error("build_dense: Hilbert dimension guard exceeded (" +
                             std::to_string(dim) + ")");
  std::vector<int> dims = spec.site_dims();
  int off = spec.chain_site_offset();
  std::vector<Eigen::Triplet<cd>> triplets;

  Mat hb = bond_term(spec.beta, spec.j_coupling);
  for (int b = 0; b < spec.n_sites - 1; ++b)
    add_two_site_term(triplets, dims, off + b, hb, spec.ramp_factor(b));

  if (spec.boundary == Boundary::left_qubit || spec.boundary == Boundary::both) {
    // Left bond is (qubit, spin-1); boundary_term is (spin-1, qubit).
    Mat t = boundary_term(spec.j_coupling);
    Mat swapped(6, 6);
    auto qi = [](int q, int m) { return q * 3 + m; };
    auto si = [](int m, int q) { return m * 2 + q; };
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m < 3; ++m)
        for (int q2 = 0; q2 < 2; ++q2)
          for (int m2 = 0; m2 < 3; ++m2)
            swapped(qi(q, m), qi(q2, m2)) = t(si(m, q), si(m2, q2));
    add_two_site_term(triplets, dims, 0, swapped, 1.0);
  }
  if (spec.boundary == Boundary::right_qubit || spec.boundary == Boundary::both) {
    add_two_site_term(triplets, dims, off + spec.n_sites - 1,
                      boundary_term(spec.j_coupling), 1.0);
  }

  SparseMat h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();
  return h;
}

namespace {

// (S.S - beta (S.S)^2) expanded into single-site operator pairs.
std::vector<std::pair<Mat, Mat>> bulk_pairs(double beta, double j, double lambda) {
  SpinOps s = spin_operators(1.0);
  std::vector<Mat> alpha = {s.sx, s.sy, s.sz};
  std::vector<std::pair<Mat, Mat>> pairs;
  for (const Mat& a : alpha) pairs.emplace_back(j * lambda * a, a);
  for (const Mat& a : alpha)
    for (const Mat& b : alpha)
      pairs.emplace_back(-j * beta * lambda * (a * b), a * b);
  return pairs;
}

std::vector<std::pair<Mat, Mat>> qubit_pairs(double j, bool qubit_left) {
  SpinOps big = spin_operators(1.0);
  SpinOps small = spin_operators(0.5);
  std::vector<std::pair<Mat, Mat>> pairs;
  double c = 4.0 * j / 3.0;
  std::vector<std::pair<Mat, Mat>> raw = {
      {big.sx, small.sx}, {big.sy, small.sy}, {big.sz, small.sz}};
  for (auto& [sb, ss] : raw) {
    if (qubit_left)
      pairs.emplace_back(c * ss, sb);
    else
      pairs.emplace_back(c * sb, ss);
  }
  return pairs;
}

}  // namespace

Mpo build_mpo(const ChainSpec& spec) {
  spec.validate();
  std::vector<int> dims = spec.site_dims();
  int off = spec.chain_site_offset();
  std::vector<BondPairs> bonds(dims.size() - 1);
  for (int b = 0; b < spec.n_sites - 1; ++b)
    bonds[off + b].pairs =
        bulk_pairs(spec.beta, spec.j_coupling, spec.ramp_factor(b));
  if (off == 1) bonds[0].pairs = qubit_pairs(spec.j_coupling, true);
  if (spec.boundary == Boundary::right_qubit || spec.boundary == Boundary::both)
    bonds.back().pairs = qubit_pairs(spec.j_coupling, false);
  return nearest_neighbour_mpo(dims, bonds);
}

std::vector<SchedulePoint> adiabatic_schedule(double total_time, int steps,
                                              RampShape shape) {
  if (!(total_time > 0)) throw std::invalid_argument("adiabatic_schedule: T must be > 0");
  if (steps < 2) throw std::invalid_argument("adiabatic_schedule: steps must be >= 2");
  std::vector<SchedulePoint> out;
  out.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    double s = static_cast<double>(i) / (steps - 1);
    double down = 1.0 - s;
    double lambda = shape == RampShape::linear
                        ? down
                        : down * down * (3.0 - 2.0 * down);
    out.push_back({s * total_time, lambda});
  }
  return out;
}

}  // namespace haldane
