#include "haldane/mps.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace haldane {

namespace {

// Row index (l*d + p), column index r.
Mat fuse_left(const std::vector<Mat>& site) {
  int d = static_cast<int>(site.size());
  Eigen::Index chi_l = site[0].rows(), chi_r = site[0].cols();
  Mat m(chi_l * d, chi_r);
  for (int p = 0; p < d; ++p)
    for (Eigen::Index l = 0; l < chi_l; ++l) m.row(l * d + p) = site[p].row(l);
  return m;
}

std::vector<Mat> split_left(const Mat& m, int d) {
  Eigen::Index chi_l = m.rows() / d, chi_r = m.cols();
  std::vector<Mat> site(d, Mat(chi_l, chi_r));
  for (int p = 0; p < d; ++p)
    for (Eigen::Index l = 0; l < chi_l; ++l) site[p].row(l) = m.row(l * d + p);
  return site;
}

// Row index l, column index (p*chi_r + r).
Mat fuse_right(const std::vector<Mat>& site) {
  int d = static_cast<int>(site.size());
  Eigen::Index chi_l = site[0].rows(), chi_r = site[0].cols();
  Mat m(chi_l, d * chi_r);
  for (int p = 0; p < d; ++p) m.middleCols(p * chi_r, chi_r) = site[p];
  return m;
}

std::vector<Mat> split_right(const Mat& m, int d) {
  Eigen::Index chi_l = m.rows(), chi_r = m.cols() / d;
  std::vector<Mat> site(d);
  for (int p = 0; p < d; ++p) site[p] = m.middleCols(p * chi_r, chi_r);
  return site;
}

}  // namespace

int Mps::bond_dim(int b) const {
  if (b <= 0) return static_cast<int>(tensors.front()[0].rows());
  return static_cast<int>(tensors[b - 1][0].cols());
}

int Mps::max_bond_dim() const {
  int m = 1;
  for (int b = 0; b <= size(); ++b) m = std::max(m, bond_dim(b));
  return m;
}

double Mps::norm() const {
  Mat e = Mat::Identity(bond_dim(0), bond_dim(0));
  for (const auto& site : tensors) {
    Mat next = Mat::Zero(site[0].cols(), site[0].cols());
    for (const Mat& a : site) next += a.adjoint() * e * a;
    e = std::move(next);
  }
  return std::sqrt(std::max(0.0, e.trace().real()));
}

void Mps::normalize() {
  double n = norm();
  if (n < 1e-300) throw std::runtime_error("Mps::normalize: zero state");
  int c = center >= 0 ? center : 0;
  for (Mat& a : tensors[c]) a /= n;
}

void Mps::canonicalize(int c) {
  if (c < 0 || c >= size()) throw std::invalid_argument("Mps::canonicalize: bad center");
  for (int k = 0; k < c; ++k) {
    Mat m = fuse_left(tensors[k]);
    Eigen::HouseholderQR<Mat> qr(m);
    Eigen::Index rank = std::min(m.rows(), m.cols());
    Mat q = qr.householderQ() * Mat::Identity(m.rows(), rank);
    Mat r = q.adjoint() * m;
    tensors[k] = split_left(q, phys[k]);
    for (Mat& a : tensors[k + 1]) a = r * a;
  }
  for (int k = size() - 1; k > c; --k) {
    Mat m = fuse_right(tensors[k]);
    Eigen::HouseholderQR<Mat> qr(m.adjoint());
    Eigen::Index rank = std::min(m.rows(), m.cols());
    Mat q = (qr.householderQ() * Mat::Identity(m.cols(), rank)).adjoint();
    Mat l = m * q.adjoint();
    tensors[k] = split_right(q, phys[k]);
    for (Mat& a : tensors[k - 1]) a = a * l;
  }
  center = c;
  bond_charges.clear();
}

void Mps::compress(int chi_max, double weight_tol) {
  if (chi_max < 1) throw std::invalid_argument("Mps::compress: chi_max < 1");
  canonicalize(0);
  for (int k = 0; k + 1 < size(); ++k) {
    Mat m = fuse_left(tensors[k]);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    double total = s.squaredNorm();
    int keep = 0;
    for (Eigen::Index i = 0; i < s.size() && keep < chi_max; ++i) {
      if (total > 0 && s[i] * s[i] < weight_tol * total && keep > 0) break;
      ++keep;
    }
    keep = std::max(keep, 1);
    tensors[k] = split_left(svd.matrixU().leftCols(keep), phys[k]);
    Mat carry = s.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    for (Mat& a : tensors[k + 1]) a = carry * a;
  }
  center = size() - 1;
  bond_charges.clear();
  normalize();
}

Vec Mps::to_dense() const {
  long long dim = 1;
  for (int d : phys) dim *= d;
  if (dim > 5'000'000) throw std::runtime_error("Mps::to_dense: chain too large");
  // Partial contractions carry one row per configuration prefix.
  Mat partial = Mat::Ones(1, 1);
  for (int k = 0; k < size(); ++k) {
    int d = phys[k];
    Mat next(partial.rows() * d, tensors[k][0].cols());
    for (Eigen::Index i = 0; i < partial.rows(); ++i)
      for (int p = 0; p < d; ++p)
        next.row(i * d + p) = partial.row(i) * tensors[k][p];
    partial = std::move(next);
  }
  return partial.col(0);
}

Mps product_mps(const std::vector<Vec>& kets) {
  if (kets.empty()) throw std::invalid_argument("product_mps: empty chain");
  Mps mps;
  for (const Vec& ket : kets) {
    mps.phys.push_back(static_cast<int>(ket.size()));
    std::vector<Mat> site;
    for (Eigen::Index p = 0; p < ket.size(); ++p)
      site.push_back(Mat::Constant(1, 1, ket[p]));
    mps.tensors.push_back(std::move(site));
  }
  mps.center = 0;
  return mps;
}

Mps prepend_site(const Vec& ket, const Mps& rest) {
  Mps out;
  out.phys.push_back(static_cast<int>(ket.size()));
  std::vector<Mat> site;
  for (Eigen::Index p = 0; p < ket.size(); ++p)
    site.push_back(Mat::Constant(1, 1, ket[p]));
  out.tensors.push_back(std::move(site));
  out.phys.insert(out.phys.end(), rest.phys.begin(), rest.phys.end());
  out.tensors.insert(out.tensors.end(), rest.tensors.begin(), rest.tensors.end());
  out.center = -1;
  return out;
}

cd mps_overlap(const Mps& bra, const Mps& ket) {
  if (bra.phys != ket.phys) throw std::invalid_argument("mps_overlap: shape mismatch");
  Mat e = Mat::Ones(1, 1);
  for (int k = 0; k < bra.size(); ++k) {
    Mat next = Mat::Zero(bra.tensors[k][0].cols(), ket.tensors[k][0].cols());
    for (int p = 0; p < bra.phys[k]; ++p)
      next += bra.tensors[k][p].adjoint() * e * ket.tensors[k][p];
    e = std::move(next);
  }
  return e(0, 0);
}

cd mps_expectation(const Mps& bra, const Mpo& mpo, const Mps& ket) {
  if (bra.phys != mpo.phys_dims || ket.phys != mpo.phys_dims)
    throw std::invalid_argument("mps_expectation: shape mismatch");
  // env[w] is the (bra-chi x ket-chi) block at MPO virtual index w.
  std::vector<Mat> env(1, Mat::Ones(1, 1));
  for (int k = 0; k < bra.size(); ++k) {
    std::vector<Mat> next(mpo.right_dim(k),
                          Mat::Zero(bra.tensors[k][0].cols(), ket.tensors[k][0].cols()));
    for (int l = 0; l < mpo.left_dim(k); ++l) {
      if (env[l].size() == 0) continue;
      for (int r = 0; r < mpo.right_dim(k); ++r) {
        const Mat& w = mpo.ops[k][l][r];
        if (w.size() == 0) continue;
        for (int pb = 0; pb < bra.phys[k]; ++pb)
          for (int pk = 0; pk < ket.phys[k]; ++pk) {
            cd c = w(pb, pk);
            if (c == cd(0, 0)) continue;
            next[r] += c * (bra.tensors[k][pb].adjoint() * env[l] * ket.tensors[k][pk]);
          }
      }
    }
    env = std::move(next);
  }
  return env[0](0, 0);
}

Mps mps_sum(const std::vector<std::pair<cd, Mps>>& terms) {
  if (terms.empty()) throw std::invalid_argument("mps_sum: no terms");
  const Mps& first = terms[0].second;
  int n = first.size();
  for (const auto& [c, t] : terms)
    if (t.phys != first.phys) throw std::invalid_argument("mps_sum: shape mismatch");

  Mps out;
  out.phys = first.phys;
  out.tensors.resize(n);
  for (int k = 0; k < n; ++k) {
    int d = first.phys[k];
    out.tensors[k].resize(d);
    Eigen::Index rows = 0, cols = 0;
    for (const auto& [c, t] : terms) {
      rows += t.tensors[k][0].rows();
      cols += t.tensors[k][0].cols();
    }
    if (k == 0) rows = 1;
    if (k == n - 1) cols = 1;
    for (int p = 0; p < d; ++p) {
      Mat block = Mat::Zero(rows, cols);
      Eigen::Index ro = 0, co = 0;
      for (const auto& [c, t] : terms) {
        Mat a = t.tensors[k][p];
        if (k == 0) a *= c;  // coefficient absorbed into the first site
        block.block(k == 0 ? 0 : ro, k == n - 1 ? 0 : co, a.rows(), a.cols()) = a;
        ro += a.rows();
        co += a.cols();
      }
      out.tensors[k][p] = std::move(block);
    }
  }
  out.center = -1;
  return out;
}

EntanglementData mps_entanglement(const Mps& mps, int cut) {
  if (cut < 1 || cut >= mps.size())
    throw std::invalid_argument("mps_entanglement: invalid cut");
  Mps work = mps;
  work.canonicalize(cut - 1);
  work.normalize();
  Mat m = fuse_left(work.tensors[cut - 1]);
  Eigen::JacobiSVD<Mat> svd(m);
  EntanglementData data;
  data.cut = cut;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    double w = svd.singularValues()[i] * svd.singularValues()[i];
    if (w > 1e-16) data.weights.push_back(w);
  }
  std::sort(data.weights.begin(), data.weights.end(), std::greater<double>());
  for (double w : data.weights) data.entropy_bits -= w * std::log2(w);
  return data;
}

double canonical_residual(const Mps& mps) {
  if (mps.center < 0) throw std::invalid_argument("canonical_residual: no center");
  double res = 0.0;
  for (int k = 0; k < mps.size(); ++k) {
    if (k == mps.center) continue;
    if (k < mps.center) {
      Mat m = fuse_left(mps.tensors[k]);
      res = std::max(res, (m.adjoint() * m - Mat::Identity(m.cols(), m.cols())).norm());
    } else {
      Mat m = fuse_right(mps.tensors[k]);
      res = std::max(res, (m * m.adjoint() - Mat::Identity(m.rows(), m.rows())).norm());
    }
  }
  return res;
}

namespace {

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void Mps::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("Mps::save: cannot open " + path);
  f.write("HWMPS01", 7);
  write_pod<int64_t>(f, size());
  write_pod<int32_t>(f, center);
  for (int d : phys) write_pod<int32_t>(f, d);
  for (int b = 0; b <= size(); ++b) write_pod<int32_t>(f, bond_dim(b));
  write_pod<int32_t>(f, has_charges() ? 1 : 0);
  if (has_charges())
    for (const auto& bond : bond_charges)
      for (int q : bond) write_pod<int32_t>(f, q);
  for (const auto& site : tensors)
    for (const Mat& a : site)
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          write_pod<double>(f, a(i, j).real());
          write_pod<double>(f, a(i, j).imag());
        }
  if (!f) throw std::runtime_error("Mps::save: write failed for " + path);
}

Mps Mps::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("Mps::load: cannot open " + path);
  char magic[7];
  f.read(magic, 7);
  if (std::string(magic, 7) != "HWMPS01")
    throw std::runtime_error("Mps::load: bad header in " + path);
  Mps mps;
  int64_t n = read_pod<int64_t>(f);
  mps.center = read_pod<int32_t>(f);
  for (int64_t k = 0; k < n; ++k) mps.phys.push_back(read_pod<int32_t>(f));
  std::vector<int> bonds;
  for (int64_t b = 0; b <= n; ++b) bonds.push_back(read_pod<int32_t>(f));
  bool charged = read_pod<int32_t>(f) != 0;
  if (charged) {
    mps.bond_charges.resize(n + 1);
    for (int64_t b = 0; b <= n; ++b)
      for (int i = 0; i < bonds[b]; ++i)
        mps.bond_charges[b].push_back(read_pod<int32_t>(f));
  }
  for (int64_t k = 0; k < n; ++k) {
    std::vector<Mat> site;
    for (int p = 0; p < mps.phys[k]; ++p) {
      Mat a(bonds[k], bonds[k + 1]);
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          double re = read_pod<double>(f);
          double im = read_pod<double>(f);
          a(i, j) = cd(re, im);
        }
      site.push_back(std::move(a));
    }
    mps.tensors.push_back(std::move(site));
  }
  if (!f) throw std::runtime_error("Mps::load: truncated file " + path);
  return mps;
}

}  // namespace haldane
