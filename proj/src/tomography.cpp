#include "haldane/tomography.hpp"

#include <cmath>

namespace haldane {

ChannelReconstruction reconstruct_channel(const ChannelRunner& runner, int d,
                                          double leakage_abort) {
  if (d < 2) throw std::invalid_argument("reconstruct_channel: d must be >= 2");
  ChannelReconstruction rec;
  rec.matrix = Mat::Zero(d, d);

  auto run = [&](const Vec& in) {
    RunnerOutput out = runner(in);
    rec.max_leakage = std::max(rec.max_leakage, out.leakage);
    if (out.leakage > leakage_abort)
      throw std::runtime_error("reconstruct_channel: runner leakage " +
                               std::to_string(out.leakage) + " above abort threshold");
    return out.amps;
  };

  std::vector<Vec> cols(d);
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    cols[i] = run(e);
  }
  // Relative scales from |e0 + ei>/sqrt(2): the output is proportional to
  // q0 cols[0] + qi cols[i]; solve the two coefficients by least squares.
  rec.matrix.col(0) = cols[0];
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 1; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[0] = r;
    e[i] = r;
    Vec mixed = run(e);
    Mat basis(d, 2);
    basis.col(0) = cols[0];
    basis.col(1) = cols[i];
    Eigen::Vector2cd q = basis.colPivHouseholderQr().solve(mixed);
    if (std::abs(q[0]) < 1e-12)
      throw std::runtime_error("reconstruct_channel: degenerate scale equation");
    rec.matrix.col(i) = (q[1] / q[0]) * cols[i];
  }
  // Consistency input |e0 + i e1>/sqrt(2) must be reproduced by the
  // reconstructed matrix up to scale; fold any tiny residual into leakage.
  {
    Vec e = Vec::Zero(d);
    e[0] = r;
    e[1] = cd(0, 1) * r;
    Vec got = run(e);
    Vec pred = rec.matrix * e;
    double pn = pred.norm();
    if (pn > 1e-12) {
      pred /= pn;
      cd ph = got.dot(pred);  // pred = e^{i a} got  =>  ph = e^{i a}
      cd align = std::abs(ph) > 1e-300 ? std::conj(ph) / std::abs(ph) : cd(1);
      double resid = (pred * align - got).norm();
      // Treat inconsistency like leakage so callers see a single figure.
      rec.max_leakage = std::max(rec.max_leakage, resid * resid);
    }
  }
  return rec;
}

double process_fidelity(const Mat& target, const Mat& actual) {
  if (target.rows() != actual.rows() || target.cols() != actual.cols())
    throw std::invalid_argument("process_fidelity: shape mismatch");
  double d = static_cast<double>(target.rows());
  double denom = d * (actual.adjoint() * actual).trace().real();
  if (denom < 1e-300) return 0.0;
  cd tr = (target.adjoint() * actual).trace();
  return std::norm(tr) / denom;
}

}  // namespace haldane
