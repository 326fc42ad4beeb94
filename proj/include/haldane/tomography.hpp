#pragma once

#include <functional>

#include "haldane/common.hpp"

namespace haldane {

struct RunnerOutput {
  Vec amps;        // normalized logical amplitudes, length d
  double leakage = 0.0;
};

using ChannelRunner = std::function<RunnerOutput(const Vec&)>;

struct ChannelReconstruction {
  Mat matrix;          // d x d, fixed up to one global complex scale
  double max_leakage = 0.0;
};

// Linear reconstruction of a deterministic (forced-outcome) channel from an
// informationally complete input set: the basis states, |e0 + ei>/sqrt(2)
// for the relative scales, and |e0 + i e1>/sqrt(2) as a consistency input.
ChannelReconstruction reconstruct_channel(const ChannelRunner& runner, int d,
                                          double leakage_abort = 1e-6);

// |Tr(U^dag A)|^2 / (d Tr(A^dag A)): scale- and phase-invariant process
// fidelity for near-unitary A.
double process_fidelity(const Mat& target, const Mat& actual);

}  // namespace haldane
