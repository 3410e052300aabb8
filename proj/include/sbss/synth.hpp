// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SBSS_SYNTH_HPP_
#define SBSS_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sbss/signal.hpp"

namespace sbss {

struct SyntheticSources {
  /// One channel per source.
  Waveform signals;
  /// Generating factors; the power spectrogram of source n is W[n] H[n].
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::MatrixXd> H;
  int fft_size = 0;
  int hop = 0;

  /// sqrt(W[n] H[n]), the expected magnitude of source n.
  Eigen::MatrixXd magnitude(int n) const;
};

/// Sources whose STFT coefficients are drawn as s_ft ~ CN(0, [W H]_ft) and
/// synthesized with the inverse STFT. W is uniform in (0, 1] with a smooth
/// spectral envelope, H is max(0, Laplace(-0.5, 1)), which leaves about 70%
/// of the activations at zero. bins = fft_size / 2 + 1; hop = fft_size / 2.
SyntheticSources synth_nmf_sources(int bins, int frames, int bases, int sources,
                                   std::uint64_t seed, int sample_rate = 16000);

}  // namespace sbss

#endif  // SBSS_SYNTH_HPP_
