// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/synth.hpp"

#include <cmath>
#include <random>

#include "sbss/errors.hpp"

namespace sbss {

Eigen::MatrixXd SyntheticSources::magnitude(int n) const { return (W[n] * H[n]).cwiseSqrt(); }

SyntheticSources synth_nmf_sources(int bins, int frames, int bases, int sources,
                                   std::uint64_t seed, int sample_rate) {
  if (bins < 3 || frames < 2 || bases < 1 || sources < 1) {
    throw ContractViolation("synth_nmf_sources: need bins >= 3, frames >= 2, bases >= 1, sources >= 1");
  }
  SyntheticSources out;
  out.fft_size = 2 * (bins - 1);
  out.hop = out.fft_size / 2;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

  const int pad = out.fft_size - out.hop;
  const std::size_t length = static_cast<std::size_t>(frames - 1) * out.hop - pad + 1;
  out.signals = Waveform(sample_rate, sources, length);

  for (int n = 0; n < sources; ++n) {
    Eigen::MatrixXd w(bins, bases);
    for (int k = 0; k < bases; ++k) {
      // a few random spectral peaks over a noise floor
      const double centre = unit(rng) * (bins - 1);
      const double width = 2.0 + unit(rng) * bins / 8.0;
      for (int f = 0; f < bins; ++f) {
        const double z = (f - centre) / width;
        w(f, k) = 0.05 + std::exp(-0.5 * z * z) + 0.1 * unit(rng);
      }
    }
    Eigen::MatrixXd h(bases, frames);
    for (int k = 0; k < bases; ++k) {
      for (int t = 0; t < frames; ++t) {
        const double laplace = (unit(rng) < 0.5 ? -1.0 : 1.0) * expo(rng);
        h(k, t) = std::max(0.0, laplace - 0.5);
      }
    }
    out.W.push_back(w);
    out.H.push_back(h);

    Spectrogram s(out.fft_size, out.hop, frames, 1);
    s.sample_rate = sample_rate;
    s.signal_length = length;
    const Eigen::MatrixXd power = w * h;
    for (int f = 0; f < bins; ++f) {
      for (int t = 0; t < frames; ++t) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        const bool edge = f == 0 || f == bins - 1;
        s.at(f, t, 0) = std::sqrt(power(f, t)) * Complex(re, edge ? 0.0 : im);
      }
    }
    out.signals.channels[n] = istft(s).channels[0];
  }
  return out;
}

}  // namespace sbss
