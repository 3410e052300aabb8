// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "sbss/errors.hpp"

namespace sbss {

void Waveform::validate() const {
  if (sample_rate <= 0) throw ContractViolation("sample rate must be positive");
  for (const auto& ch : channels) {
    if (ch.size() != length()) {
      throw ContractViolation("waveform channels have different lengths");
    }
  }
}

Spectrogram::Spectrogram(int fft_size, int hop, int frames, int channels)
    : fft_size_(fft_size), hop_(hop), frames_(frames), channels_(channels) {
  if (fft_size < 2 || hop < 1 || frames < 1 || channels < 1) {
    throw ContractViolation("invalid spectrogram shape");
  }
  data_.assign(static_cast<std::size_t>(bins()) * frames * channels, Complex(0.0));
}

CVector Spectrogram::vector(int f, int t) const {
  CVector v(channels_);
  const auto fr = frame(f, t);
  for (int m = 0; m < channels_; ++m) v(m) = fr[m];
  return v;
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

namespace {

void check_framing(int fft_size, int hop) {
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) {
    throw ContractViolation("fft size must be a power of two, got " +
                            std::to_string(fft_size));
  }
  if (hop < 1 || fft_size % hop != 0) {
    throw ContractViolation("hop " + std::to_string(hop) + " must divide fft size " +
                            std::to_string(fft_size));
  }
}

}  // namespace

Spectrogram stft(const Waveform& w, int fft_size, int hop) {
  w.validate();
  check_framing(fft_size, hop);
  const std::size_t len = w.length();
  if (len == 0 || w.num_channels() == 0) throw ContractViolation("stft of an empty signal");

  const std::size_t pad = fft_size - hop;
  const int frames = static_cast<int>((pad + len - 1) / hop + 1);
  Spectrogram s(fft_size, hop, frames, w.num_channels());
  s.sample_rate = w.sample_rate;
  s.signal_length = len;

  const auto window = hann_window(fft_size);
  detail::RealFft fft(fft_size);
  std::vector<double> buf(fft_size);
  std::vector<Complex> spec(fft_size / 2 + 1);
  for (int m = 0; m < w.num_channels(); ++m) {
    const auto& x = w.channels[m];
    for (int t = 0; t < frames; ++t) {
      const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t) * hop -
                                   static_cast<std::ptrdiff_t>(pad);
      for (int n = 0; n < fft_size; ++n) {
        const std::ptrdiff_t i = start + n;
        buf[n] = (i >= 0 && i < static_cast<std::ptrdiff_t>(len)) ? x[i] * window[n] : 0.0;
      }
      fft.forward(buf, spec);
      for (int f = 0; f < s.bins(); ++f) s.at(f, t, m) = spec[f];
    }
  }
  return s;
}

Waveform istft(const Spectrogram& s) {
  const int n = s.fft_size();
  const int hop = s.hop();
  check_framing(n, hop);
  if (hop > n / 2) {
    throw ContractViolation("hop " + std::to_string(hop) +
                            " does not give a COLA Hann frame (needs >= 50% overlap)");
  }
  const std::size_t pad = n - hop;
  const std::size_t total = static_cast<std::size_t>(s.frames() - 1) * hop + n;
  const std::size_t len = s.signal_length > 0 ? s.signal_length : total - pad;

  const auto window = hann_window(n);
  std::vector<double> norm(total, 0.0);
  for (int t = 0; t < s.frames(); ++t)
    for (int k = 0; k < n; ++k) norm[static_cast<std::size_t>(t) * hop + k] += window[k] * window[k];

  Waveform w(s.sample_rate > 0 ? s.sample_rate : 16000, s.channels(), len);
  detail::RealFft fft(n);
  std::vector<Complex> spec(n / 2 + 1);
  std::vector<double> frame(n);
  std::vector<double> acc(total);
  for (int m = 0; m < s.channels(); ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int t = 0; t < s.frames(); ++t) {
      for (int f = 0; f < s.bins(); ++f) spec[f] = s.at(f, t, m);
      fft.inverse(spec, frame);
      const std::size_t start = static_cast<std::size_t>(t) * hop;
      for (int k = 0; k < n; ++k) acc[start + k] += frame[k] * window[k] / n;
    }
    auto& out = w.channels[m];
    for (std::size_t i = 0; i < len && i + pad < total; ++i) {
      const double d = norm[i + pad];
      out[i] = d > 1e-12 ? acc[i + pad] / d : 0.0;
    }
  }
  return w;
}

}  // namespace sbss
