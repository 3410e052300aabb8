// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SBSS_SIGNAL_HPP_
#define SBSS_SIGNAL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sbss/hermitian.hpp"

namespace sbss {

/// Multichannel time-domain signal; every channel has the same length.
struct Waveform {
  int sample_rate = 16000;
  std::vector<std::vector<double>> channels;

  Waveform() = default;
  Waveform(int rate, int num_channels, std::size_t length)
      : sample_rate(rate), channels(num_channels, std::vector<double>(length, 0.0)) {}

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
  /// Throws ContractViolation if channel lengths differ or the rate is not positive.
  void validate() const;
};

/// Complex one-sided STFT tensor, F bins x T frames x M channels, stored so
/// that the M-vector x_ft is contiguous.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(int fft_size, int hop, int frames, int channels);

  int fft_size() const { return fft_size_; }
  int hop() const { return hop_; }
  int bins() const { return fft_size_ / 2 + 1; }
  int frames() const { return frames_; }
  int channels() const { return channels_; }

  Complex& at(int f, int t, int m) { return data_[index(f, t, m)]; }
  Complex at(int f, int t, int m) const { return data_[index(f, t, m)]; }

  /// The M-vector observed at bin f, frame t.
  std::span<Complex> frame(int f, int t) {
    return {data_.data() + index(f, t, 0), static_cast<std::size_t>(channels_)};
  }
  std::span<const Complex> frame(int f, int t) const {
    return {data_.data() + index(f, t, 0), static_cast<std::size_t>(channels_)};
  }
  CVector vector(int f, int t) const;

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  /// Time-domain metadata carried through for reconstruction.
  int sample_rate = 0;
  std::size_t signal_length = 0;

 private:
  std::size_t index(int f, int t, int m) const {
    return (static_cast<std::size_t>(f) * frames_ + t) * channels_ + m;
  }

  int fft_size_ = 0;
  int hop_ = 0;
  int frames_ = 0;
  int channels_ = 0;
  std::vector<Complex> data_;
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

/// Hann-windowed one-sided STFT. The signal is padded by fft_size - hop
/// samples in front and zero-filled at the end so that every input sample
/// is covered by fft_size / hop frames.
Spectrogram stft(const Waveform& w, int fft_size, int hop);

/// Weighted overlap-add inverse with Hann synthesis window. Requires
/// hop <= fft_size / 2.
Waveform istft(const Spectrogram& s);

Waveform read_wav(const std::string& path);

enum class WavFormat { kPcm16, kFloat32 };
void write_wav(const std::string& path, const Waveform& w,
               WavFormat format = WavFormat::kFloat32);

}  // namespace sbss

#endif  // SBSS_SIGNAL_HPP_
