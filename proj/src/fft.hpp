// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SBSS_SRC_FFT_HPP_
#define SBSS_SRC_FFT_HPP_

#include <span>
#include <vector>

#include "sbss/hermitian.hpp"

namespace sbss::detail {

/// Real-to-complex transform of fixed size backed by FFTW. Plans are created
/// under a global lock; execution is reentrant.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  /// out has n/2 + 1 entries.
  void forward(std::span<const double> in, std::span<Complex> out);
  /// Unnormalized inverse: forward followed by inverse scales by n.
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  int n_;
  double* real_;
  void* spec_;
  void* fwd_;
  void* inv_;
};

int next_pow2(int n);

/// Full linear convolution of a and b via FFT.
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace sbss::detail

#endif  // SBSS_SRC_FFT_HPP_
