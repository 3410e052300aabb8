// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace sbss::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  spec_ = spec;
  fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(real_);
  fftw_free(static_cast<fftw_complex*>(spec_));
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) {
  std::copy(in.begin(), in.end(), real_);
  std::fill(real_ + in.size(), real_ + n_, 0.0);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  auto* spec = static_cast<fftw_complex*>(spec_);
  for (int k = 0; k <= n_ / 2; ++k) out[k] = Complex(spec[k][0], spec[k][1]);
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) {
  auto* spec = static_cast<fftw_complex*>(spec_);
  for (int k = 0; k <= n_ / 2; ++k) {
    spec[k][0] = in[k].real();
    spec[k][1] = in[k].imag();
  }
  // c2r ignores imaginary parts of DC and Nyquist
  fftw_execute(static_cast<fftw_plan>(inv_));
  std::copy(real_, real_ + std::min<std::size_t>(out.size(), n_), out.begin());
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  const int n = next_pow2(static_cast<int>(len));
  RealFft fft(n);
  std::vector<Complex> fa(n / 2 + 1), fb(n / 2 + 1);
  fft.forward(a, fa);
  fft.forward(b, fb);
  for (int k = 0; k <= n / 2; ++k) fa[k] *= fb[k] / static_cast<double>(n);
  std::vector<double> out(n);
  fft.inverse(fa, out);
  out.resize(len);
  return out;
}

}  // namespace sbss::detail
