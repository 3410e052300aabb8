// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Independent brute-force computations the tests compare the library against.
// Nothing here calls into the code under test except for plain data types.

#ifndef SBSS_TESTS_ORACLES_HPP_
#define SBSS_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sbss/hermitian.hpp"
#include "sbss/signal.hpp"
#include "sbss/source_model.hpp"

namespace oracle {

using sbss::Complex;

// X_k = sum_n x_n e^{-2 pi i k n / N}, k = 0..N/2
inline std::vector<Complex> dft(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<Complex> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    Complex acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ph = -2.0 * std::numbers::pi * k * j / n;
      acc += x[j] * Complex(std::cos(ph), std::sin(ph));
    }
    out[k] = acc;
  }
  return out;
}

inline Eigen::MatrixXcd random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

// G G^H + shift I, positive definite.
inline Eigen::MatrixXcd random_hpd(int dim, std::mt19937_64& rng, double shift = 0.1) {
  const Eigen::MatrixXcd g = random_complex(dim, dim, rng);
  return g * g.adjoint() + shift * Eigen::MatrixXcd::Identity(dim, dim);
}

inline sbss::HermitianMatrix to_hermitian(const Eigen::MatrixXcd& m) {
  return sbss::HermitianMatrix::hermitize(sbss::CMatrix(m));
}

inline Eigen::MatrixXcd dense(const sbss::HermitianMatrix& h) { return Eigen::MatrixXcd(h.matrix()); }

inline double logdet_2x2(const Eigen::MatrixXcd& m) {
  return std::log((m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real());
}

// Eigenvalues of a 2x2 Hermitian matrix from the characteristic polynomial.
inline std::pair<double, double> eig_2x2(const Eigen::MatrixXcd& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const double b2 = std::norm(m(0, 1));
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b2);
  return {mid - rad, mid + rad};
}

inline double trace_of_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Complex acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
  return acc.real();
}

inline double lambda_loop(const sbss::SourceFactors& fac, int n, int f, int t) {
  double s = 0.0;
  for (int k = 0; k < fac.W[n].cols(); ++k) s += fac.W[n](f, k) * fac.H[n](k, t);
  return std::max(s, 1e-12);
}

inline double penalty_loop(const sbss::SourceFactors& fac, const sbss::SparsePrior& prior) {
  double total = 0.0;
  for (int n = 0; n < fac.sources(); ++n) {
    for (int k = 0; k < fac.W[n].cols(); ++k) {
      for (int t = 0; t < fac.H[n].cols(); ++t) total += prior.mu[n](k) * std::abs(fac.H[n](k, t));
      for (int f = 0; f < fac.W[n].rows(); ++f) {
        total += prior.bingham_weight * fac.W[n](f, k) * fac.W[n](f, k);
      }
      total -= prior.rho[n](k);
    }
  }
  return total;
}

// Reverberation time from the Schroeder backward-integrated energy curve,
// fitted between -lo and -hi dB and extrapolated to -60 dB.
inline double schroeder_t60(const std::vector<double>& h, int fs, double lo = 5.0,
                            double hi = 25.0) {
  std::vector<double> e(h.size() + 1, 0.0);
  for (int i = static_cast<int>(h.size()) - 1; i >= 0; --i) e[i] = e[i + 1] + h[i] * h[i];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double db = 10.0 * std::log10(e[i] / e[0]);
    if (db <= -lo && db >= -hi) {
      const double x = static_cast<double>(i) / fs;
      sx += x, sy += db, sxx += x * x, sxy += x * db;
      ++n;
    }
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -60.0 / slope;
}

// Best total score over all assignments of estimates (rows) to references
// (columns), by recursion over references.
inline double best_assignment(const Eigen::MatrixXd& score, std::vector<int>& perm) {
  const int n = static_cast<int>(score.cols());
  std::vector<int> cur(n), used(n, 0);
  double best = -1e300;
  auto rec = [&](auto&& self, int j, double acc) -> void {
    if (j == n) {
      if (acc > best) best = acc, perm = cur;
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = 1, cur[j] = i;
      self(self, j + 1, acc + score(i, j));
      used[i] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

inline sbss::Spectrogram random_spectrogram(int bins, int frames, int channels, std::uint64_t seed) {
  sbss::Spectrogram x(2 * (bins - 1), bins - 1, frames, channels);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (auto& v : x.data()) v = Complex(g(rng), g(rng));
  return x;
}

inline double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return ((a - b).cwiseAbs().array() / b.cwiseAbs().array().max(1.0)).maxCoeff();
}

}  // namespace oracle

#endif  // SBSS_TESTS_ORACLES_HPP_
