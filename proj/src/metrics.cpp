// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "fft.hpp"
#include "sbss/errors.hpp"

namespace sbss {

namespace {

using Spectrum = std::vector<Complex>;

double to_db(double num, double den) {
  if (!(den > 0.0)) return num > 0.0 ? kMetricCap : -kMetricCap;
  if (!(num > 0.0)) return -kMetricCap;
  return std::clamp(10.0 * std::log10(num / den), -kMetricCap, kMetricCap);
}

// Least-squares projection onto delayed copies of a set of references.
class Projector {
 public:
  Projector(const std::vector<Signal>& refs, int taps)
      : taps_(taps), len_(refs.front().size()),
        nfft_(detail::next_pow2(static_cast<int>(len_) + taps - 1)), fft_(nfft_) {
    for (const auto& r : refs) spectra_.push_back(transform(r));
    const int n = static_cast<int>(refs.size());
    // c_ij(tau) = sum_m r_i[m] r_j[m + tau]
    gram_.resize(n * taps, n * taps);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const auto c = correlate(spectra_[i], spectra_[j]);
        for (int a = 0; a < taps; ++a) {
          for (int b = 0; b < taps; ++b) {
            const int tau = a - b;
            const double v = c[(tau + nfft_) % nfft_];
            gram_(i * taps + a, j * taps + b) = v;
            gram_(j * taps + b, i * taps + a) = v;
          }
        }
      }
    }
    single_.reserve(n);
    for (int i = 0; i < n; ++i) {
      single_.emplace_back(gram_.block(i * taps, i * taps, taps, taps));
    }
    full_.compute(gram_);
  }

  Spectrum transform(const Signal& s) {
    std::vector<double> buf(nfft_, 0.0);
    std::copy(s.begin(), s.end(), buf.begin());
    Spectrum out(nfft_ / 2 + 1);
    fft_.forward(buf, out);
    return out;
  }

  std::vector<double> correlate(const Spectrum& a, const Spectrum& b) {
    Spectrum prod(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) prod[k] = std::conj(a[k]) * b[k];
    std::vector<double> out(nfft_);
    fft_.inverse(prod, out);
    for (auto& v : out) v /= nfft_;
    return out;
  }

  // Projection of the estimate onto reference j alone (j >= 0) or onto all
  // references (j < 0); length len + taps - 1.
  std::vector<double> project(const Spectrum& est, int j) {
    const int n = static_cast<int>(spectra_.size());
    const int first = j < 0 ? 0 : j;
    const int count = j < 0 ? n : 1;
    Eigen::VectorXd rhs(count * taps_);
    for (int i = 0; i < count; ++i) {
      const auto c = correlate(spectra_[first + i], est);
      for (int a = 0; a < taps_; ++a) rhs(i * taps_ + a) = c[a];
    }
    Eigen::VectorXd coef;
    if (j < 0) {
      coef = full_.solve(rhs);
    } else {
      coef = single_[j].solve(rhs);
    }
    Spectrum acc(nfft_ / 2 + 1, Complex(0.0));
    for (int i = 0; i < count; ++i) {
      std::vector<double> filt(nfft_, 0.0);
      for (int a = 0; a < taps_; ++a) filt[a] = coef(i * taps_ + a);
      Spectrum fs(nfft_ / 2 + 1);
      fft_.forward(filt, fs);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += fs[k] * spectra_[first + i][k];
    }
    std::vector<double> out(nfft_);
    fft_.inverse(acc, out);
    out.resize(len_ + taps_ - 1);
    for (auto& v : out) v /= nfft_;
    return out;
  }

 private:
  int taps_;
  std::size_t len_;
  int nfft_;
  detail::RealFft fft_;
  std::vector<Spectrum> spectra_;
  Eigen::MatrixXd gram_;
  std::vector<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> single_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> full_;
};

void check_inputs(const std::vector<Signal>& estimates, const std::vector<Signal>& references,
                  int taps) {
  if (references.empty()) throw ContractViolation("sdr_sir: no references");
  if (estimates.empty()) throw ContractViolation("sdr_sir: no estimates");
  if (taps < 1) throw ContractViolation("sdr_sir: taps must be >= 1");
  const std::size_t len = references.front().size();
  if (len == 0) throw ContractViolation("sdr_sir: empty reference");
  for (const auto& r : references) {
    if (r.size() != len) throw ContractViolation("sdr_sir: reference length mismatch");
  }
  for (const auto& e : estimates) {
    if (e.size() != len) {
      throw ContractViolation("sdr_sir: estimate length " + std::to_string(e.size()) +
                              " does not match reference length " + std::to_string(len));
    }
  }
}

}  // namespace

ScoreMatrix score_matrix(const std::vector<Signal>& estimates, const std::vector<Signal>& references,
                         int taps) {
  check_inputs(estimates, references, taps);
  Projector proj(references, taps);
  const int ne = static_cast<int>(estimates.size());
  const int nr = static_cast<int>(references.size());
  ScoreMatrix out{Eigen::MatrixXd(ne, nr), Eigen::MatrixXd(ne, nr)};
  for (int i = 0; i < ne; ++i) {
    const Spectrum es = proj.transform(estimates[i]);
    const auto all = proj.project(es, -1);
    std::vector<double> padded(all.size(), 0.0);
    std::copy(estimates[i].begin(), estimates[i].end(), padded.begin());
    for (int j = 0; j < nr; ++j) {
      const auto target = proj.project(es, j);
      double e_target = 0.0, e_interf = 0.0, e_rest = 0.0;
      for (std::size_t k = 0; k < padded.size(); ++k) {
        e_target += target[k] * target[k];
        const double interf = all[k] - target[k];
        e_interf += interf * interf;
        const double rest = padded[k] - target[k];
        e_rest += rest * rest;
      }
      out.sdr(i, j) = to_db(e_target, e_rest);
      out.sir(i, j) = to_db(e_target, e_interf);
    }
  }
  return out;
}

std::vector<int> permute_align(const ScoreMatrix& scores) {
  const int n = static_cast<int>(scores.sir.cols());
  if (scores.sir.rows() != n) throw ContractViolation("permute_align: need as many estimates as references");
  if (n > 8) throw UnsupportedConfiguration("permute_align: more than 8 sources");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += scores.sir(perm[j], j);
    if (s > best_score) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<int> permute_align(const std::vector<Signal>& estimates,
                               const std::vector<Signal>& references, int taps) {
  return permute_align(score_matrix(estimates, references, taps));
}

double MetricsReport::mean_sdr_improvement() const {
  if (sdr_improvement.empty()) return 0.0;
  return std::accumulate(sdr_improvement.begin(), sdr_improvement.end(), 0.0) / sdr_improvement.size();
}

double MetricsReport::mean_sir_improvement() const {
  if (sir_improvement.empty()) return 0.0;
  return std::accumulate(sir_improvement.begin(), sir_improvement.end(), 0.0) / sir_improvement.size();
}

MetricsReport sdr_sir(const std::vector<Signal>& estimates, const std::vector<Signal>& references,
                      const Signal& mixture, int taps) {
  if (estimates.size() != references.size()) {
    throw ContractViolation("sdr_sir: " + std::to_string(estimates.size()) + " estimates for " +
                            std::to_string(references.size()) + " references");
  }
  std::vector<Signal> all = estimates;
  if (!mixture.empty()) all.push_back(mixture);
  const ScoreMatrix joint = score_matrix(all, references, taps);
  const int n = static_cast<int>(references.size());
  const ScoreMatrix scores{joint.sdr.topRows(n), joint.sir.topRows(n)};
  MetricsReport r;
  r.permutation = permute_align(scores);
  for (int j = 0; j < n; ++j) {
    r.sdr.push_back(scores.sdr(r.permutation[j], j));
    r.sir.push_back(scores.sir(r.permutation[j], j));
    r.sdr_mixture.push_back(mixture.empty() ? 0.0 : joint.sdr(n, j));
    r.sir_mixture.push_back(mixture.empty() ? 0.0 : joint.sir(n, j));
  }
  for (int j = 0; j < n; ++j) {
    r.sdr_improvement.push_back(r.sdr[j] - r.sdr_mixture[j]);
    r.sir_improvement.push_back(r.sir[j] - r.sir_mixture[j]);
  }
  return r;
}

}  // namespace sbss
