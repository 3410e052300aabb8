// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/reference.hpp"

#include <algorithm>
#include <cmath>

#include "sbss/mnmf.hpp"
#include "sbss/source_model.hpp"

namespace sbss::reference {

namespace {

constexpr double kFloor = 1e-12;

Eigen::VectorXcd observation(const Spectrogram& x, int f, int t) {
  Eigen::VectorXcd v(x.channels());
  for (int m = 0; m < x.channels(); ++m) v(m) = x.at(f, t, m);
  return v;
}

}  // namespace

PlainIlrma::PlainIlrma(const Spectrogram& x, int bases, std::uint64_t seed)
    : x_(x), m_(x.channels()), bins_(x.bins()), frames_(x.frames()) {
  const SourceFactors init = init_factors(bins_, frames_, std::vector<int>(m_, bases), seed);
  w_ = init.W;
  h_ = init.H;
  d_.assign(bins_, Eigen::MatrixXcd::Identity(m_, m_));
  lambda_.assign(m_, Eigen::MatrixXd(bins_, frames_));
  power_.assign(m_, Eigen::MatrixXd(bins_, frames_));
  for (int n = 0; n < m_; ++n) model(n);
  output();
}

void PlainIlrma::model(int n) {
  const int kk = static_cast<int>(w_[n].cols());
  for (int f = 0; f < bins_; ++f) {
    for (int t = 0; t < frames_; ++t) {
      double s = 0.0;
      for (int k = 0; k < kk; ++k) s += w_[n](f, k) * h_[n](k, t);
      lambda_[n](f, t) = std::max(s, kFloor);
    }
  }
}

void PlainIlrma::output() {
  for (int f = 0; f < bins_; ++f) {
    for (int t = 0; t < frames_; ++t) {
      for (int n = 0; n < m_; ++n) {
        Complex y = 0.0;
        for (int m = 0; m < m_; ++m) y += d_[f](n, m) * x_.at(f, t, m);
        power_[n](f, t) = std::norm(y);
      }
    }
  }
}

void PlainIlrma::iterate() {
  for (int n = 0; n < m_; ++n) {
    const int kk = static_cast<int>(h_[n].rows());
    Eigen::MatrixXd next = h_[n];
    for (int k = 0; k < kk; ++k) {
      for (int t = 0; t < frames_; ++t) {
        double num = 0.0, den = 0.0;
        for (int f = 0; f < bins_; ++f) {
          const double l = lambda_[n](f, t);
          num += w_[n](f, k) * power_[n](f, t) / (l * l);
          den += w_[n](f, k) / l;
        }
        next(k, t) = std::max(h_[n](k, t) * std::sqrt(num / den), kFloor);
      }
    }
    h_[n] = next;
    model(n);
  }
  for (int n = 0; n < m_; ++n) {
    const int kk = static_cast<int>(w_[n].cols());
    Eigen::MatrixXd next = w_[n];
    for (int f = 0; f < bins_; ++f) {
      for (int k = 0; k < kk; ++k) {
        double num = 0.0, den = 0.0;
        for (int t = 0; t < frames_; ++t) {
          const double l = lambda_[n](f, t);
          num += h_[n](k, t) * power_[n](f, t) / (l * l);
          den += h_[n](k, t) / l;
        }
        next(f, k) = std::max(w_[n](f, k) * std::sqrt(num / den), kFloor);
      }
    }
    w_[n] = next;
    model(n);
  }
  for (int f = 0; f < bins_; ++f) {
    for (int n = 0; n < m_; ++n) {
      Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(m_, m_);
      for (int t = 0; t < frames_; ++t) {
        const Eigen::VectorXcd xv = observation(x_, f, t);
        v += xv * xv.adjoint() / lambda_[n](f, t);
      }
      v /= static_cast<double>(frames_);
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m_);
      e(n) = 1.0;
      Eigen::VectorXcd u = (d_[f] * v).partialPivLu().solve(e);
      u /= std::sqrt((u.adjoint() * v * u)(0, 0).real());
      d_[f].row(n) = u.adjoint();
    }
  }
  output();
  for (int n = 0; n < m_; ++n) {
    const double c = lambda_[n].mean();
    for (int f = 0; f < bins_; ++f) d_[f].row(n) /= std::sqrt(c);
    power_[n] /= c;
    w_[n] = (w_[n] / c).cwiseMax(kFloor);
    model(n);
  }
}

double PlainIlrma::cost() const {
  double total = 0.0;
  for (int n = 0; n < m_; ++n)
    for (int f = 0; f < bins_; ++f)
      for (int t = 0; t < frames_; ++t)
        total += power_[n](f, t) / lambda_[n](f, t) + std::log(lambda_[n](f, t));
  for (int f = 0; f < bins_; ++f)
    total -= frames_ * 2.0 * std::log(std::abs(d_[f].partialPivLu().determinant()));
  return total;
}

PlainMnmf::PlainMnmf(const Spectrogram& x, int sources, int bases, std::uint64_t seed)
    : x_(x), m_(x.channels()), n_(sources), bins_(x.bins()), frames_(x.frames()) {
  const SourceFactors init = init_factors(bins_, frames_, std::vector<int>(n_, bases), seed);
  w_ = init.W;
  h_ = init.H;
  const auto scms = mnmf::init_scms(m_, bins_, n_, seed ^ 0x9E3779B97F4A7C15ULL);
  r_.resize(bins_);
  for (int f = 0; f < bins_; ++f)
    for (int n = 0; n < n_; ++n) r_[f].push_back(Eigen::MatrixXcd(scms[f][n].matrix()));
  lambda_.assign(n_, Eigen::MatrixXd(bins_, frames_));
  tr_inv_.assign(n_, Eigen::MatrixXd(bins_, frames_));
  tr_fit_.assign(n_, Eigen::MatrixXd(bins_, frames_));
  for (int n = 0; n < n_; ++n) model(n);
}

void PlainMnmf::model(int n) {
  const int kk = static_cast<int>(w_[n].cols());
  for (int f = 0; f < bins_; ++f) {
    for (int t = 0; t < frames_; ++t) {
      double s = 0.0;
      for (int k = 0; k < kk; ++k) s += w_[n](f, k) * h_[n](k, t);
      lambda_[n](f, t) = std::max(s, kFloor);
    }
  }
}

Eigen::MatrixXcd PlainMnmf::covariance(int f, int t) const {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m_, m_);
  for (int n = 0; n < n_; ++n) r += lambda_[n](f, t) * r_[f][n];
  return r;
}

void PlainMnmf::traces() {
  for (int f = 0; f < bins_; ++f) {
    for (int t = 0; t < frames_; ++t) {
      const Eigen::MatrixXcd inv = covariance(f, t).inverse();
      const Eigen::VectorXcd xv = observation(x_, f, t);
      const Eigen::MatrixXcd rx = xv * xv.adjoint();
      for (int n = 0; n < n_; ++n) {
        tr_inv_[n](f, t) = (r_[f][n] * inv).trace().real();
        tr_fit_[n](f, t) = (r_[f][n] * inv * rx * inv).trace().real();
      }
    }
  }
}

void PlainMnmf::iterate() {
  traces();
  for (int n = 0; n < n_; ++n) {
    const int kk = static_cast<int>(h_[n].rows());
    Eigen::MatrixXd next = h_[n];
    for (int k = 0; k < kk; ++k) {
      for (int t = 0; t < frames_; ++t) {
        double num = 0.0, den = 0.0;
        for (int f = 0; f < bins_; ++f) {
          num += w_[n](f, k) * tr_fit_[n](f, t);
          den += w_[n](f, k) * tr_inv_[n](f, t);
        }
        next(k, t) = std::max(h_[n](k, t) * std::sqrt(num / den), kFloor);
      }
    }
    h_[n] = next;
    model(n);
  }
  traces();
  for (int n = 0; n < n_; ++n) {
    const int kk = static_cast<int>(w_[n].cols());
    Eigen::MatrixXd next = w_[n];
    for (int f = 0; f < bins_; ++f) {
      for (int k = 0; k < kk; ++k) {
        double num = 0.0, den = 0.0;
        for (int t = 0; t < frames_; ++t) {
          num += h_[n](k, t) * tr_fit_[n](f, t);
          den += h_[n](k, t) * tr_inv_[n](f, t);
        }
        next(f, k) = std::max(w_[n](f, k) * std::sqrt(num / den), kFloor);
      }
    }
    w_[n] = next;
    model(n);
  }
  for (int f = 0; f < bins_; ++f) {
    std::vector<Eigen::MatrixXcd> a(n_, Eigen::MatrixXcd::Zero(m_, m_));
    std::vector<Eigen::MatrixXcd> b(n_, Eigen::MatrixXcd::Zero(m_, m_));
    for (int t = 0; t < frames_; ++t) {
      const Eigen::MatrixXcd inv = covariance(f, t).inverse();
      const Eigen::VectorXcd xv = observation(x_, f, t);
      const Eigen::MatrixXcd fit = inv * xv * xv.adjoint() * inv;
      for (int n = 0; n < n_; ++n) {
        a[n] += lambda_[n](f, t) * inv;
        b[n] += lambda_[n](f, t) * fit;
      }
    }
    for (int n = 0; n < n_; ++n) {
      const Eigen::MatrixXcd rhs = r_[f][n] * b[n] * r_[f][n];
      const Eigen::MatrixXcd ah = 0.5 * (a[n] + a[n].adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(ah);
      const Eigen::MatrixXcd half = ea.operatorSqrt();
      const Eigen::MatrixXcd neg_half = ea.operatorInverseSqrt();
      Eigen::MatrixXcd inner = half * rhs * half;
      inner = 0.5 * (inner + inner.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ei(inner);
      Eigen::MatrixXcd r = neg_half * ei.operatorSqrt() * neg_half;
      r_[f][n] = 0.5 * (r + r.adjoint());
    }
  }
  for (int f = 0; f < bins_; ++f) {
    for (int n = 0; n < n_; ++n) {
      const double tau = r_[f][n].trace().real() / m_;
      r_[f][n] /= tau;
      w_[n].row(f) *= tau;
    }
  }
  for (int n = 0; n < n_; ++n) {
    w_[n] = w_[n].cwiseMax(kFloor);
    model(n);
  }
}

double PlainMnmf::cost() const {
  double total = 0.0;
  for (int f = 0; f < bins_; ++f) {
    for (int t = 0; t < frames_; ++t) {
      const Eigen::MatrixXcd r = covariance(f, t);
      const Eigen::VectorXcd xv = observation(x_, f, t);
      const auto lu = r.partialPivLu();
      total += (xv.adjoint() * lu.solve(xv))(0, 0).real() + std::log(std::abs(lu.determinant()));
    }
  }
  return total;
}

}  // namespace sbss::reference
