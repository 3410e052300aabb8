// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/ilrma.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/LU>

#include "parallel.hpp"
#include "sbss/errors.hpp"

namespace sbss {

void IlrmaConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (bases < 1) throw ConfigError("bases per source must be >= 1");
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  if (!(rho >= 0.0)) throw ConfigError("rho must be >= 0");
  if (!(bingham_weight >= 0.0)) throw ConfigError("Bingham weight must be >= 0");
  if (sources < 0) throw ConfigError("number of sources must be >= 0");
}

namespace ilrma {

void update_activations(Eigen::MatrixXd& h, const Eigen::MatrixXd& w,
                        const Eigen::MatrixXd& power, const Eigen::MatrixXd& lambda,
                        const Eigen::VectorXd& mu) {
  const Eigen::MatrixXd inv = lambda.cwiseInverse();
  const Eigen::MatrixXd num = w.transpose() * power.cwiseProduct(inv).cwiseProduct(inv);
  const Eigen::MatrixXd den = w.transpose() * inv;
  const Eigen::Index kk = h.rows(), tt = h.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < tt; ++t) {
    for (Eigen::Index k = 0; k < kk; ++k) {
      const double v = h(k, t) * std::sqrt(num(k, t) / (den(k, t) + mu(k)));
      h(k, t) = std::max(v, kFactorFloor);
    }
  }
}

void update_bases(Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                  const Eigen::MatrixXd& power, const Eigen::MatrixXd& lambda,
                  BasisRule rule, double bingham_weight) {
  const Eigen::MatrixXd inv = lambda.cwiseInverse();
  const Eigen::MatrixXd lin = inv * h.transpose();  // sum_t h / lambda
  const Eigen::Index ff = w.rows(), kk = w.cols();

  if (bingham_weight == 0.0) {
    const Eigen::MatrixXd num = power.cwiseProduct(inv).cwiseProduct(inv) * h.transpose();
#pragma omp parallel for schedule(static)
    for (Eigen::Index f = 0; f < ff; ++f)
      for (Eigen::Index k = 0; k < kk; ++k)
        w(f, k) = std::max(w(f, k) * std::sqrt(num(f, k) / lin(f, k)), kFactorFloor);
    return;
  }

  if (rule == BasisRule::kCubic) {
    const Eigen::MatrixXd num = power.cwiseProduct(inv).cwiseProduct(inv) * h.transpose();
    const double c3 = 2.0 * bingham_weight;
#pragma omp parallel for schedule(static)
    for (Eigen::Index f = 0; f < ff; ++f) {
      for (Eigen::Index k = 0; k < kk; ++k) {
        const double prev = w(f, k);
        // Non-finite statistics propagate as NaN and are caught by the engine.
        const double c0 = -prev * prev * num(f, k);
        const double root = lin(f, k) >= 0.0 && c0 <= 0.0 ? cubic_positive_root(c3, lin(f, k), c0)
                                                           : std::nan("");
        w(f, k) = std::max(root, kFactorFloor);
      }
    }
    return;
  }

  const Eigen::VectorXd hsum = h.rowwise().sum();
  const Eigen::MatrixXd mag = power.cwiseSqrt().cwiseProduct(inv) * h.transpose();
#pragma omp parallel for schedule(static)
  for (Eigen::Index f = 0; f < ff; ++f) {
    for (Eigen::Index k = 0; k < kk; ++k) {
      const double s = hsum(k);
      const double v = (std::sqrt(s * s + 8.0 * w(f, k) * mag(f, k)) - s) / 4.0;
      w(f, k) = std::max(v, kFactorFloor);
    }
  }
}

HermitianMatrix weighted_covariance(const Spectrogram& x, int f,
                                    const Eigen::Ref<const Eigen::RowVectorXd>& lambda) {
  const int m = x.channels();
  const int frames = x.frames();
  CMatrix acc = CMatrix::Zero(m, m);
  for (int t = 0; t < frames; ++t) {
    const CVector v = x.vector(f, t);
    acc.noalias() += (v * v.adjoint()) / lambda(t);
  }
  acc /= static_cast<double>(frames);
  return HermitianMatrix::hermitize(acc);
}

namespace {

// Solves (d v) u = e_n; loads v once if the system is singular.
CVector project(const CMatrix& d, const HermitianMatrix& v, int n, int f) {
  const int m = v.dim();
  CVector e = CVector::Zero(m);
  e(n) = 1.0;
  Eigen::FullPivLU<CMatrix> lu(d * v.matrix());
  if (lu.isInvertible()) return lu.solve(e);
  HermitianMatrix loaded = v;
  loaded.add_scaled(1e-10 * std::max(v.trace(), 1e-300) / m, HermitianMatrix::identity(m));
  Eigen::FullPivLU<CMatrix> retry(d * loaded.matrix());
  if (!retry.isInvertible()) {
    throw SingularMatrix("demixing update is singular at bin " + std::to_string(f));
  }
  return retry.solve(e);
}

}  // namespace

void update_demixing(CMatrix& d, const Spectrogram& x, int f,
                     const std::vector<Eigen::MatrixXd>& lambda) {
  const int sources = static_cast<int>(lambda.size());
  for (int n = 0; n < sources; ++n) {
    const HermitianMatrix v = weighted_covariance(x, f, lambda[n].row(f));
    CVector u = project(d, v, n, f);
    const double q = (u.adjoint() * v.matrix() * u)(0, 0).real();
    if (!(q > 0.0) || !std::isfinite(q)) {
      throw SingularMatrix("demixing normalization failed at bin " + std::to_string(f));
    }
    u /= std::sqrt(q);
    d.row(n) = u.adjoint();
  }
}

Spectrogram demix(const Spectrogram& x, const std::vector<CMatrix>& demixing) {
  const int sources = static_cast<int>(demixing.front().rows());
  Spectrogram y(x.fft_size(), x.hop(), x.frames(), sources);
  y.sample_rate = x.sample_rate;
  y.signal_length = x.signal_length;
  const int bins = x.bins();
#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) {
    for (int t = 0; t < x.frames(); ++t) {
      const CVector out = demixing[f] * x.vector(f, t);
      for (int n = 0; n < sources; ++n) y.at(f, t, n) = out(n);
    }
  }
  return y;
}

std::vector<Spectrogram> back_project(const Spectrogram& y,
                                      const std::vector<CMatrix>& demixing,
                                      int reference_channel) {
  const int sources = y.channels();
  if (reference_channel < 0 || reference_channel >= demixing.front().cols()) {
    throw ContractViolation("reference channel out of range");
  }
  std::vector<Spectrogram> out;
  for (int n = 0; n < sources; ++n) {
    out.emplace_back(y.fft_size(), y.hop(), y.frames(), 1);
    out.back().sample_rate = y.sample_rate;
    out.back().signal_length = y.signal_length;
  }
  for (int f = 0; f < y.bins(); ++f) {
    const CMatrix a = demixing[f].inverse();
    for (int n = 0; n < sources; ++n) {
      const Complex g = a(reference_channel, n);
      for (int t = 0; t < y.frames(); ++t) out[n].at(f, t, 0) = g * y.at(f, t, n);
    }
  }
  return out;
}

double cost(const State& state) {
  const int sources = static_cast<int>(state.power.size());
  double fit = 0.0;
  for (int n = 0; n < sources; ++n) {
    const auto& l = state.lambda[n];
    fit += (state.power[n].array() / l.array() + l.array().log()).sum();
  }
  const double frames = static_cast<double>(state.power.front().cols());
  double logdet = 0.0;
  for (const auto& d : state.demixing) logdet += 2.0 * std::log(std::abs(d.determinant()));
  double total = fit - frames * logdet;
  if (state.sparse) total += prior_penalty(state.factors, state.prior);
  return total;
}

}  // namespace ilrma

IlrmaEngine::IlrmaEngine(const Spectrogram& x, const IlrmaConfig& config)
    : x_(x), config_(config) {
  config_.validate();
  const int m = x.channels();
  if (m < 2) throw UnsupportedConfiguration("ILRMA needs at least two channels");
  if (m > kMaxDim) throw UnsupportedConfiguration("too many channels for the small-matrix kernel");
  if (config_.sources != 0 && config_.sources != m) {
    throw UnsupportedConfiguration("ILRMA is determined: " + std::to_string(config_.sources) +
                                   " sources for " + std::to_string(m) + " channels");
  }
  if (x.frames() < 2) throw UnsupportedConfiguration("ILRMA needs at least two frames");
  for (const auto& v : x.data()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Diverged(0, "non-finite value in the input spectrogram");
    }
  }
  if (config_.reference_channel < 0 || config_.reference_channel >= m) {
    throw ConfigError("reference channel out of range");
  }

  state_.sparse = config_.sparse;
  state_.factors = init_factors(x.bins(), x.frames(), std::vector<int>(m, config_.bases),
                                config_.seed);
  state_.prior = config_.sparse
                     ? SparsePrior::uniform(state_.factors, config_.mu, config_.rho,
                                            config_.bingham_weight)
                     : SparsePrior::uniform(state_.factors, 0.0, 0.0, 0.0);
  state_.demixing.assign(x.bins(), CMatrix::Identity(m, m));
  state_.power.assign(m, Eigen::MatrixXd(x.bins(), x.frames()));
  state_.lambda.assign(m, Eigen::MatrixXd());
  for (int n = 0; n < m; ++n) refresh_lambda(n);
  refresh_output();
}

bool IlrmaEngine::normalizes_scale() const {
  if (config_.normalization == ScaleNormalization::kAlways) return true;
  if (config_.normalization == ScaleNormalization::kNever) return false;
  if (!state_.sparse) return true;
  bool laplace = false;
  for (const auto& mu : state_.prior.mu) laplace = laplace || (mu.array() > 0.0).any();
  return !laplace || state_.prior.bingham_weight == 0.0;
}

void IlrmaEngine::refresh_lambda(int n) { state_.lambda[n] = lambda(state_.factors, n); }

void IlrmaEngine::refresh_output() {
  const int m = x_.channels();
  const int bins = x_.bins();
  const int frames = x_.frames();
#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) {
    const CMatrix& d = state_.demixing[f];
    for (int t = 0; t < frames; ++t) {
      const CVector y = d * x_.vector(f, t);
      for (int n = 0; n < m; ++n) state_.power[n](f, t) = std::norm(y(n));
    }
  }
}

void IlrmaEngine::normalize_scale() {
  const int m = x_.channels();
  for (int n = 0; n < m; ++n) {
    const double c = state_.lambda[n].mean();
    const double s = std::sqrt(c);
    for (auto& d : state_.demixing) d.row(n) /= s;
    state_.power[n] /= c;
    // The likelihood is invariant; put the scale where no prior acts.
    if (!state_.sparse || state_.prior.bingham_weight == 0.0 ||
        config_.normalization == ScaleNormalization::kAlways) {
      state_.factors.W[n] /= c;
    } else {
      state_.factors.H[n] /= c;
    }
    state_.factors.clamp();
    refresh_lambda(n);
  }
}

void IlrmaEngine::iterate() {
  const int m = x_.channels();
  ++iteration_;
  for (int n = 0; n < m; ++n) {
    ilrma::update_activations(state_.factors.H[n], state_.factors.W[n], state_.power[n],
                              state_.lambda[n], state_.prior.mu[n]);
    refresh_lambda(n);
  }
  for (int n = 0; n < m; ++n) {
    ilrma::update_bases(state_.factors.W[n], state_.factors.H[n], state_.power[n],
                        state_.lambda[n], config_.basis_rule, state_.prior.bingham_weight);
    refresh_lambda(n);
  }

  detail::ErrorSlot errors;
  const int bins = x_.bins();
#pragma omp parallel for schedule(dynamic, 16)
  for (int f = 0; f < bins; ++f) {
    errors.run([&] { ilrma::update_demixing(state_.demixing[f], x_, f, state_.lambda); });
  }
  if (errors.failed()) throw Diverged(iteration_, errors.message());
  refresh_output();

  if (normalizes_scale()) normalize_scale();
  check_finite();
}

void IlrmaEngine::check_finite() const {
  for (int n = 0; n < x_.channels(); ++n) {
    if (!state_.lambda[n].allFinite() || !state_.power[n].allFinite()) {
      throw Diverged(iteration_, "non-finite source model or output power");
    }
  }
  for (const auto& d : state_.demixing) {
    if (!d.allFinite() || std::abs(d.determinant()) == 0.0) {
      throw Diverged(iteration_, "non-finite or singular demixing matrix");
    }
  }
}

SeparationResult IlrmaEngine::result() const {
  SeparationResult r;
  r.sources = ilrma::back_project(ilrma::demix(x_, state_.demixing), state_.demixing,
                                  config_.reference_channel);
  r.factors = state_.factors;
  r.demixing = state_.demixing;
  return r;
}

SeparationResult run_ilrma(const Spectrogram& x, const IlrmaConfig& config) {
  IlrmaEngine engine(x, config);
  std::vector<double> trace;
  for (int i = 0; i < config.iterations; ++i) {
    engine.iterate();
    if (config.trace_cost) {
      const double c = engine.cost();
      if (!std::isfinite(c)) throw Diverged(engine.iteration(), "non-finite cost");
      trace.push_back(c);
    }
  }
  SeparationResult r = engine.result();
  r.cost = std::move(trace);
  return r;
}

}  // namespace sbss
