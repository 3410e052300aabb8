// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/mnmf.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/LU>

#include "parallel.hpp"
#include "sbss/errors.hpp"

namespace sbss {

void MnmfConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (bases < 1) throw ConfigError("bases per source must be >= 1");
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  if (!(rho >= 0.0)) throw ConfigError("rho must be >= 0");
  if (!(bingham_weight >= 0.0)) throw ConfigError("Bingham weight must be >= 0");
  if (sources < 0) throw ConfigError("number of sources must be >= 0");
}

namespace mnmf {

std::vector<HermitianMatrix> empirical_covariance(const Spectrogram& x) {
  std::vector<HermitianMatrix> out;
  out.reserve(static_cast<std::size_t>(x.bins()) * x.frames());
  for (int f = 0; f < x.bins(); ++f)
    for (int t = 0; t < x.frames(); ++t) out.push_back(HermitianMatrix::outer(x.vector(f, t)));
  return out;
}

SpatialModel init_scms(int channels, int bins, int sources, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpatialModel scms(bins);
  for (int f = 0; f < bins; ++f) {
    for (int n = 0; n < sources; ++n) {
      CMatrix g(channels, channels);
      for (int i = 0; i < channels; ++i)
        for (int j = 0; j < channels; ++j) g(i, j) = Complex(normal(gen), normal(gen));
      HermitianMatrix p = HermitianMatrix::hermitize(g * g.adjoint());
      p *= channels / p.trace();
      HermitianMatrix r = HermitianMatrix::identity(channels);
      r.add_scaled(0.1, p);
      r *= channels / r.trace();
      scms[f].push_back(r);
    }
  }
  return scms;
}

HermitianMatrix model_covariance(const std::vector<HermitianMatrix>& scms_f,
                                 const std::vector<Eigen::MatrixXd>& lambda, int f, int t) {
  HermitianMatrix r(scms_f.front().dim());
  for (std::size_t n = 0; n < scms_f.size(); ++n) r.add_scaled(lambda[n](f, t), scms_f[n]);
  return r;
}

Statistics compute_statistics(const Spectrogram& x, const SpatialModel& scms,
                              const std::vector<Eigen::MatrixXd>& lambda) {
  const int bins = x.bins();
  const int frames = x.frames();
  const int sources = static_cast<int>(lambda.size());
  Statistics s;
  s.trace_inv.assign(sources, Eigen::MatrixXd(bins, frames));
  s.trace_fit.assign(sources, Eigen::MatrixXd(bins, frames));
  std::vector<double> partial(bins, 0.0);
  detail::ErrorSlot errors;

#pragma omp parallel for schedule(dynamic, 8)
  for (int f = 0; f < bins; ++f) {
    errors.run([&] {
      double acc = 0.0;
      for (int t = 0; t < frames; ++t) {
        const HermitianMatrix rhat = model_covariance(scms[f], lambda, f, t);
        const PsdInverse inv = inv_logdet_psd(rhat);
        const CVector xv = x.vector(f, t);
        const CVector u = inv.inverse.matrix() * xv;
        acc += xv.dot(u).real() + inv.logdet;
        for (int n = 0; n < sources; ++n) {
          s.trace_inv[n](f, t) = trace_prod(scms[f][n], inv.inverse.matrix());
          s.trace_fit[n](f, t) = u.dot(scms[f][n].matrix() * u).real();
        }
      }
      partial[f] = acc;
    });
  }
  if (errors.failed()) throw SingularMatrix(errors.message());
  for (double p : partial) s.likelihood += p;
  return s;
}

void update_activations(Eigen::MatrixXd& h, const Eigen::MatrixXd& w,
                        const Eigen::MatrixXd& trace_inv, const Eigen::MatrixXd& trace_fit,
                        const Eigen::VectorXd& mu) {
  const Eigen::MatrixXd num = w.transpose() * trace_fit;
  const Eigen::MatrixXd den = w.transpose() * trace_inv;
  const Eigen::Index kk = h.rows(), tt = h.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < tt; ++t)
    for (Eigen::Index k = 0; k < kk; ++k)
      h(k, t) = std::max(h(k, t) * std::sqrt(num(k, t) / (den(k, t) + mu(k))), kFactorFloor);
}

void update_bases(Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                  const Eigen::MatrixXd& trace_inv, const Eigen::MatrixXd& trace_fit,
                  double bingham_weight) {
  const Eigen::MatrixXd lin = trace_inv * h.transpose();
  const Eigen::MatrixXd fit = trace_fit * h.transpose();
  const Eigen::Index ff = w.rows(), kk = w.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index f = 0; f < ff; ++f) {
    for (Eigen::Index k = 0; k < kk; ++k) {
      const double prev = w(f, k);
      const double c0 = -prev * prev * fit(f, k);
      double next = std::nan("");
      if (bingham_weight == 0.0) {
        next = prev * std::sqrt(fit(f, k) / lin(f, k));
      } else if (lin(f, k) >= 0.0 && c0 <= 0.0) {
        next = cubic_positive_root(2.0 * bingham_weight, lin(f, k), c0);
      }
      w(f, k) = std::max(next, kFactorFloor);
    }
  }
}

HermitianMatrix update_scm(const HermitianMatrix& scm, const HermitianMatrix& a,
                           const HermitianMatrix& b) {
  const CMatrix& r = scm.matrix();
  const HermitianMatrix rhs = HermitianMatrix::hermitize(r * b.matrix() * r);
  return riccati_solve(a, rhs);
}

HermitianMatrix update_scm(const HermitianMatrix& scm,
                           const Eigen::Ref<const Eigen::RowVectorXd>& lambda,
                           const std::vector<HermitianMatrix>& rx,
                           const std::vector<HermitianMatrix>& rhat) {
  const int m = scm.dim();
  HermitianMatrix a(m), b(m);
  for (Eigen::Index t = 0; t < lambda.size(); ++t) {
    const HermitianMatrix inv = inv_psd(rhat[t]);
    a.add_scaled(lambda(t), inv);
    b.add_scaled(lambda(t), HermitianMatrix::hermitize(inv.matrix() * rx[t].matrix() *
                                                       inv.matrix()));
  }
  return update_scm(scm, a, b);
}

double cost(const Spectrogram& x, const State& state) {
  std::vector<Eigen::MatrixXd> lambda;
  for (int n = 0; n < state.factors.sources(); ++n) lambda.push_back(sbss::lambda(state.factors, n));
  double total = 0.0;
  for (int f = 0; f < x.bins(); ++f) {
    for (int t = 0; t < x.frames(); ++t) {
      const HermitianMatrix rhat = model_covariance(state.scms[f], lambda, f, t);
      const HermitianMatrix rx = HermitianMatrix::outer(x.vector(f, t));
      total += trace_prod(rx, inv_psd(rhat).matrix()) + logdet_psd(rhat);
    }
  }
  if (state.sparse) total += prior_penalty(state.factors, state.prior);
  return total;
}

double auxiliary_bound(const Spectrogram& x, const State& state, const PhiFn& phi,
                       const RhatFn& rhat) {
  const int sources = state.factors.sources();
  const int m = x.channels();
  std::vector<CMatrix> scm_inv;
  double total = 0.0;
  for (int f = 0; f < x.bins(); ++f) {
    scm_inv.clear();
    for (int n = 0; n < sources; ++n) scm_inv.push_back(inv_psd(state.scms[f][n]).matrix());
    for (int t = 0; t < x.frames(); ++t) {
      const CMatrix rx = HermitianMatrix::outer(x.vector(f, t)).matrix();
      const HermitianMatrix aux = rhat(f, t);
      const CMatrix aux_inv = inv_psd(aux).matrix();
      for (int n = 0; n < sources; ++n) {
        const double l = lambda(state.factors, n, f, t);
        const CMatrix p = phi(f, t, n);
        total += (scm_inv[n] * p * rx * p.adjoint()).trace().real() / l;
        total += l * trace_prod(state.scms[f][n], aux_inv);
      }
      total += logdet_psd(aux) - m;
    }
  }
  if (state.sparse) total += prior_penalty(state.factors, state.prior);
  return total;
}

CMatrix tight_phi(const State& state, int f, int t, int n) {
  HermitianMatrix sum(state.scms[f].front().dim());
  for (int j = 0; j < state.factors.sources(); ++j)
    sum.add_scaled(lambda(state.factors, j, f, t), state.scms[f][j]);
  return lambda(state.factors, n, f, t) * state.scms[f][n].matrix() * inv_psd(sum).matrix();
}

std::vector<Spectrogram> extract_sources_wiener(const Spectrogram& x,
                                                const std::vector<Eigen::MatrixXd>& lambda,
                                                const SpatialModel& scms,
                                                int reference_channel) {
  if (reference_channel < 0 || reference_channel >= x.channels()) {
    throw ContractViolation("reference channel out of range");
  }
  const int sources = static_cast<int>(lambda.size());
  std::vector<Spectrogram> out;
  for (int n = 0; n < sources; ++n) {
    out.emplace_back(x.fft_size(), x.hop(), x.frames(), 1);
    out.back().sample_rate = x.sample_rate;
    out.back().signal_length = x.signal_length;
  }
  const int bins = x.bins();
#pragma omp parallel for schedule(dynamic, 8)
  for (int f = 0; f < bins; ++f) {
    for (int t = 0; t < x.frames(); ++t) {
      const CVector u = inv_psd(model_covariance(scms[f], lambda, f, t)).matrix() * x.vector(f, t);
      for (int n = 0; n < sources; ++n) {
        const Complex proj = (scms[f][n].matrix().row(reference_channel) * u)(0, 0);
        out[n].at(f, t, 0) = lambda[n](f, t) * proj;
      }
    }
  }
  return out;
}

}  // namespace mnmf

MnmfEngine::MnmfEngine(const Spectrogram& x, const MnmfConfig& config)
    : x_(x), config_(config) {
  config_.validate();
  const int m = x.channels();
  if (m < 2) throw UnsupportedConfiguration("MNMF needs at least two channels");
  if (m > kMaxDim) throw UnsupportedConfiguration("too many channels for the small-matrix kernel");
  const int sources = config_.sources == 0 ? m : config_.sources;
  if (sources > m) {
    throw UnsupportedConfiguration("more sources than channels is not supported");
  }
  if (config_.reference_channel < 0 || config_.reference_channel >= m) {
    throw ConfigError("reference channel out of range");
  }
  for (const auto& v : x.data()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Diverged(0, "non-finite value in the input spectrogram");
    }
  }

  state_.sparse = config_.sparse;
  state_.factors = init_factors(x.bins(), x.frames(), std::vector<int>(sources, config_.bases),
                                config_.seed);
  state_.prior = config_.sparse
                     ? SparsePrior::uniform(state_.factors, config_.mu, config_.rho,
                                            config_.bingham_weight)
                     : SparsePrior::uniform(state_.factors, 0.0, 0.0, 0.0);
  state_.scms = mnmf::init_scms(m, x.bins(), sources, config_.seed ^ 0x9E3779B97F4A7C15ULL);
  lambda_.assign(sources, Eigen::MatrixXd());
  for (int n = 0; n < sources; ++n) refresh_lambda(n);
  refresh_statistics();
}

bool MnmfEngine::normalizes_scale() const {
  return !state_.sparse || state_.prior.bingham_weight == 0.0;
}

double MnmfEngine::cost() const {
  double c = stats_.likelihood;
  if (state_.sparse) c += prior_penalty(state_.factors, state_.prior);
  return c;
}

void MnmfEngine::refresh_lambda(int n) { lambda_[n] = sbss::lambda(state_.factors, n); }

void MnmfEngine::refresh_statistics() {
  try {
    stats_ = mnmf::compute_statistics(x_, state_.scms, lambda_);
  } catch (const SingularMatrix& e) {
    throw Diverged(iteration_, e.what());
  }
  if (!std::isfinite(stats_.likelihood)) throw Diverged(iteration_, "non-finite likelihood");
}

void MnmfEngine::update_spatial() {
  const int bins = x_.bins();
  const int frames = x_.frames();
  const int m = x_.channels();
  const int sources = state_.factors.sources();
  detail::ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 8)
  for (int f = 0; f < bins; ++f) {
    errors.run([&] {
      std::vector<HermitianMatrix> a(sources, HermitianMatrix(m));
      std::vector<HermitianMatrix> b(sources, HermitianMatrix(m));
      for (int t = 0; t < frames; ++t) {
        const HermitianMatrix inv = inv_psd(mnmf::model_covariance(state_.scms[f], lambda_, f, t));
        const HermitianMatrix fit = HermitianMatrix::outer(inv.matrix() * x_.vector(f, t));
        for (int n = 0; n < sources; ++n) {
          a[n].add_scaled(lambda_[n](f, t), inv);
          b[n].add_scaled(lambda_[n](f, t), fit);
        }
      }
      for (int n = 0; n < sources; ++n) {
        state_.scms[f][n] = mnmf::update_scm(state_.scms[f][n], a[n], b[n]);
      }
    });
  }
  if (errors.failed()) throw Diverged(iteration_, errors.message());
}

void MnmfEngine::normalize_scale() {
  const int m = x_.channels();
  for (int f = 0; f < x_.bins(); ++f) {
    for (int n = 0; n < state_.factors.sources(); ++n) {
      const double tau = state_.scms[f][n].trace() / m;
      state_.scms[f][n] *= 1.0 / tau;
      state_.factors.W[n].row(f) *= tau;
    }
  }
  state_.factors.clamp();
  for (int n = 0; n < state_.factors.sources(); ++n) refresh_lambda(n);
}

void MnmfEngine::iterate() {
  ++iteration_;
  const int sources = state_.factors.sources();
  for (int n = 0; n < sources; ++n) {
    mnmf::update_activations(state_.factors.H[n], state_.factors.W[n], stats_.trace_inv[n],
                             stats_.trace_fit[n], state_.prior.mu[n]);
    refresh_lambda(n);
  }
  refresh_statistics();
  for (int n = 0; n < sources; ++n) {
    mnmf::update_bases(state_.factors.W[n], state_.factors.H[n], stats_.trace_inv[n],
                       stats_.trace_fit[n], state_.prior.bingham_weight);
    refresh_lambda(n);
  }
  update_spatial();
  if (normalizes_scale()) normalize_scale();
  refresh_statistics();
  for (const auto& l : lambda_) {
    if (!l.allFinite()) throw Diverged(iteration_, "non-finite source model");
  }
}

SeparationResult MnmfEngine::result() const {
  SeparationResult r;
  r.sources = mnmf::extract_sources_wiener(x_, lambda_, state_.scms, config_.reference_channel);
  r.factors = state_.factors;
  r.scms = state_.scms;
  return r;
}

SeparationResult run_mnmf(const Spectrogram& x, const MnmfConfig& config) {
  MnmfEngine engine(x, config);
  std::vector<double> trace;
  for (int i = 0; i < config.iterations; ++i) {
    engine.iterate();
    if (config.trace_cost) trace.push_back(engine.cost());
  }
  SeparationResult r = engine.result();
  r.cost = std::move(trace);
  return r;
}

}  // namespace sbss
