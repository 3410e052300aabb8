// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Full-rank spatial covariance separation: MNMF and its sparse variant.
// The model covariance is Rhat_ft = sum_n lambda_nft R_fn; activations and
// bases follow multiplicative/cubic majorization steps, spatial covariances
// follow a Riccati equation.

#ifndef SBSS_MNMF_HPP_
#define SBSS_MNMF_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "sbss/hermitian.hpp"
#include "sbss/separation.hpp"
#include "sbss/signal.hpp"
#include "sbss/source_model.hpp"

namespace sbss {

struct MnmfConfig {
  int iterations = 100;
  /// 0 means one source per channel.
  int sources = 0;
  int bases = 10;
  double mu = 0.05;
  double rho = 10.0;
  double bingham_weight = 1.0;
  bool sparse = true;
  std::uint64_t seed = 0;
  bool trace_cost = true;
  int reference_channel = 0;

  void validate() const;
};

namespace mnmf {

/// Spatial covariances indexed [f][n].
using SpatialModel = std::vector<std::vector<HermitianMatrix>>;

/// R^x_ft = x_ft x_ft^H, flattened as f * T + t.
std::vector<HermitianMatrix> empirical_covariance(const Spectrogram& x);

/// Identity plus 0.1 times a random PSD matrix of trace M, then scaled to trace M.
SpatialModel init_scms(int channels, int bins, int sources, std::uint64_t seed);

/// sum_n lambda_n R_n at one (f, t).
HermitianMatrix model_covariance(const std::vector<HermitianMatrix>& scms_f,
                                 const std::vector<Eigen::MatrixXd>& lambda, int f, int t);

/// Per source F x T traces evaluated at the current model.
struct Statistics {
  /// Tr(R_fn Rhat_ft^-1)
  std::vector<Eigen::MatrixXd> trace_inv;
  /// Tr(R_fn Rhat_ft^-1 R^x_ft Rhat_ft^-1)
  std::vector<Eigen::MatrixXd> trace_fit;
  /// sum_ft Tr(R^x Rhat^-1) + log det Rhat
  double likelihood = 0.0;
};

Statistics compute_statistics(const Spectrogram& x, const SpatialModel& scms,
                              const std::vector<Eigen::MatrixXd>& lambda);

/// h <- h' sqrt( sum_f w trace_fit / (sum_f w trace_inv + mu) )
void update_activations(Eigen::MatrixXd& h, const Eigen::MatrixXd& w,
                        const Eigen::MatrixXd& trace_inv, const Eigen::MatrixXd& trace_fit,
                        const Eigen::VectorXd& mu);

/// Positive root of 2g w^3 + B w^2 - C = 0 with B = sum_t h trace_inv and
/// C = w'^2 sum_t h trace_fit; g = 0 gives w' sqrt(C' / B).
void update_bases(Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                  const Eigen::MatrixXd& trace_inv, const Eigen::MatrixXd& trace_fit,
                  double bingham_weight);

/// Solves R a R = R' b R' where a = sum_t lambda_t Rhat_t^-1 and
/// b = sum_t lambda_t Rhat_t^-1 R^x_t Rhat_t^-1 are already accumulated.
HermitianMatrix update_scm(const HermitianMatrix& scm, const HermitianMatrix& a,
                           const HermitianMatrix& b);

/// Same update from per-frame quantities of one bin.
HermitianMatrix update_scm(const HermitianMatrix& scm,
                           const Eigen::Ref<const Eigen::RowVectorXd>& lambda,
                           const std::vector<HermitianMatrix>& rx,
                           const std::vector<HermitianMatrix>& rhat);

struct State {
  SourceFactors factors;
  SpatialModel scms;
  SparsePrior prior;
  bool sparse = true;
};

/// sum_ft [Tr(R^x Rhat^-1) + log det Rhat] + prior penalty when sparse.
double cost(const Spectrogram& x, const State& state);

/// Auxiliary matrices Phi_ftn as a function of (f, t, n) and the auxiliary
/// covariance Rhat as a function of (f, t).
using PhiFn = std::function<CMatrix(int, int, int)>;
using RhatFn = std::function<HermitianMatrix(int, int)>;

/// Majorizer of the cost for the given auxiliary variables:
///   sum lambda^-1 Tr(R_n^-1 Phi R^x Phi^H) + sum lambda Tr(R_n Rhat^-1)
///   + sum log det Rhat - F T M + prior penalty.
/// Valid (>= cost) whenever sum_n Phi_ftn = I.
double auxiliary_bound(const Spectrogram& x, const State& state, const PhiFn& phi,
                       const RhatFn& rhat);

/// lambda_n R_n (sum_n lambda_n R_n)^-1, which makes the bound tight.
CMatrix tight_phi(const State& state, int f, int t, int n);

/// s_nft = lambda_nft R_fn Rhat_ft^-1 x_ft at the reference channel.
std::vector<Spectrogram> extract_sources_wiener(const Spectrogram& x,
                                                const std::vector<Eigen::MatrixXd>& lambda,
                                                const SpatialModel& scms,
                                                int reference_channel);

}  // namespace mnmf

class MnmfEngine {
 public:
  MnmfEngine(const Spectrogram& x, const MnmfConfig& config);

  /// One sweep: activations, bases, spatial covariances, trace normalization.
  void iterate();
  /// Cost of the current parameters, cached from the last statistics pass.
  double cost() const;
  int iteration() const { return iteration_; }
  const mnmf::State& state() const { return state_; }
  const std::vector<Eigen::MatrixXd>& lambda() const { return lambda_; }
  /// Trace normalization is applied only when it leaves the cost unchanged,
  /// i.e. when no Bingham penalty acts on the bases.
  bool normalizes_scale() const;

  SeparationResult result() const;

 private:
  void refresh_lambda(int n);
  void refresh_statistics();
  void update_spatial();
  void normalize_scale();

  Spectrogram x_;
  MnmfConfig config_;
  mnmf::State state_;
  std::vector<Eigen::MatrixXd> lambda_;
  mnmf::Statistics stats_;
  int iteration_ = 0;
};

SeparationResult run_mnmf(const Spectrogram& x, const MnmfConfig& config);

}  // namespace sbss

#endif  // SBSS_MNMF_HPP_
