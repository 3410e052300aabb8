// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Determined separation with a rank-1 spatial model: ILRMA and its sparse
// variant. Source model updates are majorization-minimization steps; the
// demixing matrices follow iterative projection.

#ifndef SBSS_ILRMA_HPP_
#define SBSS_ILRMA_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sbss/hermitian.hpp"
#include "sbss/separation.hpp"
#include "sbss/signal.hpp"
#include "sbss/source_model.hpp"

namespace sbss {

/// How the basis update is solved.
///  kClosedForm: w = (sqrt(S^2 + 8 w' sum_t |y| h / lambda) - S) / 4, S = sum_t h.
///  kCubic: positive root of 2g w^3 + B w^2 - C = 0, the stationary point of the
///          majorizer, where g is the Bingham weight.
enum class BasisRule { kClosedForm, kCubic };

/// When the per-iteration mean-lambda scale normalization runs.
///  kWhenInvariant: only if it cannot change the cost (plain model, no Laplace
///                  weight, or no Bingham weight).
///  kAlways: every iteration; the scale goes into W. With both priors active
///           this can raise the cost.
///  kNever: never.
enum class ScaleNormalization { kWhenInvariant, kAlways, kNever };

struct IlrmaConfig {
  int iterations = 100;
  /// Number of sources; 0 means one per channel. Anything else than the
  /// channel count is rejected.
  int sources = 0;
  int bases = 10;
  double mu = 0.05;
  double rho = 10.0;
  double bingham_weight = 1.0;
  /// false runs plain ILRMA: no prior terms in the updates or the cost.
  bool sparse = true;
  BasisRule basis_rule = BasisRule::kCubic;
  ScaleNormalization normalization = ScaleNormalization::kWhenInvariant;
  std::uint64_t seed = 0;
  bool trace_cost = true;
  int reference_channel = 0;

  void validate() const;
};

namespace ilrma {

/// h <- h' sqrt( sum_f w |y|^2 / lambda^2 / (sum_f w / lambda + mu) ), for all k, t.
/// power and lambda are F x T; mu has K entries.
void update_activations(Eigen::MatrixXd& h, const Eigen::MatrixXd& w,
                        const Eigen::MatrixXd& power, const Eigen::MatrixXd& lambda,
                        const Eigen::VectorXd& mu);

/// Basis update for one source. With bingham_weight == 0 both rules reduce to
/// w <- w' sqrt( sum_t h |y|^2 / lambda^2 / sum_t h / lambda ).
void update_bases(Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                  const Eigen::MatrixXd& power, const Eigen::MatrixXd& lambda,
                  BasisRule rule, double bingham_weight);

/// (1/T) sum_t x_ft x_ft^H / lambda_t for one bin.
HermitianMatrix weighted_covariance(const Spectrogram& x, int f,
                                    const Eigen::Ref<const Eigen::RowVectorXd>& lambda);

/// Iterative projection over every source at bin f. lambda[n] is F x T.
/// Row n of d holds d_n^H so that y = d x.
void update_demixing(CMatrix& d, const Spectrogram& x, int f,
                     const std::vector<Eigen::MatrixXd>& lambda);

/// y_ft = D_f x_ft as an N-channel spectrogram.
Spectrogram demix(const Spectrogram& x, const std::vector<CMatrix>& demixing);

/// Minimal-distortion projection: source n at bin f scaled by [D_f^-1]_{ref,n}.
std::vector<Spectrogram> back_project(const Spectrogram& y,
                                      const std::vector<CMatrix>& demixing,
                                      int reference_channel);

/// Everything the cost depends on.
struct State {
  SourceFactors factors;
  std::vector<CMatrix> demixing;
  /// |y_nft|^2 and lambda_nft per source, F x T.
  std::vector<Eigen::MatrixXd> power;
  std::vector<Eigen::MatrixXd> lambda;
  SparsePrior prior;
  bool sparse = true;
};

/// sum (|y|^2/lambda + log lambda) - T sum_f log|det D_f D_f^H| + prior penalty
/// (including -sum rho) when the state is sparse. The normalization constant of
/// the Gaussian and of the priors is dropped.
double cost(const State& state);

}  // namespace ilrma

/// Holds one separation job. Not shared across threads.
class IlrmaEngine {
 public:
  IlrmaEngine(const Spectrogram& x, const IlrmaConfig& config);

  /// One sweep: activations, bases, demixing, scale normalization.
  void iterate();
  double cost() const { return ilrma::cost(state_); }
  int iteration() const { return iteration_; }
  const ilrma::State& state() const { return state_; }
  /// Whether the per-iteration mean-lambda normalization leaves the cost
  /// unchanged for this configuration and is therefore applied.
  bool normalizes_scale() const;

  SeparationResult result() const;

 private:
  void refresh_lambda(int n);
  void refresh_output();
  void normalize_scale();
  void check_finite() const;

  Spectrogram x_;
  IlrmaConfig config_;
  ilrma::State state_;
  int iteration_ = 0;
};

/// Runs config.iterations sweeps. Throws UnsupportedConfiguration unless the
/// mixture has at least two channels and two frames, Diverged on NaN.
SeparationResult run_ilrma(const Spectrogram& x, const IlrmaConfig& config);

}  // namespace sbss

#endif  // SBSS_ILRMA_HPP_
