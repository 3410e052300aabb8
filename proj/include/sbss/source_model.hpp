// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Low-rank nonnegative source power model lambda_nft = sum_k w_nfk h_nkt
// with a Bingham prior on the bases and a Laplace prior on the activations.

#ifndef SBSS_SOURCE_MODEL_HPP_
#define SBSS_SOURCE_MODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace sbss {

/// Lower bound applied to every factor entry and to lambda.
inline constexpr double kFactorFloor = 1e-12;

/// Per-source basis (F x K_n) and activation (K_n x T) matrices. Each source
/// owns a dedicated block of K_n bases.
struct SourceFactors {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::MatrixXd> H;

  int sources() const { return static_cast<int>(W.size()); }
  int bins() const { return W.empty() ? 0 : static_cast<int>(W.front().rows()); }
  int frames() const { return H.empty() ? 0 : static_cast<int>(H.front().cols()); }
  int bases(int n) const { return static_cast<int>(W[n].cols()); }

  /// Raises every entry to at least kFactorFloor.
  void clamp();
};

/// Hyperparameters of the sparse prior. theta is fixed to the all-ones vector;
/// bingham_weight scales the whole basis penalty (0 disables it).
struct SparsePrior {
  std::vector<Eigen::VectorXd> rho;  // K_n entries per source
  std::vector<Eigen::VectorXd> mu;   // K_n entries per source
  double bingham_weight = 1.0;

  /// Same mu and rho for every basis of every source.
  static SparsePrior uniform(const SourceFactors& shape, double mu, double rho,
                             double bingham_weight = 1.0);
  /// Sum over n, k of rho_nk.
  double rho_total() const;
};

/// lambda_nft, floored at kFactorFloor.
double lambda(const SourceFactors& factors, int n, int f, int t);

/// F x T matrix of lambda_nft for source n, floored at kFactorFloor.
Eigen::MatrixXd lambda(const SourceFactors& factors, int n);

/// sum mu_nk |h_nkt| + bingham_weight * sum w_nfk^2 - sum rho_nk
double prior_penalty(const SourceFactors& factors, const SparsePrior& prior);

/// Fraction of entries <= 1e-6 max(H). An all-zero matrix counts as fully sparse.
double sparsity_fraction(const Eigen::MatrixXd& h);

/// Entries uniform in (0.1, 1.0) from a 64-bit Mersenne Twister seeded with seed.
SourceFactors init_factors(int bins, int frames, const std::vector<int>& bases,
                           std::uint64_t seed);

/// Text dump:
///   sbss-factors 1
///   sources N
///   then for every source n: "W F K" followed by F rows of K values,
///   and "H K T" followed by K rows of T values (row-major, %.17g).
void write_factors(std::ostream& out, const SourceFactors& factors);
SourceFactors read_factors(std::istream& in);

}  // namespace sbss

#endif  // SBSS_SOURCE_MODEL_HPP_
