// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// SDR / SIR with time-invariant FIR projections, in the style of BSS-eval.

#ifndef SBSS_METRICS_HPP_
#define SBSS_METRICS_HPP_

#include <vector>

#include <Eigen/Core>

namespace sbss {

inline constexpr int kProjectionTaps = 512;
inline constexpr double kMetricCap = 80.0;

using Signal = std::vector<double>;

/// Scores of every estimate against every reference, indexed (estimate, reference).
struct ScoreMatrix {
  Eigen::MatrixXd sdr;
  Eigen::MatrixXd sir;
};

/// Decomposes each estimate into target (its projection on the delayed copies
/// of one reference), interference (the rest of its projection on all
/// references) and artifacts. SDR = 10 log10(|target|^2 / |estimate - target|^2),
/// SIR = 10 log10(|target|^2 / |interference|^2), both clamped to [-80, 80].
/// All signals must have the same length.
ScoreMatrix score_matrix(const std::vector<Signal>& estimates, const std::vector<Signal>& references,
                         int taps = kProjectionTaps);

/// perm[j] is the estimate assigned to reference j, chosen to maximize mean
/// SIR over all N! assignments. Ties keep the lexicographically first.
std::vector<int> permute_align(const ScoreMatrix& scores);
std::vector<int> permute_align(const std::vector<Signal>& estimates,
                               const std::vector<Signal>& references, int taps = kProjectionTaps);

struct MetricsReport {
  /// Per reference source, after alignment.
  std::vector<double> sdr, sir;
  /// The unprocessed mixture channel scored as the estimate of every source.
  std::vector<double> sdr_mixture, sir_mixture;
  std::vector<double> sdr_improvement, sir_improvement;
  std::vector<int> permutation;

  double mean_sdr_improvement() const;
  double mean_sir_improvement() const;
};

/// Scores estimates after permutation alignment. If mixture is not empty it
/// is scored against the references for the improvement baseline; otherwise
/// the baseline is zero.
MetricsReport sdr_sir(const std::vector<Signal>& estimates, const std::vector<Signal>& references,
                      const Signal& mixture = {}, int taps = kProjectionTaps);

}  // namespace sbss

#endif  // SBSS_METRICS_HPP_
