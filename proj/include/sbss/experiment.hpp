// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Batch runner: synthetic sources, simulated rooms over a T60 grid, every
// listed algorithm on every mixture, SDR/SIR improvements per trial.

#ifndef SBSS_EXPERIMENT_HPP_
#define SBSS_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sbss/metrics.hpp"
#include "sbss/room.hpp"
#include "sbss/separation.hpp"

namespace sbss {

struct ExperimentSpec {
  Point3 room{8.0, 8.0, 3.0};
  std::vector<double> t60_list;
  std::vector<Algorithm> algos;
  /// Trial i uses sources and geometry derived from (seed, i) for every T60
  /// and every algorithm.
  std::uint64_t seed = 0;
  int trials = 1;
  int sources = 2;
  int sample_rate = 16000;
  int fft = 1024;
  int hop = 512;
  /// Length of each synthetic source in STFT frames of size fft / hop = 2.
  int frames = 128;
  /// Bases used to generate each synthetic source.
  int source_bases = 4;
  SeparationOptions separation;

  /// Keys: room, t60_list, algos, seeds, trials, sources, sample_rate, fft,
  /// hop, frames, source_bases, bases, iters, mu, rho, bingham_weight,
  /// normalize_input.
  static ExperimentSpec read(const std::string& path);
  void validate() const;
};

struct TrialResult {
  Algorithm algo;
  double t60;
  int trial;
  double sdr_improvement;
  double sir_improvement;
};

struct ConditionSummary {
  Algorithm algo;
  double t60;
  int count;
  double sdr_mean, sdr_std, sir_mean, sir_std;
};

struct ExperimentReport {
  /// Ordered by T60, then algorithm, then trial, following the spec order.
  std::vector<TrialResult> rows;
  std::vector<ConditionSummary> summary() const;
};

/// Runs every condition; trials run on up to jobs threads. Results do not
/// depend on jobs.
ExperimentReport run_experiment(const ExperimentSpec& spec, int jobs = 1);

/// Seed for everything random in one trial.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

/// Synthetic sources for the trial rendered in the default room at t60.
Mixture trial_mixture(const ExperimentSpec& spec, double t60, int trial);

/// Separates the mixture and scores the reference-mic estimates against the
/// source images, with the reference-mic mixture as baseline.
MetricsReport evaluate_separation(const Mixture& mix, Algorithm algo, const ExperimentSpec& spec,
                                  std::uint64_t seed);

/// Header "algo,t60,trial,sdr_impr,sir_impr".
void write_report_csv(const std::string& path, const ExperimentReport& report);
void write_summary_json(const std::string& path, const ExperimentSpec& spec,
                        const ExperimentReport& report);

}  // namespace sbss

#endif  // SBSS_EXPERIMENT_HPP_
