// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SBSS_SEPARATION_HPP_
#define SBSS_SEPARATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sbss/hermitian.hpp"
#include "sbss/signal.hpp"
#include "sbss/source_model.hpp"

namespace sbss {

enum class Algorithm { kIlrma, kSparseIlrma, kMnmf, kSparseMnmf };

/// "ilrma", "s-ilrma", "mnmf", "s-mnmf"; throws ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algo);

struct SeparationResult {
  /// One single-channel spectrogram per source, expressed at the reference
  /// microphone.
  std::vector<Spectrogram> sources;
  /// Cost after each iteration.
  std::vector<double> cost;
  SourceFactors factors;
  /// ILRMA only: per-bin N x M demixing matrices.
  std::vector<CMatrix> demixing;
  /// MNMF only: spatial covariances indexed [f][n].
  std::vector<std::vector<HermitianMatrix>> scms;
};

/// Hyperparameters shared by every algorithm. Fields that do not apply to
/// the chosen algorithm are ignored.
struct SeparationOptions {
  int iterations = 100;
  int bases = 10;
  double mu = 0.05;
  double rho = 10.0;
  double bingham_weight = 1.0;
  std::uint64_t seed = 0;
  bool trace_cost = true;
  int reference_channel = 0;
  /// Run on x scaled to unit mean power and undo the scale on the outputs.
  bool normalize_input = false;
};

/// Runs the engine for algo on x. Plain variants ignore mu, rho and the
/// Bingham weight.
SeparationResult separate(const Spectrogram& x, Algorithm algo, const SeparationOptions& opts);

/// "iteration,cost" CSV, iterations counted from 1.
void write_cost_trace(const std::string& path, const std::vector<double>& cost);

/// Scales every channel of every source spectrogram by the same factor.
void scale_sources(std::vector<Spectrogram>& sources, double factor);

/// Global scale s such that the mean of |x_ftm|^2 over all entries of s * x
/// equals one. Returns 1 for an all-zero spectrogram.
double power_normalization(const Spectrogram& x);

}  // namespace sbss

#endif  // SBSS_SEPARATION_HPP_
