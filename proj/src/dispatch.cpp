// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/ilrma.hpp"
#include "sbss/mnmf.hpp"
#include "sbss/separation.hpp"

namespace sbss {

SeparationResult separate(const Spectrogram& x, Algorithm algo, const SeparationOptions& opts) {
  const bool sparse = algo == Algorithm::kSparseIlrma || algo == Algorithm::kSparseMnmf;
  double scale = 1.0;
  Spectrogram scaled;
  if (opts.normalize_input) {
    scale = power_normalization(x);
    scaled = x;
    for (auto& v : scaled.data()) v *= scale;
  }
  const Spectrogram& input = opts.normalize_input ? scaled : x;

  SeparationResult result;
  if (algo == Algorithm::kIlrma || algo == Algorithm::kSparseIlrma) {
    IlrmaConfig cfg;
    cfg.iterations = opts.iterations;
    cfg.bases = opts.bases;
    cfg.mu = opts.mu;
    cfg.rho = opts.rho;
    cfg.bingham_weight = opts.bingham_weight;
    cfg.sparse = sparse;
    cfg.seed = opts.seed;
    cfg.trace_cost = opts.trace_cost;
    cfg.reference_channel = opts.reference_channel;
    result = run_ilrma(input, cfg);
  } else {
    MnmfConfig cfg;
    cfg.iterations = opts.iterations;
    cfg.bases = opts.bases;
    cfg.mu = opts.mu;
    cfg.rho = opts.rho;
    cfg.bingham_weight = opts.bingham_weight;
    cfg.sparse = sparse;
    cfg.seed = opts.seed;
    cfg.trace_cost = opts.trace_cost;
    cfg.reference_channel = opts.reference_channel;
    result = run_mnmf(input, cfg);
  }
  if (opts.normalize_input) scale_sources(result.sources, 1.0 / scale);
  return result;
}

}  // namespace sbss
