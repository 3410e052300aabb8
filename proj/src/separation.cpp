// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/separation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "sbss/errors.hpp"

namespace sbss {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "ilrma") return Algorithm::kIlrma;
  if (name == "s-ilrma") return Algorithm::kSparseIlrma;
  if (name == "mnmf") return Algorithm::kMnmf;
  if (name == "s-mnmf") return Algorithm::kSparseMnmf;
  throw ConfigError("unknown algorithm '" + name + "' (expected ilrma, s-ilrma, mnmf, s-mnmf)");
}

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kIlrma: return "ilrma";
    case Algorithm::kSparseIlrma: return "s-ilrma";
    case Algorithm::kMnmf: return "mnmf";
    case Algorithm::kSparseMnmf: return "s-mnmf";
  }
  return "unknown";
}

void write_cost_trace(const std::string& path, const std::vector<double>& cost) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "iteration,cost\n";
  char buf[64];
  for (std::size_t i = 0; i < cost.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, cost[i]);
    out << buf;
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void scale_sources(std::vector<Spectrogram>& sources, double factor) {
  for (auto& s : sources)
    for (auto& v : s.data()) v *= factor;
}

double power_normalization(const Spectrogram& x) {
  double sum = 0.0;
  for (const auto& v : x.data()) sum += std::norm(v);
  if (!(sum > 0.0)) return 1.0;
  return std::sqrt(static_cast<double>(x.data().size()) / sum);
}

}  // namespace sbss
