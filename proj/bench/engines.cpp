// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// One sweep of the OpenMP engines against the serial reference paths, on
// a random 2-channel problem (F = 257, T = 128). The thread count is the
// benchmark argument.

#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "sbss/hermitian.hpp"
#include "sbss/ilrma.hpp"
#include "sbss/mnmf.hpp"
#include "sbss/reference.hpp"

namespace {

const sbss::Spectrogram& problem() {
  static const sbss::Spectrogram x = [] {
    sbss::Spectrogram s(512, 256, 128, 2);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (auto& v : s.data()) v = sbss::Complex(g(rng), g(rng));
    return s;
  }();
  return x;
}

void ThreadArgs(benchmark::internal::Benchmark* b) {
  const int max = omp_get_max_threads();
  for (int t = 1; t < max; t *= 2) b->Arg(t);
  b->Arg(max);
}

void BM_IlrmaEngine(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  sbss::IlrmaConfig cfg;
  cfg.mu = 0.0;
  cfg.bingham_weight = 0.0;
  sbss::IlrmaEngine engine(problem(), cfg);
  for (auto _ : state) engine.iterate();
}
BENCHMARK(BM_IlrmaEngine)->Apply(ThreadArgs)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_IlrmaSerialReference(benchmark::State& state) {
  sbss::reference::PlainIlrma plain(problem(), 10, 0);
  for (auto _ : state) plain.iterate();
}
BENCHMARK(BM_IlrmaSerialReference)->Unit(benchmark::kMillisecond);

void BM_MnmfEngine(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  sbss::MnmfConfig cfg;
  cfg.mu = 0.0;
  cfg.bingham_weight = 0.0;
  sbss::MnmfEngine engine(problem(), cfg);
  for (auto _ : state) engine.iterate();
}
BENCHMARK(BM_MnmfEngine)->Apply(ThreadArgs)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MnmfSerialReference(benchmark::State& state) {
  sbss::reference::PlainMnmf plain(problem(), 2, 10, 0);
  for (auto _ : state) plain.iterate();
}
BENCHMARK(BM_MnmfSerialReference)->Unit(benchmark::kMillisecond);

void BM_InvLogdetPsd(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const int m = static_cast<int>(state.range(0));
  sbss::CMatrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = sbss::Complex(g(rng), g(rng));
  const auto h = sbss::HermitianMatrix::hermitize(a * a.adjoint() + sbss::CMatrix::Identity(m, m));
  for (auto _ : state) benchmark::DoNotOptimize(sbss::inv_logdet_psd(h));
}
BENCHMARK(BM_InvLogdetPsd)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
