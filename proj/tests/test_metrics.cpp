// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sbss/errors.hpp"
#include "sbss/metrics.hpp"

using namespace sbss;

namespace {

std::vector<Signal> noise_sources(int n, std::size_t len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Signal> out(n, Signal(len));
  for (auto& s : out)
    for (auto& v : s) v = g(rng);
  return out;
}

Signal mix(const std::vector<Signal>& parts, const std::vector<double>& gains) {
  Signal out(parts.front().size(), 0.0);
  for (std::size_t n = 0; n < parts.size(); ++n)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += gains[n] * parts[n][i];
  return out;
}

}  // namespace

TEST_CASE("perfect estimates hit the cap") {
  const auto refs = noise_sources(2, 6000, 1);
  const auto r = sdr_sir(refs, refs);
  for (int j = 0; j < 2; ++j) {
    CHECK(r.sdr[j] == kMetricCap);
    CHECK(r.sir[j] == kMetricCap);
  }
}

TEST_CASE("an interferer scores strongly negative SIR") {
  // Two tones far apart in frequency: no delayed copy of one explains the other.
  std::vector<Signal> refs(2, Signal(16000));
  for (std::size_t i = 0; i < 16000; ++i) {
    refs[0][i] = std::sin(0.3 * i);
    refs[1][i] = std::sin(1.7 * i);
  }
  const auto s = score_matrix({refs[1]}, refs);
  CHECK(s.sir(0, 0) < -20.0);
  CHECK(s.sir(0, 1) > 20.0);
}

TEST_CASE("scaling an estimate leaves SDR unchanged") {
  const auto refs = noise_sources(2, 6000, 3);
  const auto noise = noise_sources(1, 6000, 30)[0];
  Signal est = mix({refs[0], refs[1], noise}, {1.0, 0.2, 0.1});
  Signal half = est;
  for (auto& v : half) v *= 0.5;
  const auto a = score_matrix({est}, refs);
  const auto b = score_matrix({half}, refs);
  CHECK(a.sdr(0, 0) == doctest::Approx(b.sdr(0, 0)).epsilon(1e-9));
  CHECK(a.sir(0, 0) == doctest::Approx(b.sir(0, 0)).epsilon(1e-9));
  // Interference of 0.2 amplitude: SIR near 14 dB, noise pulls SDR lower.
  CHECK(a.sir(0, 0) == doctest::Approx(20.0 * std::log10(5.0)).epsilon(0.02));
  CHECK(a.sdr(0, 0) < a.sir(0, 0));
}

TEST_CASE("permutation alignment") {
  const auto refs = noise_sources(3, 4000, 4);
  const std::vector<Signal> swapped{refs[1], refs[0]};
  const std::vector<Signal> two{refs[0], refs[1]};
  CHECK(permute_align(swapped, two) == std::vector<int>{1, 0});
  CHECK(permute_align(two, two) == std::vector<int>{0, 1});

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    Eigen::MatrixXd sir(n, n);
    for (int i = 0; i < sir.size(); ++i) sir.data()[i] = 20 * u(rng);
    std::vector<int> brute;
    oracle::best_assignment(sir, brute);
    CHECK(permute_align(ScoreMatrix{sir, sir}) == brute);
  }

  std::vector<Signal> ests;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> g(3, 0.0);
    g[j] = 1.0;
    for (int i = 0; i < 3; ++i) g[i] += 0.3 * u(rng);
    ests.push_back(mix(refs, g));
  }
  const auto scores = score_matrix(ests, refs);
  std::vector<int> brute;
  oracle::best_assignment(scores.sir, brute);
  CHECK(permute_align(scores) == brute);
}

TEST_CASE("scores do not depend on the estimate order") {
  const auto refs = noise_sources(2, 5000, 6);
  const std::vector<Signal> ests{mix(refs, {1.0, 0.3}), mix(refs, {0.2, 1.0})};
  const auto a = sdr_sir(ests, refs);
  const auto b = sdr_sir({ests[1], ests[0]}, refs);
  for (int j = 0; j < 2; ++j) {
    CHECK(a.sdr[j] == doctest::Approx(b.sdr[j]).epsilon(1e-10));
    CHECK(a.sir[j] == doctest::Approx(b.sir[j]).epsilon(1e-10));
  }
}

TEST_CASE("the mixture itself has zero improvement") {
  const auto refs = noise_sources(2, 5000, 7);
  const auto m = mix(refs, {1.0, 0.8});
  const auto r = sdr_sir({m, m}, refs, m);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(r.sdr_improvement[j]) < 1e-9);
    CHECK(std::abs(r.sir_improvement[j]) < 1e-9);
  }
  const auto good = sdr_sir({mix(refs, {1.0, 0.05}), mix(refs, {0.05, 1.0})}, refs, m);
  CHECK(good.mean_sir_improvement() > 10.0);
}

TEST_CASE("delayed references are matched by the projection filter") {
  const auto refs = noise_sources(2, 5000, 8);
  Signal delayed(5000, 0.0);
  for (std::size_t i = 40; i < 5000; ++i) delayed[i] = 0.7 * refs[0][i - 40];
  const auto s = score_matrix({delayed}, refs);
  // The last 40 reference samples fall off the end of the estimate; that
  // small mismatch is all the interference projection can pick up.
  CHECK(s.sir(0, 0) > 20.0);
  CHECK(s.sdr(0, 0) > 15.0);
}

TEST_CASE("metric contract errors") {
  const auto refs = noise_sources(2, 1000, 9);
  CHECK_THROWS_AS(sdr_sir({Signal(999, 0.0), refs[1]}, refs), ContractViolation);
  CHECK_THROWS_AS(sdr_sir({refs[0]}, refs), ContractViolation);
}
