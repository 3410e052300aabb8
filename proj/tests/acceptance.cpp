// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. Pass a list of criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sbss/experiment.hpp"
#include "sbss/hermitian.hpp"
#include "sbss/ilrma.hpp"
#include "sbss/metrics.hpp"
#include "sbss/mnmf.hpp"
#include "sbss/reference.hpp"
#include "sbss/source_model.hpp"

using namespace sbss;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Largest relative cost increase over a run; <= slack means monotone.
template <class Engine>
double worst_increase(Engine& engine, int iterations) {
  double prev = engine.cost(), worst = -1.0;
  for (int i = 0; i < iterations; ++i) {
    engine.iterate();
    const double c = engine.cost();
    worst = std::max(worst, (c - prev) / std::abs(prev));
    prev = c;
  }
  return worst;
}

Verdict monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kProblems = 20, kIters = 50;
  constexpr double kSlack = 1e-6;
  const char* names[] = {"ilrma", "s-ilrma/cubic", "s-ilrma/closed-form", "mnmf", "s-mnmf"};
  int fails[5] = {0, 0, 0, 0, 0};
  double worst[5] = {-1, -1, -1, -1, -1};
  for (int p = 0; p < kProblems; ++p) {
    const auto x = oracle::random_spectrogram(129, 64, 2, 1000 + p);
    for (int v = 0; v < 5; ++v) {
      double w;
      if (v < 3) {
        IlrmaConfig cfg;
        cfg.seed = p;
        cfg.sparse = v > 0;
        cfg.basis_rule = v == 2 ? BasisRule::kClosedForm : BasisRule::kCubic;
        IlrmaEngine e(x, cfg);
        w = worst_increase(e, kIters);
      } else {
        MnmfConfig cfg;
        cfg.seed = p;
        cfg.sparse = v == 4;
        MnmfEngine e(x, cfg);
        w = worst_increase(e, kIters);
      }
      worst[v] = std::max(worst[v], w);
      if (w > kSlack) ++fails[v];
    }
  }
  std::string detail;
  for (int v = 0; v < 5; ++v) detail += format("%s %d/20 worst %.1e; ", names[v], kProblems - fails[v], worst[v]);
  const double secs = seconds_since(t0);
  // The closed-form rule is reported; the cubic rule is the default and must pass.
  const bool pass = fails[0] == 0 && fails[1] == 0 && fails[3] == 0 && fails[4] == 0 && secs < 120.0;
  return {pass, detail + format("default rule cubic; %.0f s", secs)};
}

Verdict regularizer_off() {
  const auto x = oracle::random_spectrogram(129, 64, 2, 77);
  double ilrma_diff = 0.0, mnmf_diff = 0.0;
  {
    IlrmaConfig cfg;
    cfg.mu = 0.0;
    cfg.bingham_weight = 0.0;
    cfg.seed = 7;
    IlrmaEngine e(x, cfg);
    reference::PlainIlrma plain(x, cfg.bases, cfg.seed);
    for (int i = 0; i < 10; ++i) {
      e.iterate();
      plain.iterate();
      for (int n = 0; n < 2; ++n) {
        ilrma_diff = std::max(ilrma_diff, oracle::max_rel_diff(e.state().factors.W[n], plain.bases()[n]));
        ilrma_diff = std::max(ilrma_diff, oracle::max_rel_diff(e.state().factors.H[n], plain.activations()[n]));
      }
      for (int f = 0; f < x.bins(); ++f) {
        ilrma_diff = std::max(ilrma_diff, (Eigen::MatrixXcd(e.state().demixing[f]) - plain.demixing()[f])
                                              .cwiseAbs()
                                              .maxCoeff());
      }
    }
  }
  {
    MnmfConfig cfg;
    cfg.mu = 0.0;
    cfg.bingham_weight = 0.0;
    cfg.seed = 7;
    MnmfEngine e(x, cfg);
    reference::PlainMnmf plain(x, 2, cfg.bases, cfg.seed);
    for (int i = 0; i < 10; ++i) {
      e.iterate();
      plain.iterate();
      for (int n = 0; n < 2; ++n) {
        mnmf_diff = std::max(mnmf_diff, oracle::max_rel_diff(e.state().factors.W[n], plain.bases()[n]));
        mnmf_diff = std::max(mnmf_diff, oracle::max_rel_diff(e.state().factors.H[n], plain.activations()[n]));
      }
      for (int f = 0; f < x.bins(); ++f)
        for (int n = 0; n < 2; ++n)
          mnmf_diff = std::max(mnmf_diff, (oracle::dense(e.state().scms[f][n]) - plain.scms()[f][n])
                                              .cwiseAbs()
                                              .maxCoeff());
    }
  }
  return {ilrma_diff < 1e-10 && mnmf_diff < 1e-8,
          format("max elementwise difference over 10 iterations: s-ilrma %.2e (tol 1e-10), s-mnmf %.2e (tol 1e-8)",
                 ilrma_diff, mnmf_diff)};
}

Verdict tightness() {
  double worst_abs = 0.0, worst_rel = 0.0;
  for (int p = 0; p < 3; ++p) {
    const auto x = oracle::random_spectrogram(33, 32, 2, 300 + p);
    MnmfConfig cfg;
    cfg.seed = p;
    MnmfEngine e(x, cfg);
    for (int i = 0; i < 2 * p; ++i) e.iterate();
    const auto& s = e.state();
    std::vector<Eigen::MatrixXd> lam;
    for (int n = 0; n < 2; ++n) lam.push_back(lambda(s.factors, n));
    const double bound = mnmf::auxiliary_bound(
        x, s, [&](int f, int t, int n) { return mnmf::tight_phi(s, f, t, n); },
        [&](int f, int t) { return mnmf::model_covariance(s.scms[f], lam, f, t); });
    const double cost = mnmf::cost(x, s);
    worst_abs = std::max(worst_abs, std::abs(bound - cost));
    worst_rel = std::max(worst_rel, std::abs(bound - cost) / std::abs(cost));
  }
  return {worst_abs < 1e-8, format("|bound - cost| max %.2e absolute, %.2e relative (tol 1e-8)", worst_abs, worst_rel)};
}

Verdict riccati() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int m = 2 + i % 3;
    const Eigen::MatrixXcd a = oracle::random_hpd(m, rng, 1e-3);
    const Eigen::MatrixXcd b = oracle::random_hpd(m, rng, 1e-3);
    const Eigen::MatrixXcd r = oracle::dense(riccati_solve(oracle::to_hermitian(a), oracle::to_hermitian(b)));
    worst = std::max(worst, (r * a * r - b).norm() / b.norm());
  }
  return {worst < 1e-8, format("1000 pairs, M in {2,3,4}: max ||RAR - B|| / ||B|| = %.2e (tol 1e-8)", worst)};
}

// One desk-scale trial: improvements and the mean activation sparsity.
struct TrialScore {
  double sdr, sir, sparsity;
};

TrialScore run_trial(const ExperimentSpec& spec, const Mixture& mix, Algorithm algo, std::uint64_t seed,
                     double mu) {
  const Spectrogram x = stft(mix.mixture, spec.fft, spec.hop);
  SeparationOptions opts = spec.separation;
  opts.seed = seed;
  opts.mu = mu;
  const auto result = separate(x, algo, opts);
  std::vector<Signal> est, ref;
  for (const auto& s : result.sources) est.push_back(istft(s).channels[0]);
  for (const auto& img : mix.images) ref.push_back(img.channels[0]);
  const auto m = sdr_sir(est, ref, mix.mixture.channels[0]);
  double sp = 0.0;
  for (const auto& h : result.factors.H) sp += sparsity_fraction(h) / result.factors.H.size();
  return {m.mean_sdr_improvement(), m.mean_sir_improvement(), sp};
}

ExperimentSpec desk_spec() {
  ExperimentSpec spec;
  spec.seed = 1;
  spec.separation.trace_cost = false;
  return spec;
}

constexpr int kAnechoicTrials = 10;

// Shared by criteria 5 and 6.
struct AnechoicSuite {
  std::vector<TrialScore> ilrma, s_ilrma, s_ilrma_mu0;
  double seconds = 0.0;
};

const AnechoicSuite& anechoic_suite() {
  static const AnechoicSuite suite = [] {
    AnechoicSuite out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = desk_spec();
    for (int t = 0; t < kAnechoicTrials; ++t) {
      const auto mix = trial_mixture(spec, 0.0, t);
      const auto seed = trial_seed(spec.seed, t);
      out.ilrma.push_back(run_trial(spec, mix, Algorithm::kIlrma, seed, 0.05));
      out.s_ilrma.push_back(run_trial(spec, mix, Algorithm::kSparseIlrma, seed, 0.05));
    }
    out.seconds = seconds_since(t0);
    for (int t = 0; t < kAnechoicTrials; ++t) {
      const auto mix = trial_mixture(spec, 0.0, t);
      out.s_ilrma_mu0.push_back(run_trial(spec, mix, Algorithm::kSparseIlrma, trial_seed(spec.seed, t), 0.0));
    }
    return out;
  }();
  return suite;
}

double mean(const std::vector<TrialScore>& v, double TrialScore::*field) {
  double s = 0.0;
  for (const auto& x : v) s += x.*field;
  return s / v.size();
}

Verdict oracle_separation() {
  const auto& s = anechoic_suite();
  const double a = mean(s.ilrma, &TrialScore::sir), b = mean(s.s_ilrma, &TrialScore::sir);
  return {a >= 15.0 && b >= 15.0 && s.seconds < 300.0,
          format("anechoic, %d trials, 100 iterations: mean SIRi ilrma %.2f dB, s-ilrma %.2f dB (>= 15); %.0f s",
                 kAnechoicTrials, a, b, s.seconds)};
}

Verdict sparsity_effect() {
  const auto& s = anechoic_suite();
  const double sp0 = mean(s.s_ilrma_mu0, &TrialScore::sparsity), sp1 = mean(s.s_ilrma, &TrialScore::sparsity);
  const double sd0 = mean(s.s_ilrma_mu0, &TrialScore::sdr), sd1 = mean(s.s_ilrma, &TrialScore::sdr);
  int larger = 0, equal = 0;
  for (int t = 0; t < kAnechoicTrials; ++t) {
    if (s.s_ilrma[t].sparsity > s.s_ilrma_mu0[t].sparsity) ++larger;
    if (s.s_ilrma[t].sparsity == s.s_ilrma_mu0[t].sparsity) ++equal;
  }
  return {sp1 > sp0 && sd1 - sd0 >= -0.2,
          format("mean sparsity mu=0 %.5f, mu=0.05 %.5f (larger on %d/%d seeds, equal on %d); "
                 "mean SDRi %.3f -> %.3f dB (delta %.3f, >= -0.2)",
                 sp0, sp1, larger, kAnechoicTrials, equal, sd0, sd1, sd1 - sd0)};
}

Verdict reverberant_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kTrials = 10;
  const auto spec = desk_spec();
  double s_ilrma[2] = {0, 0}, mnmf = 0.0, s_mnmf = 0.0;
  const double t60s[2] = {0.15, 0.3};
  for (int c = 0; c < 2; ++c) {
    for (int t = 0; t < kTrials; ++t) {
      const auto mix = trial_mixture(spec, t60s[c], t);
      const auto seed = trial_seed(spec.seed, t);
      s_ilrma[c] += run_trial(spec, mix, Algorithm::kSparseIlrma, seed, 0.05).sdr / kTrials;
      if (c == 0) {
        mnmf += run_trial(spec, mix, Algorithm::kMnmf, seed, 0.05).sdr / kTrials;
        s_mnmf += run_trial(spec, mix, Algorithm::kSparseMnmf, seed, 0.05).sdr / kTrials;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {s_ilrma[0] > 0.0 && s_ilrma[1] > 0.0 && s_mnmf >= mnmf - 0.3 && secs < 1200.0,
          format("10 trials: s-ilrma SDRi %.2f dB @150 ms, %.2f dB @300 ms (> 0); "
                 "@150 ms s-mnmf %.2f vs mnmf %.2f dB (>= -0.3); %.0f s",
                 s_ilrma[0], s_ilrma[1], s_mnmf, mnmf, secs)};
}

Verdict infrastructure() {
  std::vector<std::string> failed;
  std::string detail;

  // STFT round trip at both supported overlaps.
  {
    Waveform w(16000, 2, 30000);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 0.3);
    for (auto& c : w.channels)
      for (auto& v : c) v = g(rng);
    double worst = 0.0;
    for (int hop : {2048, 1024}) {
      const auto back = istft(stft(w, 4096, hop));
      for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < w.length(); ++i)
          worst = std::max(worst, std::abs(back.channels[c][i] - w.channels[c][i]));
    }
    if (!(worst < 1e-10)) failed.push_back("stft");
    detail += format("stft %.1e; ", worst);
  }
  // Wiener masks sum to the identity.
  {
    const auto x = oracle::random_spectrogram(65, 40, 3, 2);
    MnmfConfig cfg;
    cfg.iterations = 3;
    cfg.sources = 3;
    MnmfEngine e(x, cfg);
    for (int i = 0; i < 3; ++i) e.iterate();
    double worst = 0.0;
    for (int ref = 0; ref < 3; ++ref) {
      const auto parts = mnmf::extract_sources_wiener(x, e.lambda(), e.state().scms, ref);
      for (int f = 0; f < x.bins(); ++f)
        for (int t = 0; t < x.frames(); ++t) {
          Complex sum = 0.0;
          for (const auto& p : parts) sum += p.at(f, t, 0);
          worst = std::max(worst, std::abs(sum - x.at(f, t, ref)) / std::max(1.0, std::abs(x.at(f, t, ref))));
        }
    }
    if (!(worst < 1e-8)) failed.push_back("wiener");
    detail += format("wiener %.1e; ", worst);
  }
  // d^H V d = 1 after every demixing sweep.
  {
    const auto x = oracle::random_spectrogram(65, 40, 2, 3);
    IlrmaConfig cfg;
    cfg.normalization = ScaleNormalization::kNever;
    IlrmaEngine e(x, cfg);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      e.iterate();
      const auto& s = e.state();
      for (int f = 0; f < x.bins(); ++f)
        for (int n = 0; n < 2; ++n) {
          const auto v = ilrma::weighted_covariance(x, f, s.lambda[n].row(f));
          const Eigen::VectorXcd d = Eigen::MatrixXcd(s.demixing[f]).row(n).adjoint();
          worst = std::max(worst, std::abs((d.adjoint() * oracle::dense(v) * d)(0, 0).real() - 1.0));
        }
    }
    if (!(worst < 1e-8)) failed.push_back("demixing");
    detail += format("d^H V d %.1e; ", worst);
  }
  // Identical signals hit the cap.
  {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    std::vector<Signal> refs(2, Signal(8000));
    for (auto& r : refs)
      for (auto& v : r) v = g(rng);
    const auto m = sdr_sir(refs, refs);
    const bool cap = m.sdr[0] == kMetricCap && m.sir[1] == kMetricCap;
    if (!cap) failed.push_back("cap");
    detail += format("identical %.1f dB; ", m.sdr[0]);
  }
  // Alignment against exhaustive search.
  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    int agree = 0, total = 0;
    for (int n = 1; n <= 3; ++n) {
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd sir(n, n);
        for (int i = 0; i < sir.size(); ++i) sir.data()[i] = u(rng);
        std::vector<int> brute;
        oracle::best_assignment(sir, brute);
        agree += permute_align(ScoreMatrix{sir, sir}) == brute;
        ++total;
      }
    }
    if (agree != total) failed.push_back("permutation");
    detail += format("permutation %d/%d", agree, total);
  }
  return {failed.empty(), detail};
}

Verdict rho_inertness() {
  const auto x = oracle::random_spectrogram(129, 64, 2, 9);
  double worst_cost = 0.0;
  bool identical = true;
  const double shift = 10.0 * 10 * 2;  // rho * K * N
  {
    IlrmaConfig a, b;
    a.rho = 0.0;
    b.rho = 10.0;
    a.seed = b.seed = 3;
    IlrmaEngine ea(x, a), eb(x, b);
    for (int i = 0; i <= 10; ++i) {
      if (i > 0) ea.iterate(), eb.iterate();
      worst_cost = std::max(worst_cost, std::abs((eb.cost() - ea.cost()) + shift));
      for (int n = 0; n < 2; ++n)
        identical = identical && ea.state().factors.W[n] == eb.state().factors.W[n] &&
                    ea.state().factors.H[n] == eb.state().factors.H[n];
      for (int f = 0; f < x.bins(); ++f) identical = identical && ea.state().demixing[f] == eb.state().demixing[f];
    }
  }
  {
    MnmfConfig a, b;
    a.rho = 0.0;
    b.rho = 10.0;
    a.seed = b.seed = 3;
    MnmfEngine ea(x, a), eb(x, b);
    for (int i = 0; i <= 5; ++i) {
      if (i > 0) ea.iterate(), eb.iterate();
      worst_cost = std::max(worst_cost, std::abs((eb.cost() - ea.cost()) + shift));
      for (int n = 0; n < 2; ++n)
        identical = identical && ea.state().factors.W[n] == eb.state().factors.W[n] &&
                    ea.state().factors.H[n] == eb.state().factors.H[n];
      for (int f = 0; f < x.bins(); ++f)
        for (int n = 0; n < 2; ++n)
          identical = identical && ea.state().scms[f][n].matrix() == eb.state().scms[f][n].matrix();
    }
  }
  return {identical && worst_cost < 1e-10,
          format("cost shift error max %.2e (tol 1e-10); iterates %s", worst_cost,
                 identical ? "bit-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"MM monotonicity", monotonicity},
      {"regularizer-off equivalence", regularizer_off},
      {"auxiliary tightness", tightness},
      {"Riccati residual", riccati},
      {"oracle separation", oracle_separation},
      {"sparsity effect", sparsity_effect},
      {"reverberant trend", reverberant_trend},
      {"infrastructure", infrastructure},
      {"rho inertness", rho_inertness},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %d %-28s %s  %s\n", id, criteria[i].first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
