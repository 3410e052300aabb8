// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

#include <json.hpp>

#include "sbss/errors.hpp"
#include "sbss/kv_config.hpp"
#include "sbss/synth.hpp"

namespace sbss {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool parse_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(what + ": expected true or false, got '" + v + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

ExperimentSpec ExperimentSpec::read(const std::string& path) {
  const KvConfig cfg = KvConfig::read(path);
  cfg.check_keys({"room", "t60_list", "algos", "seeds", "trials", "sources", "sample_rate", "fft",
                  "hop", "frames", "source_bases", "bases", "iters", "mu", "rho", "bingham_weight",
                  "normalize_input"});
  ExperimentSpec spec;
  if (cfg.has("room")) {
    const auto d = cfg.numbers("room");
    if (d.size() != 3) throw ConfigError(path + ": room needs three dimensions");
    spec.room = {d[0], d[1], d[2]};
  }
  spec.t60_list = cfg.has("t60_list") ? cfg.numbers("t60_list") : std::vector<double>{};
  if (cfg.has("algos")) {
    for (const auto& a : cfg.strings("algos")) spec.algos.push_back(parse_algorithm(a));
  }
  spec.seed = static_cast<std::uint64_t>(cfg.integer("seeds", 0));
  spec.trials = static_cast<int>(cfg.integer("trials", 1));
  spec.sources = static_cast<int>(cfg.integer("sources", 2));
  spec.sample_rate = static_cast<int>(cfg.integer("sample_rate", 16000));
  spec.fft = static_cast<int>(cfg.integer("fft", 1024));
  spec.hop = static_cast<int>(cfg.integer("hop", 512));
  spec.frames = static_cast<int>(cfg.integer("frames", 128));
  spec.source_bases = static_cast<int>(cfg.integer("source_bases", 4));
  spec.separation.bases = static_cast<int>(cfg.integer("bases", 10));
  spec.separation.iterations = static_cast<int>(cfg.integer("iters", 100));
  spec.separation.mu = cfg.number("mu", 0.05);
  spec.separation.rho = cfg.number("rho", 10.0);
  spec.separation.bingham_weight = cfg.number("bingham_weight", 1.0);
  spec.separation.normalize_input =
      parse_bool(cfg.string("normalize_input", "false"), path + ": normalize_input");
  spec.separation.trace_cost = false;
  try {
    spec.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return spec;
}

void ExperimentSpec::validate() const {
  for (double d : room) {
    if (!(d > 0.0)) throw ContractViolation("room dimensions must be positive");
  }
  for (double t : t60_list) {
    if (!(t >= 0.0)) throw ContractViolation("t60 values must be >= 0");
  }
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  if (sources < 2 || sources > kMaxDim) throw ContractViolation("sources must be in [2, 8]");
  if (sample_rate <= 0) throw ContractViolation("sample_rate must be positive");
  if (fft < 4 || fft % 2 != 0) throw ContractViolation("fft must be even and >= 4");
  if (hop < 1 || hop > fft / 2 || fft % hop != 0) {
    throw ContractViolation("hop must divide fft and be at most fft / 2");
  }
  if (frames < 2) throw ContractViolation("frames must be >= 2");
  if (source_bases < 1) throw ContractViolation("source_bases must be >= 1");
  if (separation.bases < 1) throw ContractViolation("bases must be >= 1");
  if (separation.iterations < 1) throw ContractViolation("iters must be >= 1");
  if (!(separation.mu >= 0.0)) throw ContractViolation("mu must be >= 0");
  if (!(separation.rho >= 0.0)) throw ContractViolation("rho must be >= 0");
  if (!(separation.bingham_weight >= 0.0)) throw ContractViolation("bingham_weight must be >= 0");
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return splitmix(splitmix(seed) + static_cast<std::uint64_t>(trial));
}

Mixture trial_mixture(const ExperimentSpec& spec, double t60, int trial) {
  const std::uint64_t s = trial_seed(spec.seed, trial);
  const SyntheticSources src =
      synth_nmf_sources(spec.fft / 2 + 1, spec.frames, spec.source_bases, spec.sources, s,
                        spec.sample_rate);
  RoomSpec room = default_room(t60, spec.sources, spec.sources, splitmix(s));
  room.dimensions = spec.room;
  room.sample_rate = spec.sample_rate;
  return convolve_mix(src.signals, room_rirs(room), 0);
}

MetricsReport evaluate_separation(const Mixture& mix, Algorithm algo, const ExperimentSpec& spec,
                                  std::uint64_t seed) {
  const Spectrogram x = stft(mix.mixture, spec.fft, spec.hop);
  SeparationOptions opts = spec.separation;
  opts.seed = seed;
  opts.reference_channel = 0;
  const SeparationResult result = separate(x, algo, opts);
  std::vector<Signal> estimates, references;
  for (const auto& s : result.sources) estimates.push_back(istft(s).channels[0]);
  for (const auto& img : mix.images) references.push_back(img.channels[0]);
  return sdr_sir(estimates, references, mix.mixture.channels[0]);
}

ExperimentReport run_experiment(const ExperimentSpec& spec, int jobs) {
  spec.validate();
  if (jobs < 1) throw ContractViolation("jobs must be >= 1");
  const int nt = static_cast<int>(spec.t60_list.size());
  const int na = static_cast<int>(spec.algos.size());
  ExperimentReport report;
  if (nt == 0 || na == 0) return report;

  const int tasks = nt * spec.trials;
  std::vector<std::vector<TrialResult>> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
  for (int task = 0; task < tasks; ++task) {
    const int ti = task / spec.trials;
    const int trial = task % spec.trials;
    try {
      const double t60 = spec.t60_list[ti];
      const Mixture mix = trial_mixture(spec, t60, trial);
      for (const Algorithm algo : spec.algos) {
        const MetricsReport m = evaluate_separation(mix, algo, spec, trial_seed(spec.seed, trial));
        results[task].push_back(
            {algo, t60, trial, m.mean_sdr_improvement(), m.mean_sir_improvement()});
      }
    } catch (...) {
      errors[task] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (int ti = 0; ti < nt; ++ti)
    for (int a = 0; a < na; ++a)
      for (int trial = 0; trial < spec.trials; ++trial)
        report.rows.push_back(results[ti * spec.trials + trial][a]);
  return report;
}

std::vector<ConditionSummary> ExperimentReport::summary() const {
  std::vector<ConditionSummary> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ConditionSummary& c) {
      return c.algo == r.algo && c.t60 == r.t60;
    });
    if (it == out.end()) {
      out.push_back({r.algo, r.t60, 0, 0.0, 0.0, 0.0, 0.0});
      it = out.end() - 1;
    }
    ++it->count;
    it->sdr_mean += r.sdr_improvement;
    it->sir_mean += r.sir_improvement;
  }
  for (auto& c : out) {
    c.sdr_mean /= c.count;
    c.sir_mean /= c.count;
  }
  for (const auto& r : rows) {
    for (auto& c : out) {
      if (c.algo == r.algo && c.t60 == r.t60) {
        c.sdr_std += (r.sdr_improvement - c.sdr_mean) * (r.sdr_improvement - c.sdr_mean);
        c.sir_std += (r.sir_improvement - c.sir_mean) * (r.sir_improvement - c.sir_mean);
      }
    }
  }
  for (auto& c : out) {
    c.sdr_std = std::sqrt(c.sdr_std / c.count);
    c.sir_std = std::sqrt(c.sir_std / c.count);
  }
  return out;
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "algo,t60,trial,sdr_impr,sir_impr\n";
  for (const auto& r : report.rows) {
    out << to_string(r.algo) << ',' << format_double(r.t60) << ',' << r.trial << ','
        << format_double(r.sdr_improvement) << ',' << format_double(r.sir_improvement) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_summary_json(const std::string& path, const ExperimentSpec& spec,
                        const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["room"] = spec.room;
  j["t60_list"] = spec.t60_list;
  std::vector<std::string> algos;
  for (auto a : spec.algos) algos.push_back(to_string(a));
  j["algos"] = algos;
  j["seed"] = spec.seed;
  j["trials"] = spec.trials;
  j["sources"] = spec.sources;
  j["fft"] = spec.fft;
  j["hop"] = spec.hop;
  j["iters"] = spec.separation.iterations;
  j["bases"] = spec.separation.bases;
  j["mu"] = spec.separation.mu;
  j["rho"] = spec.separation.rho;
  j["conditions"] = nlohmann::ordered_json::array();
  for (const auto& c : report.summary()) {
    nlohmann::ordered_json row;
    row["algo"] = to_string(c.algo);
    row["t60"] = c.t60;
    row["trials"] = c.count;
    row["sdr_impr_mean"] = c.sdr_mean;
    row["sdr_impr_std"] = c.sdr_std;
    row["sir_impr_mean"] = c.sir_mean;
    row["sir_impr_std"] = c.sir_std;
    j["conditions"].push_back(row);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace sbss
