// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// sbss: separate, simulate, evaluate, experiment.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
// divergence, 1 anything else.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sbss/errors.hpp"
#include "sbss/experiment.hpp"
#include "sbss/ilrma.hpp"
#include "sbss/metrics.hpp"
#include "sbss/mnmf.hpp"
#include "sbss/room.hpp"
#include "sbss/separation.hpp"
#include "sbss/signal.hpp"
#include "sbss/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitDiverged = 3;

struct SeparateArgs {
  std::string input;
  std::string output = "source";
  std::string algo = "s-ilrma";
  int fft = 4096;
  int hop = 2048;
  int bases = 10;
  int iters = 100;
  double mu = 0.05;
  double rho = 10.0;
  double bingham = 1.0;
  std::string rule = "cubic";
  std::uint64_t seed = 0;
  int reference = 0;
  std::string trace;
  bool pcm16 = false;
};

struct SimulateArgs {
  std::string room;
  std::vector<std::string> sources;
  std::string output = "sim";
  int frames = 128;
  int fft = 1024;
  int bases = 4;
  std::uint64_t seed = 0;
};

struct EvaluateArgs {
  std::vector<std::string> estimates;
  std::vector<std::string> references;
  std::string mixture;
  std::string csv;
  std::string json;
};

struct ExperimentArgs {
  std::string spec;
  std::string csv = "experiment.csv";
  std::string json = "experiment.json";
  int jobs = 1;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw sbss::ConfigError(message);
}

void check_stft(int fft, int hop) {
  require(fft >= 4 && fft % 2 == 0, "--fft must be an even number >= 4");
  require(hop >= 1 && hop <= fft / 2 && fft % hop == 0,
          "--hop must divide --fft and be at most fft / 2");
}

std::string numbered(const std::string& prefix, int n) {
  return prefix + "_" + std::to_string(n) + ".wav";
}

int cmd_separate(const SeparateArgs& a) {
  const sbss::Algorithm algo = sbss::parse_algorithm(a.algo);
  check_stft(a.fft, a.hop);
  require(a.bases >= 1, "--bases must be >= 1");
  require(a.iters >= 1, "--iters must be >= 1");
  require(a.mu >= 0.0, "--mu must be >= 0");
  require(a.rho >= 0.0, "--rho must be >= 0");
  require(a.bingham >= 0.0, "--bingham must be >= 0");
  require(a.rule == "cubic" || a.rule == "closed-form", "--rule must be cubic or closed-form");

  const sbss::Waveform wav = sbss::read_wav(a.input);
  require(wav.num_channels() >= 2, a.input + ": need at least 2 channels, got " +
                                       std::to_string(wav.num_channels()));
  require(a.reference >= 0 && a.reference < wav.num_channels(), "--ref out of range");
  spdlog::info("{}: {} channels, {} samples at {} Hz", a.input, wav.num_channels(), wav.length(),
               wav.sample_rate);

  const sbss::Spectrogram x = sbss::stft(wav, a.fft, a.hop);
  sbss::SeparationResult result;
  if (algo == sbss::Algorithm::kIlrma || algo == sbss::Algorithm::kSparseIlrma) {
    sbss::IlrmaConfig cfg;
    cfg.iterations = a.iters;
    cfg.bases = a.bases;
    cfg.mu = a.mu;
    cfg.rho = a.rho;
    cfg.bingham_weight = a.bingham;
    cfg.sparse = algo == sbss::Algorithm::kSparseIlrma;
    cfg.basis_rule = a.rule == "cubic" ? sbss::BasisRule::kCubic : sbss::BasisRule::kClosedForm;
    cfg.seed = a.seed;
    cfg.reference_channel = a.reference;
    result = sbss::run_ilrma(x, cfg);
  } else {
    sbss::MnmfConfig cfg;
    cfg.iterations = a.iters;
    cfg.bases = a.bases;
    cfg.mu = a.mu;
    cfg.rho = a.rho;
    cfg.bingham_weight = a.bingham;
    cfg.sparse = algo == sbss::Algorithm::kSparseMnmf;
    cfg.seed = a.seed;
    cfg.reference_channel = a.reference;
    result = sbss::run_mnmf(x, cfg);
  }
  spdlog::info("{} iterations, final cost {:.10g}", result.cost.size(),
               result.cost.empty() ? 0.0 : result.cost.back());

  const auto format = a.pcm16 ? sbss::WavFormat::kPcm16 : sbss::WavFormat::kFloat32;
  for (std::size_t n = 0; n < result.sources.size(); ++n) {
    const std::string path = numbered(a.output, static_cast<int>(n) + 1);
    sbss::write_wav(path, sbss::istft(result.sources[n]), format);
    std::printf("%s\n", path.c_str());
  }
  if (!a.trace.empty()) sbss::write_cost_trace(a.trace, result.cost);
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a) {
  const sbss::RoomSpec room = sbss::read_room_spec(a.room);
  const int n = static_cast<int>(room.sources.size());
  sbss::Waveform sources;
  if (a.sources.empty()) {
    require(a.frames >= 2, "--frames must be >= 2");
    require(a.fft >= 4 && a.fft % 2 == 0, "--fft must be an even number >= 4");
    require(a.bases >= 1, "--bases must be >= 1");
    sources = sbss::synth_nmf_sources(a.fft / 2 + 1, a.frames, a.bases, n, a.seed,
                                      room.sample_rate).signals;
  } else {
    require(static_cast<int>(a.sources.size()) == n,
            "room has " + std::to_string(n) + " sources but " + std::to_string(a.sources.size()) +
                " source files were given");
    std::size_t len = 0;
    std::vector<std::vector<double>> chans;
    for (const auto& path : a.sources) {
      const sbss::Waveform w = sbss::read_wav(path);
      require(w.sample_rate == room.sample_rate,
              path + ": sample rate " + std::to_string(w.sample_rate) + " differs from the room's " +
                  std::to_string(room.sample_rate));
      chans.push_back(w.channels.front());
      len = std::max(len, w.length());
    }
    sources = sbss::Waveform(room.sample_rate, n, len);
    for (int i = 0; i < n; ++i) std::copy(chans[i].begin(), chans[i].end(), sources.channels[i].begin());
  }
  const sbss::Mixture mix = sbss::convolve_mix(sources, sbss::room_rirs(room), 0);
  const std::string mix_path = a.output + "_mix.wav";
  sbss::write_wav(mix_path, mix.mixture);
  std::printf("%s\n", mix_path.c_str());
  for (int i = 0; i < n; ++i) {
    const std::string path = a.output + "_ref_" + std::to_string(i + 1) + ".wav";
    sbss::write_wav(path, mix.images[i]);
    std::printf("%s\n", path.c_str());
  }
  spdlog::info("alpha {:.4f}, max order {}, rir length {}", sbss::sabine_alpha(room),
               sbss::effective_max_order(room), sbss::effective_rir_length(room));
  return kExitOk;
}

std::vector<double> mono(const std::string& path, int channel = 0) {
  const sbss::Waveform w = sbss::read_wav(path);
  require(channel < w.num_channels(), path + ": no channel " + std::to_string(channel));
  return w.channels[channel];
}

int cmd_evaluate(const EvaluateArgs& a) {
  require(a.estimates.size() == a.references.size(),
          "need as many --estimates as --references");
  std::vector<sbss::Signal> est, ref;
  for (const auto& p : a.estimates) est.push_back(mono(p));
  for (const auto& p : a.references) ref.push_back(mono(p));
  const sbss::Signal mixture = a.mixture.empty() ? sbss::Signal{} : mono(a.mixture);
  for (std::size_t i = 0; i < est.size(); ++i) {
    require(est[i].size() == ref.front().size(),
            a.estimates[i] + ": length " + std::to_string(est[i].size()) +
                " differs from reference length " + std::to_string(ref.front().size()));
  }
  for (std::size_t i = 0; i < ref.size(); ++i) {
    require(ref[i].size() == ref.front().size(), a.references[i] + ": reference lengths differ");
  }
  require(mixture.empty() || mixture.size() == ref.front().size(),
          a.mixture + ": length differs from the references");
  const sbss::MetricsReport r = sbss::sdr_sir(est, ref, mixture);

  std::printf("%-10s %-10s %9s %9s %9s %9s\n", "reference", "estimate", "SDR", "SIR", "SDRi", "SIRi");
  for (std::size_t j = 0; j < ref.size(); ++j) {
    std::printf("%-10zu %-10d %9.3f %9.3f %9.3f %9.3f\n", j + 1, r.permutation[j] + 1, r.sdr[j],
                r.sir[j], r.sdr_improvement[j], r.sir_improvement[j]);
  }
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    require(static_cast<bool>(out), "cannot open '" + a.csv + "' for writing");
    out << "reference,estimate,sdr,sir,sdr_impr,sir_impr\n";
    char buf[160];
    for (std::size_t j = 0; j < ref.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%zu,%d,%.10g,%.10g,%.10g,%.10g\n", j + 1, r.permutation[j] + 1,
                    r.sdr[j], r.sir[j], r.sdr_improvement[j], r.sir_improvement[j]);
      out << buf;
    }
  }
  if (!a.json.empty()) {
    nlohmann::ordered_json j;
    j["permutation"] = r.permutation;
    j["sdr"] = r.sdr;
    j["sir"] = r.sir;
    j["sdr_improvement"] = r.sdr_improvement;
    j["sir_improvement"] = r.sir_improvement;
    std::ofstream out(a.json);
    require(static_cast<bool>(out), "cannot open '" + a.json + "' for writing");
    out << j.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& a) {
  require(a.jobs >= 1, "--jobs must be >= 1");
  const sbss::ExperimentSpec spec = sbss::ExperimentSpec::read(a.spec);
  spdlog::info("{} T60 values x {} algorithms x {} trials", spec.t60_list.size(), spec.algos.size(),
               spec.trials);
  const sbss::ExperimentReport report = sbss::run_experiment(spec, a.jobs);
  sbss::write_report_csv(a.csv, report);
  sbss::write_summary_json(a.json, spec, report);
  std::printf("%-8s %6s %6s %10s %8s %10s %8s\n", "algo", "t60", "trials", "SDRi", "sd", "SIRi", "sd");
  for (const auto& c : report.summary()) {
    std::printf("%-8s %6.3f %6d %10.3f %8.3f %10.3f %8.3f\n", sbss::to_string(c.algo).c_str(), c.t60,
                c.count, c.sdr_mean, c.sdr_std, c.sir_mean, c.sir_std);
  }
  return kExitOk;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("sbss");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("BSS_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Multichannel blind source separation: ILRMA, MNMF and their sparse variants"};
  app.require_subcommand(1);
  app.footer("Set BSS_LOG to trace, debug, info, warn, error or off for logging on stderr.");

  SeparateArgs sep;
  auto* separate = app.add_subcommand("separate", "Separate a multichannel WAV file");
  separate->add_option("input", sep.input, "Mixture WAV, at least 2 channels")->required();
  separate->add_option("-o,--output", sep.output, "Output prefix; writes PREFIX_<n>.wav")
      ->capture_default_str();
  separate->add_option("--algo", sep.algo, "ilrma, s-ilrma, mnmf or s-mnmf")->capture_default_str();
  separate->add_option("--fft", sep.fft, "STFT length")->capture_default_str();
  separate->add_option("--hop", sep.hop, "STFT hop")->capture_default_str();
  separate->add_option("--bases", sep.bases, "NMF bases per source")->capture_default_str();
  separate->add_option("--iters", sep.iters, "Iterations")->capture_default_str();
  separate->add_option("--mu", sep.mu, "Laplace weight on activations")
      ->capture_default_str();
  separate->add_option("--rho", sep.rho, "Bingham rho, a cost offset only")
      ->capture_default_str();
  separate->add_option("--bingham", sep.bingham, "Weight of the basis penalty, 0 disables it")
      ->capture_default_str();
  separate->add_option("--rule", sep.rule, "s-ILRMA basis update: cubic or closed-form")
      ->capture_default_str();
  separate->add_option("--seed", sep.seed, "Initialization seed")->capture_default_str();
  separate->add_option("--ref", sep.reference, "Reference channel for the outputs")
      ->capture_default_str();
  separate->add_option("--trace", sep.trace, "Write the per-iteration cost as CSV");
  separate->add_flag("--pcm16", sep.pcm16, "Write 16-bit PCM instead of 32-bit float");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Render a room mixture from a room spec file");
  simulate->add_option("room", sim.room, "Room spec (key = value)")->required();
  simulate->add_option("--sources", sim.sources, "Mono source WAVs, one per room source");
  simulate->add_option("-o,--output", sim.output, "Writes PREFIX_mix.wav and PREFIX_ref_<n>.wav")
      ->capture_default_str();
  simulate->add_option("--frames", sim.frames, "Synthetic source length in frames")
      ->capture_default_str();
  simulate->add_option("--fft", sim.fft, "Synthetic source STFT length")->capture_default_str();
  simulate->add_option("--bases", sim.bases, "Synthetic source rank")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Synthetic source seed")->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "SDR / SIR of estimates against references");
  evaluate->add_option("--estimates", ev.estimates, "Estimated source WAVs")->required();
  evaluate->add_option("--references", ev.references, "Reference source WAVs")->required();
  evaluate->add_option("--mixture", ev.mixture, "Mixture WAV (first channel) for improvements");
  evaluate->add_option("--csv", ev.csv, "Write scores as CSV");
  evaluate->add_option("--json", ev.json, "Write scores as JSON");

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run a batch experiment spec");
  experiment->add_option("spec", ex.spec, "Experiment spec (key = value)")->required();
  experiment->add_option("--csv", ex.csv, "Per-trial CSV")->capture_default_str();
  experiment->add_option("--json", ex.json, "Summary JSON")->capture_default_str();
  experiment->add_option("--jobs", ex.jobs, "Parallel trials")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*separate) return cmd_separate(sep);
    if (*simulate) return cmd_simulate(sim);
    if (*evaluate) return cmd_evaluate(ev);
    if (*experiment) return cmd_experiment(ex);
  } catch (const sbss::Diverged& e) {
    spdlog::error("diverged: {}", e.what());
    return kExitDiverged;
  } catch (const sbss::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  } catch (const sbss::IoError& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  } catch (const sbss::ContractViolation& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  } catch (const sbss::UnsupportedConfiguration& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
