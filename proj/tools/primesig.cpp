// Command-line front end: sequence generation, histograms, sampling
// reconstructions, spectra, peak tables, and the canned experiments, all
// driven by flat key=value configs with reproducible outputs.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "primesig/primesig.hpp"

namespace {

using namespace primesig;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitStageFailure = 3;
constexpr int kExitCheckFailure = 4;

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double dt = 0.0;
  std::uint64_t truncation = 0;
  bool seed_set = false, threads_set = false, dt_set = false, truncation_set = false;
};

// defaults <- config file <- explicit global flags, in that order.
ExperimentConfig resolve_config(ExperimentId id, const GlobalFlags& g) {
  ExperimentConfig cfg = ExperimentConfig::defaults_for(id);
  if (!g.config_path.empty()) cfg.apply(KeyValueConfig::parse_file(g.config_path));
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.seed_set) cfg.seed = g.seed;
  if (g.threads_set) cfg.threads = g.threads;
  if (g.dt_set) cfg.dt = g.dt;
  if (g.truncation_set) cfg.truncation_count = g.truncation;
  return cfg;
}

void add_global_flags(CLI::App* cmd, GlobalFlags& g) {
  cmd->add_option("--config", g.config_path, "key=value config file");
  cmd->add_option("--out", g.out_dir, "output directory");
  cmd->add_option("--seed", g.seed, "random seed")->each([&](const std::string&) { g.seed_set = true; });
  cmd->add_option("--threads", g.threads, "worker threads (0 = hardware)")
      ->each([&](const std::string&) { g.threads_set = true; });
  cmd->add_option("--dt", g.dt, "evaluation grid spacing")
      ->each([&](const std::string&) { g.dt_set = true; });
  cmd->add_option("--truncation", g.truncation, "lattice sum truncation W (0 = unlimited)")
      ->each([&](const std::string&) { g.truncation_set = true; });
}

void write_with_note(const std::string& path, const std::string& content) {
  write_text_file(path, content);
  std::cout << "wrote " << path << "\n";
}

void emit_sequence(const std::string& dir, const IntegerSequence& seq) {
  std::filesystem::create_directories(dir);
  write_sequence_csv(dir + "/sequence.csv", seq);
  write_json_file(dir + "/sequence.json", sequence_sidecar(seq));
  std::cout << "wrote " << dir << "/sequence.csv (" << seq.values.size() << " values)\n";
}

int run_seq(const GlobalFlags& g, const std::string& kind, std::uint64_t count,
            std::uint64_t bound, std::uint64_t lo, std::uint64_t hi, const std::string& mode,
            std::uint64_t skip_first) {
  ExperimentConfig cfg = resolve_config(ExperimentId::GeneralizedTable2, g);
  const std::string dir = g.out_dir.empty() ? "out/seq" : g.out_dir;
  IntegerSequence seq;
  if (kind == "primes") {
    seq = (lo || hi) ? primes_in_range(lo, hi) : primes_first(count);
  } else if (kind == "primorials") {
    const PrimorialTable table = primorials(static_cast<unsigned>(count));
    seq = primorial_sequence(static_cast<unsigned>(count));
    std::filesystem::create_directories(dir);
    std::string csv = "k,value,reign_lower,reign_upper\n";
    for (const auto& e : table.entries) {
      csv += std::to_string(e.k) + "," + std::to_string(e.value) + ",";
      if (e.reign) csv += e.reign->lower + "," + e.reign->upper;
      else csv += ",";
      csv += "\n";
    }
    write_with_note(dir + "/primorials.csv", csv);
  } else if (kind == "seq1") {
    seq = seq1_up_to(bound);
  } else if (kind == "seq2") {
    seq = seq2_first(count);
  } else if (kind == "cramer") {
    seq = cramer_sample(count, cfg.seed, cramer_mode_from_string(mode));
  } else {
    throw ValidationError("unknown sequence kind: " + kind);
  }
  if (skip_first > 0) {
    if (skip_first >= seq.values.size()) throw ValidationError("--skip-first drops everything");
    seq.values.erase(seq.values.begin(), seq.values.begin() + static_cast<std::ptrdiff_t>(skip_first));
    seq.params["skip_first"] = std::to_string(skip_first);
  }
  emit_sequence(dir, seq);
  return kExitOk;
}

int run_hist(const GlobalFlags& g, const std::string& in, const std::string& mode,
             std::uint64_t max_diff, unsigned spike_window, double spike_ratio, bool no_svg) {
  const std::string dir = g.out_dir.empty() ? "out/hist" : g.out_dir;
  const IntegerSequence seq = read_sequence_csv(in);
  const PairingMode pm = pairing_mode_from_string(mode);
  const GapHistogram hist =
      pm == PairingMode::Consecutive ? consecutive_gaps(seq) : pair_diff_histogram(seq, max_diff);
  const SpikeReport spikes = find_spikes(hist, spike_window, spike_ratio);
  std::filesystem::create_directories(dir);
  write_histogram_csv(dir + "/histogram.csv", hist);
  write_json_file(dir + "/histogram.json", histogram_sidecar(hist));
  write_json_file(dir + "/spikes.json", spike_report_json(spikes));
  if (!no_svg) {
    ChartStyle style;
    style.kind = ChartKind::Bars;
    style.title = "difference counts";
    style.x_label = "difference";
    style.y_label = "count";
    std::vector<std::pair<double, double>> xy;
    for (const auto& [d, c] : hist.counts)
      xy.emplace_back(static_cast<double>(d), static_cast<double>(c));
    write_text_file(dir + "/histogram.svg", emit_svg_chart(xy, style));
  }
  std::cout << "wrote " << dir << "/histogram.csv (" << hist.counts.size() << " differences, "
            << spikes.spikes.size() << " spikes)\n";
  return kExitOk;
}

int run_signal(const GlobalFlags& g, const std::string& in, const std::string& method,
               const std::string& scheme, double omega, double radius) {
  ExperimentConfig cfg = resolve_config(ExperimentId::GeneralizedTable2, g);
  const std::string dir = g.out_dir.empty() ? "out/signal" : g.out_dir;
  IntegerSequence seq = read_sequence_csv(in);
  Signal signal;
  if (method == "classical") {
    const SampledSequence samples = indicator_over_integers(seq);
    const UniformGrid grid =
        UniformGrid::covering(static_cast<double>(samples.points.front()),
                              static_cast<double>(samples.points.back()), cfg.dt);
    const double r = radius == 0.0 ? std::numeric_limits<double>::infinity() : radius;
    signal = reconstruct_classical(samples, ClassicalBandParams{omega}, grid, r,
                                   effective_threads(cfg.threads))
                 .signal;
  } else if (method == "generalized") {
    const SampleLattice lattice = make_lattice(seq, speed_scheme_from_string(scheme));
    const UniformGrid grid =
        UniformGrid::covering(lattice.points.front(), lattice.points.back(), cfg.dt);
    KernelEvalConfig kcfg;
    kcfg.truncation_count = cfg.truncation_count;
    kcfg.singularity_epsilon = cfg.singularity_epsilon;
    std::vector<double> ones(lattice.size(), 1.0);
    signal = reconstruct_generalized(lattice, ones, grid, kcfg, effective_threads(cfg.threads))
                 .signal;
  } else {
    throw ValidationError("unknown method: " + method);
  }
  std::filesystem::create_directories(dir);
  write_signal_csv(dir + "/signal.csv", signal);
  write_json_file(dir + "/signal.json", signal_sidecar(signal));
  std::cout << "wrote " << dir << "/signal.csv (" << signal.size() << " points)\n";
  return kExitOk;
}

int run_spectrum(const GlobalFlags& g, const std::string& in, const std::string& window,
                 bool no_mean_subtract, bool no_pad) {
  const std::string dir = g.out_dir.empty() ? "out/spectrum" : g.out_dir;
  const Signal signal = read_signal_csv(in);
  SpectrumOptions opts;
  opts.window = window_kind_from_string(window);
  opts.subtract_mean = !no_mean_subtract;
  opts.pad_to_pow2 = !no_pad;
  const Spectrum spec = magnitude_spectrum(signal, opts);
  std::filesystem::create_directories(dir);
  write_spectrum_csv(dir + "/spectrum.csv", spec);
  write_json_file(dir + "/spectrum.json", spectrum_sidecar(spec));
  std::cout << "wrote " << dir << "/spectrum.csv (" << spec.size() << " bins)\n";
  return kExitOk;
}

int run_peaks(const GlobalFlags& g, const std::string& in, double ratio, double min_wavelength,
              double max_wavelength, std::uint64_t merge_radius) {
  const std::string dir = g.out_dir.empty() ? "out/peaks" : g.out_dir;
  const Spectrum spec = read_spectrum_csv(in);
  ExperimentConfig cfg = resolve_config(ExperimentId::GeneralizedTable2, g);
  cfg.peak_ratio = ratio;
  cfg.min_wavelength = min_wavelength;
  cfg.max_wavelength = max_wavelength;
  cfg.merge_radius_bins = merge_radius;
  const PeakTable table = detect_peaks(spec, peak_params_for(spec, cfg));
  std::filesystem::create_directories(dir);
  write_peaks_csv(dir + "/peaks.csv", table);
  write_json_file(dir + "/peaks.json", peaks_sidecar(table));
  std::cout << "wrote " << dir << "/peaks.csv (" << table.peaks.size() << " peaks)\n";
  return kExitOk;
}

int run_experiment_cmd(const GlobalFlags& g, const std::string& id_str, bool check) {
  const ExperimentId id = experiment_id_from_string(id_str);
  ExperimentConfig cfg = resolve_config(id, g);
  const ExperimentResult result = run_experiment(cfg);
  std::cout << "experiment " << id_str << " complete; manifest at " << cfg.out_dir
            << "/manifest.json\n";
  for (const auto& t : result.manifest.timings)
    std::printf("  %-32s %8.2fs\n", t.stage.c_str(), t.seconds);
  if (!check) return kExitOk;
  const std::vector<CheckResult> checks = acceptance_checks(cfg, result);
  if (checks.empty()) {
    std::cout << "no reference checks defined for " << id_str << "\n";
    return kExitOk;
  }
  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    all_pass = all_pass && c.pass;
  }
  return all_pass ? kExitOk : kExitCheckFailure;
}

int run_verify(const std::string& manifest_path) {
  const VerifyReport report = verify_manifest(manifest_path);
  for (const auto& p : report.problems) std::cout << p << "\n";
  std::cout << (report.ok ? "ok: " : "FAILED: ") << report.checked << " files checked, "
            << report.problems.size() << (report.problems.size() == 1 ? " problem\n" : " problems\n");
  return report.ok ? kExitOk : kExitStageFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integer-sequence sampling and spectral analysis"};
  app.require_subcommand(1);

  GlobalFlags g;

  auto* seq_cmd = app.add_subcommand("seq", "generate an integer sequence");
  std::string seq_kind = "primes", seq_mode = "density";
  std::uint64_t seq_count = 50000, seq_bound = 209760, seq_lo = 0, seq_hi = 0, seq_skip = 0;
  add_global_flags(seq_cmd, g);
  seq_cmd->add_option("--kind", seq_kind, "primes|primorials|seq1|seq2|cramer");
  seq_cmd->add_option("--count", seq_count, "element count (primes/cramer/seq2/primorials)");
  seq_cmd->add_option("--bound", seq_bound, "upper bound (seq1)");
  seq_cmd->add_option("--lo", seq_lo, "range start (primes)");
  seq_cmd->add_option("--hi", seq_hi, "range end (primes)");
  seq_cmd->add_option("--mode", seq_mode, "cramer mode: density|mean_gap");
  seq_cmd->add_option("--skip-first", seq_skip, "drop this many leading elements");

  auto* hist_cmd = app.add_subcommand("hist", "gap or pair-difference histogram");
  std::string hist_in, hist_mode = "consecutive";
  std::uint64_t hist_max_diff = 2400;
  unsigned hist_spike_window = 20;
  double hist_spike_ratio = 1.2;
  bool hist_no_svg = false;
  add_global_flags(hist_cmd, g);
  hist_cmd->add_option("--in", hist_in, "sequence.csv input")->required();
  hist_cmd->add_option("--mode", hist_mode, "consecutive|allpairs");
  hist_cmd->add_option("--max-diff", hist_max_diff, "allpairs difference cap");
  hist_cmd->add_option("--spike-window", hist_spike_window, "spike baseline half-width");
  hist_cmd->add_option("--spike-ratio", hist_spike_ratio, "spike threshold over baseline");
  hist_cmd->add_flag("--no-svg", hist_no_svg, "skip chart emission");

  auto* signal_cmd = app.add_subcommand("signal", "reconstruct a continuous signal");
  std::string signal_in, signal_method = "generalized", signal_scheme = "centered";
  double signal_omega = 0.5, signal_radius = 5000.0;
  add_global_flags(signal_cmd, g);
  signal_cmd->add_option("--in", signal_in, "sequence.csv input")->required();
  signal_cmd->add_option("--method", signal_method, "classical|generalized");
  signal_cmd->add_option("--scheme", signal_scheme, "centered|forward (generalized)");
  signal_cmd->add_option("--omega", signal_omega, "bandlimit (classical)");
  signal_cmd->add_option("--radius", signal_radius, "truncation radius, 0 = unlimited (classical)");

  auto* spectrum_cmd = app.add_subcommand("spectrum", "magnitude spectrum of a signal");
  std::string spectrum_in, spectrum_window = "rectangular";
  bool no_mean_subtract = false, no_pad = false;
  add_global_flags(spectrum_cmd, g);
  spectrum_cmd->add_option("--in", spectrum_in, "signal.csv input")->required();
  spectrum_cmd->add_option("--window", spectrum_window, "rectangular|hann");
  spectrum_cmd->add_flag("--no-mean-subtract", no_mean_subtract, "keep the DC pedestal");
  spectrum_cmd->add_flag("--no-pad", no_pad, "transform at the raw length");

  auto* peaks_cmd = app.add_subcommand("peaks", "prominent peaks of a spectrum");
  std::string peaks_in;
  double peaks_ratio = 4.0, peaks_min_wl = 2.0, peaks_max_wl = 500.0;
  std::uint64_t peaks_merge = 8;
  add_global_flags(peaks_cmd, g);
  peaks_cmd->add_option("--in", peaks_in, "spectrum.csv input")->required();
  peaks_cmd->add_option("--ratio", peaks_ratio, "prominence over in-band median");
  peaks_cmd->add_option("--min-wavelength", peaks_min_wl, "search band lower edge");
  peaks_cmd->add_option("--max-wavelength", peaks_max_wl, "search band upper edge");
  peaks_cmd->add_option("--merge-radius", peaks_merge, "suppression radius in bins");

  auto* exp_cmd = app.add_subcommand("experiment", "run a canned experiment");
  std::string exp_id;
  bool exp_check = false;
  add_global_flags(exp_cmd, g);
  exp_cmd->add_option("id", exp_id,
                      "Hist1|Hist2|ClassicalTable1|GeneralizedTable2|TranslationWindows|"
                      "PoissonControl|Seq1Run|Seq2Run")
      ->required();
  exp_cmd->add_flag("--check", exp_check, "run reference checks; exit 4 on failure");

  auto* verify_cmd = app.add_subcommand("verify", "re-check digests in a run manifest");
  std::string verify_path;
  verify_cmd->add_option("manifest", verify_path, "manifest.json path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (seq_cmd->parsed())
      return run_seq(g, seq_kind, seq_count, seq_bound, seq_lo, seq_hi, seq_mode, seq_skip);
    if (hist_cmd->parsed())
      return run_hist(g, hist_in, hist_mode, hist_max_diff, hist_spike_window, hist_spike_ratio,
                      hist_no_svg);
    if (signal_cmd->parsed())
      return run_signal(g, signal_in, signal_method, signal_scheme, signal_omega, signal_radius);
    if (spectrum_cmd->parsed())
      return run_spectrum(g, spectrum_in, spectrum_window, no_mean_subtract, no_pad);
    if (peaks_cmd->parsed())
      return run_peaks(g, peaks_in, peaks_ratio, peaks_min_wl, peaks_max_wl, peaks_merge);
    if (exp_cmd->parsed()) return run_experiment_cmd(g, exp_id, exp_check);
    if (verify_cmd->parsed()) return run_verify(verify_path);
  } catch (const primesig::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFailure;
  }
  return kExitOk;
}
