#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "primesig/classical_sampling.hpp"
#include "primesig/config.hpp"
#include "primesig/errors.hpp"
#include "primesig/gap_histogram.hpp"
#include "primesig/generalized_sampling.hpp"
#include "primesig/io.hpp"
#include "primesig/parallel.hpp"
#include "primesig/sequences.hpp"
#include "primesig/sha256.hpp"
#include "primesig/spectrum.hpp"
#include "primesig/svg.hpp"
#include "primesig/version.hpp"

namespace primesig {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct OutputRecord {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunManifest {
  std::string experiment;
  std::string version;
  std::map<std::string, std::string> config_echo;
  std::vector<OutputRecord> outputs;
  std::vector<StageTiming> timings;
  std::map<std::string, double> metrics;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["version"] = version;
    j["config"] = config_echo;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : outputs)
      outs.push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    j["outputs"] = outs;
    nlohmann::json times = nlohmann::json::array();
    for (const auto& t : timings) times.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    j["timings"] = times;
    j["metrics"] = metrics;
    return j;
  }
};

// In-memory products of one sequence -> signal -> spectrum -> peaks run.
struct TableRun {
  IntegerSequence sequence;
  Signal signal;
  Spectrum spectrum;
  PeakTable peaks;
  double truncation_metric = 0.0;  // estimate (generalized) or bound (classical)
};

struct ExperimentResult {
  RunManifest manifest;
  std::optional<GapHistogram> histogram;
  std::optional<SpikeReport> spikes;
  std::vector<std::string> table_labels;
  std::vector<TableRun> tables;
};

// Wavelength band -> bin band for this spectrum's resolution.
inline PeakDetectParams peak_params_for(const Spectrum& spec, const ExperimentConfig& cfg) {
  PeakDetectParams p;
  p.min_prominence_ratio = cfg.peak_ratio;
  p.merge_radius_bins = cfg.merge_radius_bins;
  const double step = spec.bin_step();
  const double lo = 1.0 / (cfg.max_wavelength * step);
  const double hi = 1.0 / (cfg.min_wavelength * step);
  p.min_bin = static_cast<std::size_t>(std::max(1.0, std::ceil(lo - 1e-9)));
  p.max_bin = std::min(spec.size() - 1, static_cast<std::size_t>(std::floor(hi + 1e-9)));
  return p;
}

// Generalized pipeline: sequence as its own sample lattice, unit
// amplitudes, kernel reconstruction on a uniform grid spanning the
// sequence, then spectrum and peaks.
inline TableRun run_generalized_table(IntegerSequence seq, const ExperimentConfig& cfg) {
  if (seq.values.size() < 2) throw ValidationError("sequence too short for a lattice");
  TableRun run;
  const SampleLattice lattice = make_lattice(seq, cfg.scheme);
  const UniformGrid grid =
      UniformGrid::covering(lattice.points.front(), lattice.points.back(), cfg.dt);
  KernelEvalConfig kcfg;
  kcfg.truncation_count = cfg.truncation_count;
  kcfg.singularity_epsilon = cfg.singularity_epsilon;
  std::vector<double> ones(lattice.size(), 1.0);
  GeneralizedReconstruction recon =
      reconstruct_generalized(lattice, ones, grid, kcfg, effective_threads(cfg.threads));
  run.sequence = std::move(seq);
  run.signal = std::move(recon.signal);
  run.truncation_metric = recon.truncation_error_estimate;
  SpectrumOptions opts{cfg.window, cfg.subtract_mean, cfg.pad_to_pow2};
  run.spectrum = magnitude_spectrum(run.signal, opts);
  run.peaks = detect_peaks(run.spectrum, peak_params_for(run.spectrum, cfg));
  return run;
}

// Classical pipeline: indicator amplitudes over the full integer lattice
// up to the largest member, sinc reconstruction with a finite radius.
inline TableRun run_classical_table(IntegerSequence seq, const ExperimentConfig& cfg) {
  if (seq.values.empty()) throw ValidationError("empty sequence");
  TableRun run;
  const SampledSequence samples = indicator_over_integers(seq);
  const UniformGrid grid = UniformGrid::covering(
      static_cast<double>(samples.points.front()), static_cast<double>(samples.points.back()),
      cfg.dt);
  const double radius = cfg.truncation_radius == 0.0
                            ? std::numeric_limits<double>::infinity()
                            : cfg.truncation_radius;
  ClassicalReconstruction recon =
      reconstruct_classical(samples, ClassicalBandParams{cfg.omega_max}, grid, radius,
                            effective_threads(cfg.threads));
  run.sequence = std::move(seq);
  run.signal = std::move(recon.signal);
  run.truncation_metric = recon.truncation_error_bound;
  SpectrumOptions opts{cfg.window, cfg.subtract_mean, cfg.pad_to_pow2};
  run.spectrum = magnitude_spectrum(run.signal, opts);
  run.peaks = detect_peaks(run.spectrum, peak_params_for(run.spectrum, cfg));
  return run;
}

namespace detail {

class RunWriter {
 public:
  RunWriter(RunManifest& manifest, std::string dir, bool enabled)
      : manifest_(manifest), dir_(std::move(dir)), enabled_(enabled) {
    if (enabled_) std::filesystem::create_directories(dir_);
  }

  void text(const std::string& name, const std::string& content) {
    if (!enabled_) return;
    const std::string path = dir_ + "/" + name;
    write_text_file(path, content);
    manifest_.outputs.push_back({name, sha256_hex(content), content.size()});
  }

  void json(const std::string& name, const nlohmann::json& j) { text(name, j.dump(2) + "\n"); }

  template <class WriteFn>
  void via(const std::string& name, WriteFn&& fn) {
    if (!enabled_) return;
    const std::string path = dir_ + "/" + name;
    fn(path);
    OutputRecord rec;
    rec.path = name;
    rec.sha256 = sha256_file_hex(path);
    rec.bytes = std::filesystem::file_size(path);
    manifest_.outputs.push_back(rec);
  }

  const std::string& dir() const { return dir_; }

 private:
  RunManifest& manifest_;
  std::string dir_;
  bool enabled_;
};

class StageClock {
 public:
  explicit StageClock(RunManifest& manifest) : manifest_(manifest) {}

  template <class Fn>
  void run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const ValidationError&) {
      throw;  // caller's parameters are wrong, not the stage
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    manifest_.timings.push_back({stage, elapsed.count()});
  }

 private:
  RunManifest& manifest_;
};

inline std::vector<std::pair<double, double>> histogram_series(const GapHistogram& h) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& [d, c] : h.counts)
    xy.emplace_back(static_cast<double>(d), static_cast<double>(c));
  return xy;
}

inline std::vector<std::pair<double, double>> signal_zoom_series(const Signal& sig,
                                                                 std::size_t max_points = 2001) {
  std::vector<std::pair<double, double>> xy;
  const std::size_t n = std::min(max_points, sig.amplitudes.size());
  for (std::size_t i = 0; i < n; ++i) xy.emplace_back(sig.grid.point(i), sig.amplitudes[i]);
  return xy;
}

inline std::vector<std::pair<double, double>> spectrum_band_series(const Spectrum& spec,
                                                                   const PeakDetectParams& band,
                                                                   std::size_t max_points = 4000) {
  std::vector<std::pair<double, double>> xy;
  const std::size_t lo = band.min_bin;
  const std::size_t hi = band.max_bin == 0 ? spec.size() - 1 : band.max_bin;
  const std::size_t width = hi - lo + 1;
  const std::size_t stride = std::max<std::size_t>(1, width / max_points);
  for (std::size_t b = lo; b <= hi; b += stride)
    xy.emplace_back(spec.frequency(b), spec.magnitudes[b]);
  return xy;
}

// Emits the full artifact set of one table run under a name prefix.
inline void emit_table_run(RunWriter& writer, const std::string& prefix, const TableRun& run,
                           const ExperimentConfig& cfg) {
  writer.via(prefix + "sequence.csv",
             [&](const std::string& p) { write_sequence_csv(p, run.sequence); });
  writer.json(prefix + "sequence.json", sequence_sidecar(run.sequence));
  writer.via(prefix + "signal.csv", [&](const std::string& p) { write_signal_csv(p, run.signal); });
  writer.json(prefix + "signal.json", signal_sidecar(run.signal));
  writer.via(prefix + "spectrum.csv",
             [&](const std::string& p) { write_spectrum_csv(p, run.spectrum); });
  writer.json(prefix + "spectrum.json", spectrum_sidecar(run.spectrum));
  writer.via(prefix + "peaks.csv", [&](const std::string& p) { write_peaks_csv(p, run.peaks); });
  writer.json(prefix + "peaks.json", peaks_sidecar(run.peaks));
  if (cfg.emit_svg) {
    ChartStyle sig_style;
    sig_style.title = prefix + "signal (leading span)";
    sig_style.x_label = "t";
    sig_style.y_label = "amplitude";
    writer.text(prefix + "signal.svg", emit_svg_chart(signal_zoom_series(run.signal), sig_style));
    ChartStyle spec_style;
    spec_style.title = prefix + "spectrum (search band)";
    spec_style.x_label = "frequency";
    spec_style.y_label = "magnitude";
    writer.text(prefix + "spectrum.svg",
                emit_svg_chart(spectrum_band_series(run.spectrum, run.peaks.params), spec_style));
  }
}

inline nlohmann::json peak_summary_json(const PeakTable& t, std::size_t top_n = 20) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < std::min(top_n, t.peaks.size()); ++i) {
    const Peak& p = t.peaks[i];
    arr.push_back({{"rank", i + 1},
                   {"wavelength", p.wavelength},
                   {"frequency", p.frequency},
                   {"prominence", p.prominence}});
  }
  return arr;
}

}  // namespace detail

// Relative wavelength tolerance used by every reference comparison.
inline constexpr double kWavelengthTolerance = 0.005;
// A control run "shows" a wavelength only if its peak reaches this fraction
// of the prime-run prominence at the same wavelength.
inline constexpr double kControlProminenceFactor = 0.5;

// Wavelengths the full-scale reference run of an experiment is expected to
// surface (empty when the experiment carries no numeric targets).
inline std::vector<double> reference_wavelengths(ExperimentId id) {
  switch (id) {
    case ExperimentId::ClassicalTable1:
      return {20.0, 12.0, 20.0 / 3.0, 6.0, 5.0, 4.0};
    case ExperimentId::GeneralizedTable2:
      return {210.0, 30.0, 22.0, 14.0, 10.0, 6.0, 30.0 / 7.0, 3.0, 2.5, 30.0 / 13.0};
    case ExperimentId::TranslationWindows:
      return {6.0, 30.0};
    default:
      return {};
  }
}

// Primorial differences the all-pairs spike report is expected to contain.
inline std::vector<std::uint64_t> reference_spike_differences() { return {6, 30, 210, 2310}; }

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.manifest.experiment = to_string(cfg.id);
  result.manifest.version = kVersion;
  result.manifest.config_echo = cfg.echo();
  detail::RunWriter writer(result.manifest, cfg.out_dir, true);
  detail::StageClock clock(result.manifest);

  try {
    switch (cfg.id) {
      case ExperimentId::Hist1:
      case ExperimentId::Hist2: {
        IntegerSequence seq;
        clock.run("sequence", [&] {
          seq = primes_first(cfg.prime_count);
          if (cfg.skip_first > 0) {
            if (cfg.skip_first >= seq.values.size())
              throw ValidationError("seq.skip_first drops the whole sequence");
            seq.values.erase(seq.values.begin(),
                             seq.values.begin() + static_cast<std::ptrdiff_t>(cfg.skip_first));
            seq.params["skip_first"] = std::to_string(cfg.skip_first);
          }
        });
        GapHistogram hist;
        clock.run("histogram", [&] {
          hist = cfg.id == ExperimentId::Hist1 ? consecutive_gaps(seq)
                                               : pair_diff_histogram(seq, cfg.hist_max_diff);
        });
        SpikeReport spikes;
        clock.run("spikes", [&] { spikes = find_spikes(hist, cfg.spike_window, cfg.spike_ratio); });
        clock.run("reports", [&] {
          writer.via("sequence.csv", [&](const std::string& p) { write_sequence_csv(p, seq); });
          writer.json("sequence.json", sequence_sidecar(seq));
          writer.via("histogram.csv", [&](const std::string& p) { write_histogram_csv(p, hist); });
          writer.json("histogram.json", histogram_sidecar(hist));
          writer.json("spikes.json", spike_report_json(spikes));
          if (cfg.emit_svg) {
            ChartStyle style;
            style.kind = ChartKind::Bars;
            style.title = cfg.id == ExperimentId::Hist1 ? "consecutive gap counts"
                                                        : "pair difference counts";
            style.x_label = "difference";
            style.y_label = "count";
            writer.text("histogram.svg", emit_svg_chart(detail::histogram_series(hist), style));
          }
        });
        result.manifest.metrics["total_pairs"] = static_cast<double>(hist.total());
        result.manifest.metrics["distinct_differences"] = static_cast<double>(hist.counts.size());
        result.manifest.metrics["spike_count"] = static_cast<double>(spikes.spikes.size());
        result.histogram = std::move(hist);
        result.spikes = std::move(spikes);
        break;
      }

      case ExperimentId::ClassicalTable1:
      case ExperimentId::GeneralizedTable2:
      case ExperimentId::Seq1Run:
      case ExperimentId::Seq2Run: {
        IntegerSequence seq;
        clock.run("sequence", [&] {
          switch (cfg.id) {
            case ExperimentId::Seq1Run: seq = seq1_up_to(cfg.seq1_bound); break;
            case ExperimentId::Seq2Run: seq = seq2_first(cfg.seq2_count); break;
            default: seq = primes_first(cfg.prime_count); break;
          }
        });
        TableRun run;
        clock.run("signal+spectrum+peaks", [&] {
          run = cfg.id == ExperimentId::ClassicalTable1
                    ? run_classical_table(std::move(seq), cfg)
                    : run_generalized_table(std::move(seq), cfg);
        });
        clock.run("reports", [&] { detail::emit_table_run(writer, "", run, cfg); });
        result.manifest.metrics["truncation_metric"] = run.truncation_metric;
        result.manifest.metrics["median_magnitude"] = run.peaks.median_magnitude;
        result.manifest.metrics["peak_count"] = static_cast<double>(run.peaks.peaks.size());
        result.table_labels.push_back("");
        result.tables.push_back(std::move(run));
        break;
      }

      case ExperimentId::TranslationWindows: {
        for (std::size_t w = 0; w < cfg.windows.size(); ++w) {
          const std::string label = "window" + std::to_string(w + 1);
          IntegerSequence seq;
          clock.run(label + " sequence", [&] {
            seq = primes_in_range(cfg.windows[w].lo, cfg.windows[w].hi);
            if (seq.values.size() < 2)
              throw ValidationError("window holds fewer than two primes");
          });
          TableRun run;
          clock.run(label + " signal+spectrum+peaks",
                    [&] { run = run_generalized_table(std::move(seq), cfg); });
          clock.run(label + " reports",
                    [&] { detail::emit_table_run(writer, label + "_", run, cfg); });
          result.table_labels.push_back(label);
          result.tables.push_back(std::move(run));
        }
        clock.run("matches", [&] {
          nlohmann::json j;
          for (std::size_t w = 1; w < result.tables.size(); ++w) {
            const PeakTableComparison cmp = compare_peak_tables(
                result.tables[0].peaks, result.tables[w].peaks, kWavelengthTolerance);
            nlohmann::json pairs = nlohmann::json::array();
            for (const auto& m : cmp.matched)
              pairs.push_back({{"wavelength_a", m.wavelength_a},
                               {"wavelength_b", m.wavelength_b},
                               {"relative_error", m.relative_error}});
            j["window1_vs_" + result.table_labels[w]] = pairs;
          }
          writer.json("matches.json", j);
        });
        break;
      }

      case ExperimentId::PoissonControl: {
        IntegerSequence primes, control;
        clock.run("sequences", [&] {
          primes = primes_first(cfg.prime_count);
          control = cramer_sample(cfg.prime_count, cfg.seed, cfg.cramer_mode);
        });
        TableRun prime_run, control_run;
        clock.run("prime signal+spectrum+peaks",
                  [&] { prime_run = run_generalized_table(std::move(primes), cfg); });
        clock.run("control signal+spectrum+peaks",
                  [&] { control_run = run_generalized_table(std::move(control), cfg); });
        clock.run("reports", [&] {
          detail::emit_table_run(writer, "prime_", prime_run, cfg);
          detail::emit_table_run(writer, "control_", control_run, cfg);
          nlohmann::json j;
          const double probe = 30.0;
          const Peak* p = prime_run.peaks.best_match(probe, kWavelengthTolerance);
          const Peak* c = control_run.peaks.best_match(probe, kWavelengthTolerance);
          j["probe_wavelength"] = probe;
          j["prime_prominence"] = p ? p->prominence : 0.0;
          j["control_prominence"] = c ? c->prominence : 0.0;
          j["prime_top_peaks"] = detail::peak_summary_json(prime_run.peaks);
          j["control_top_peaks"] = detail::peak_summary_json(control_run.peaks);
          writer.json("comparison.json", j);
          result.manifest.metrics["prime_30_prominence"] = p ? p->prominence : 0.0;
          result.manifest.metrics["control_30_prominence"] = c ? c->prominence : 0.0;
        });
        result.table_labels.push_back("prime");
        result.tables.push_back(std::move(prime_run));
        result.table_labels.push_back("control");
        result.tables.push_back(std::move(control_run));
        break;
      }
    }
  } catch (const std::exception& e) {
    // Flag the directory so partial outputs are never mistaken for a
    // completed run.
    try {
      write_text_file(cfg.out_dir + "/FAILED.txt", std::string(e.what()) + "\n");
    } catch (...) {
    }
    throw;
  }

  // Written directly, not through the writer: the manifest cannot carry its
  // own digest.
  write_json_file(cfg.out_dir + "/manifest.json", result.manifest.to_json());
  return result;
}

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
  std::size_t checked = 0;
};

// Re-hashes every file listed in a manifest. Paths are taken relative to
// the manifest's own directory.
inline VerifyReport verify_manifest(const std::string& manifest_path) {
  VerifyReport report;
  const nlohmann::json j = read_json_file(manifest_path);
  if (!j.contains("outputs") || !j["outputs"].is_array())
    throw ValidationError("manifest has no outputs array: " + manifest_path);
  const std::filesystem::path dir = std::filesystem::path(manifest_path).parent_path();
  for (const auto& o : j["outputs"]) {
    const std::string rel = o.at("path").get<std::string>();
    const std::string expect = o.at("sha256").get<std::string>();
    const std::filesystem::path p = dir / rel;
    ++report.checked;
    if (!std::filesystem::exists(p)) {
      report.ok = false;
      report.problems.push_back("missing: " + rel);
      continue;
    }
    const std::string actual = sha256_file_hex(p.string());
    if (actual != expect) {
      report.ok = false;
      report.problems.push_back("digest mismatch: " + rel);
    }
  }
  return report;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Reference checks for the experiments that carry numeric targets. Each
// check line is self-describing so the CLI can print it verbatim.
inline std::vector<CheckResult> acceptance_checks(const ExperimentConfig& cfg,
                                                  const ExperimentResult& result) {
  std::vector<CheckResult> checks;
  const auto wavelength_check = [&](const PeakTable& table, double target,
                                    const std::string& label) {
    CheckResult c;
    c.name = label;
    const Peak* p = table.best_match(target, kWavelengthTolerance);
    if (p) {
      c.pass = true;
      c.detail = "matched at " + format_double(p->wavelength) +
                 " (prominence " + format_double(p->prominence) + ")";
    } else {
      c.detail = "no peak within 0.5%";
    }
    return c;
  };

  switch (cfg.id) {
    case ExperimentId::Hist1:
      break;  // no numeric targets
    case ExperimentId::Hist2: {
      for (std::uint64_t d : reference_spike_differences()) {
        CheckResult c;
        c.name = "spike at difference " + std::to_string(d);
        c.pass = false;
        if (result.spikes) {
          for (const auto& s : result.spikes->spikes)
            if (s.difference == d) {
              c.pass = true;
              c.detail = "count " + std::to_string(s.count);
              break;
            }
        }
        if (!c.pass) c.detail = "not in spike report";
        checks.push_back(c);
      }
      break;
    }
    case ExperimentId::ClassicalTable1:
    case ExperimentId::GeneralizedTable2: {
      if (result.tables.empty()) break;
      for (double target : reference_wavelengths(cfg.id))
        checks.push_back(wavelength_check(result.tables[0].peaks, target,
                                          "wavelength " + format_double(target)));
      break;
    }
    case ExperimentId::TranslationWindows: {
      for (std::size_t w = 0; w < result.tables.size(); ++w)
        for (double target : reference_wavelengths(cfg.id))
          checks.push_back(wavelength_check(result.tables[w].peaks, target,
                                            result.table_labels[w] + " wavelength " +
                                                format_double(target)));
      break;
    }
    case ExperimentId::PoissonControl: {
      CheckResult c;
      c.name = "control lacks the wavelength-30 peak";
      if (result.tables.size() == 2) {
        const Peak* p = result.tables[0].peaks.best_match(30.0, kWavelengthTolerance);
        const Peak* ctl = result.tables[1].peaks.best_match(30.0, kWavelengthTolerance);
        if (!p) {
          c.pass = false;
          c.detail = "prime run itself has no wavelength-30 peak";
        } else if (ctl && ctl->prominence >= kControlProminenceFactor * p->prominence) {
          c.pass = false;
          c.detail = "control prominence " + format_double(ctl->prominence) +
                     " vs prime " + format_double(p->prominence);
        } else {
          c.pass = true;
          c.detail = ctl ? "control prominence " + format_double(ctl->prominence) +
                               " below half of prime " + format_double(p->prominence)
                         : "no control peak within 0.5%; prime prominence " +
                               format_double(p->prominence);
        }
      } else {
        c.pass = false;
        c.detail = "run produced no tables";
      }
      checks.push_back(c);
      break;
    }
    case ExperimentId::Seq1Run:
    case ExperimentId::Seq2Run:
      break;  // artifacts only, no numeric targets
  }
  return checks;
}

}  // namespace primesig
