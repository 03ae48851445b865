#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "primesig/pipeline.hpp"

using namespace primesig;

namespace {

namespace fs = std::filesystem;

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "primesig_pipeline_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PRIMESIG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

const std::string& output_sha(const RunManifest& m, const std::string& name) {
  for (const auto& o : m.outputs)
    if (o.path == name) return o.sha256;
  FAIL("manifest lacks output " + name);
  static const std::string none;
  return none;
}

ExperimentConfig small_generalized(const std::string& out, std::uint64_t primes,
                                   unsigned threads = 1) {
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::GeneralizedTable2);
  cfg.prime_count = primes;
  cfg.truncation_count = 64;
  cfg.threads = threads;
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("wavelength band maps to the right bins") {
  Spectrum spec;
  spec.dt = 0.25;
  spec.padded_length = 4096;
  spec.magnitudes.assign(2049, 1.0);
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::GeneralizedTable2);
  const PeakDetectParams p = peak_params_for(spec, cfg);
  // bin_step 1/1024: wavelength 500 -> bin 2.048, wavelength 2 -> bin 512
  REQUIRE(p.min_bin == 3);
  REQUIRE(p.max_bin == 512);
  REQUIRE(p.min_prominence_ratio == cfg.peak_ratio);
  REQUIRE(spec.wavelength(p.min_bin) <= 500.0);
  REQUIRE(spec.wavelength(p.max_bin) >= 2.0);
}

TEST_CASE("generalized prime run surfaces the primorial wavelengths") {
  ExperimentConfig cfg = small_generalized("", 10000);
  TableRun run = run_generalized_table(primes_first(cfg.prime_count), cfg);

  // grid spans the primes at the configured spacing
  REQUIRE(run.signal.grid.origin == 2.0);
  REQUIRE(run.signal.grid.spacing == 0.25);
  REQUIRE(run.signal.grid.back() >= 104729.0 - 1e-6);

  // sample recovery at a grid point that lands on a prime
  const std::size_t gi_13 = static_cast<std::size_t>((13.0 - 2.0) / 0.25);
  REQUIRE(run.signal.grid.point(gi_13) == 13.0);
  REQUIRE(run.signal.amplitudes[gi_13] == 1.0);

  REQUIRE(run.truncation_metric > 0.0);
  REQUIRE(run.peaks.peaks.size() >= 2);

  const Peak* six = run.peaks.best_match(6.0, kWavelengthTolerance);
  const Peak* thirty = run.peaks.best_match(30.0, kWavelengthTolerance);
  REQUIRE(six != nullptr);
  REQUIRE(thirty != nullptr);

  // both sit in the top ten by prominence
  const std::size_t top = std::min<std::size_t>(10, run.peaks.peaks.size());
  bool six_top = false, thirty_top = false;
  for (std::size_t i = 0; i < top; ++i) {
    if (run.peaks.peaks[i].bin == six->bin) six_top = true;
    if (run.peaks.peaks[i].bin == thirty->bin) thirty_top = true;
  }
  REQUIRE(six_top);
  REQUIRE(thirty_top);
}

TEST_CASE("classical prime run finds the strongest line") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::ClassicalTable1);
  cfg.prime_count = 10000;
  cfg.truncation_radius = 2000.0;
  cfg.threads = 1;
  TableRun run = run_classical_table(primes_first(cfg.prime_count), cfg);
  REQUIRE(run.truncation_metric > 0.0);
  REQUIRE(run.signal.provenance.at("method") == "classical");
  const Peak* six = run.peaks.best_match(6.0, kWavelengthTolerance);
  REQUIRE(six != nullptr);
}

TEST_CASE("experiment run emits a verifiable manifest") {
  const std::string out = fresh_dir("gen_small");
  ExperimentConfig cfg = small_generalized(out, 500);
  const ExperimentResult result = run_experiment(cfg);

  REQUIRE(result.manifest.experiment == "GeneralizedTable2");
  REQUIRE(result.manifest.version == kVersion);
  REQUIRE(result.manifest.config_echo.at("kernel.truncation") == "64");
  REQUIRE(result.manifest.metrics.count("truncation_metric") == 1);
  REQUIRE(result.manifest.metrics.count("peak_count") == 1);
  REQUIRE_FALSE(result.manifest.timings.empty());
  REQUIRE(result.tables.size() == 1);

  for (const std::string name :
       {"sequence.csv", "sequence.json", "signal.csv", "signal.json", "spectrum.csv",
        "spectrum.json", "peaks.csv", "peaks.json", "signal.svg", "spectrum.svg"}) {
    INFO(name);
    REQUIRE(fs::exists(fs::path(out) / name));
  }
  REQUIRE(result.manifest.outputs.size() == 10);
  REQUIRE(fs::exists(fs::path(out) / "manifest.json"));
  REQUIRE_FALSE(fs::exists(fs::path(out) / "FAILED.txt"));

  const VerifyReport ok = verify_manifest(out + "/manifest.json");
  REQUIRE(ok.ok);
  REQUIRE(ok.checked == 10);
  REQUIRE(ok.problems.empty());

  // corrupt one artifact, then delete another
  write_text_file(out + "/peaks.csv", read_text_file(out + "/peaks.csv") + "tampered\n");
  fs::remove(fs::path(out) / "signal.svg");
  const VerifyReport bad = verify_manifest(out + "/manifest.json");
  REQUIRE_FALSE(bad.ok);
  REQUIRE(bad.problems.size() == 2);
}

TEST_CASE("failed runs leave a flag file") {
  const std::string out = fresh_dir("gen_fail");
  ExperimentConfig cfg = small_generalized(out, 1);
  REQUIRE_THROWS_AS(run_experiment(cfg), ValidationError);
  REQUIRE(fs::exists(fs::path(out) / "FAILED.txt"));
  REQUIRE_FALSE(fs::exists(fs::path(out) / "manifest.json"));
}

TEST_CASE("pair-difference experiment matches a direct count") {
  const std::string out = fresh_dir("hist2_small");
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::Hist2);
  cfg.prime_count = 2000;
  cfg.hist_max_diff = 300;
  cfg.out_dir = out;
  const ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.histogram.has_value());

  const IntegerSequence primes = primes_first(2000);
  std::map<std::uint64_t, std::uint64_t> expect;
  for (std::size_t i = 1; i < primes.values.size(); ++i)
    for (std::size_t j = i + 1; j < primes.values.size(); ++j) {
      const std::uint64_t d = primes.values[j] - primes.values[i];
      if (d <= 300) ++expect[d];
    }
  REQUIRE(result.histogram->counts == expect);

  REQUIRE(result.spikes.has_value());
  auto has_spike = [&](std::uint64_t d) {
    for (const auto& s : result.spikes->spikes)
      if (s.difference == d) return true;
    return false;
  };
  REQUIRE(has_spike(6));
  REQUIRE(has_spike(30));
  REQUIRE(has_spike(210));
  REQUIRE_FALSE(has_spike(8));

  const auto checks = acceptance_checks(cfg, result);
  REQUIRE(checks.size() == 4);
  REQUIRE(checks[0].name == "spike at difference 6");
  REQUIRE(checks[0].pass);
}

TEST_CASE("translation windows run all windows and report matches") {
  const std::string out = fresh_dir("windows_small");
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::TranslationWindows);
  cfg.windows = {{2, 5000}, {5001, 10000}};
  cfg.truncation_count = 64;
  cfg.threads = 1;
  cfg.out_dir = out;
  const ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.tables.size() == 2);
  REQUIRE(result.table_labels == std::vector<std::string>{"window1", "window2"});
  REQUIRE(fs::exists(fs::path(out) / "window1_signal.csv"));
  REQUIRE(fs::exists(fs::path(out) / "window2_peaks.csv"));
  REQUIRE(fs::exists(fs::path(out) / "matches.json"));
  for (const TableRun& t : result.tables)
    REQUIRE(t.peaks.best_match(6.0, kWavelengthTolerance) != nullptr);
  const nlohmann::json j = read_json_file(out + "/matches.json");
  REQUIRE(j.contains("window1_vs_window2"));
}

TEST_CASE("poisson control produces both tables") {
  const std::string out = fresh_dir("control_small");
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::PoissonControl);
  cfg.prime_count = 300;
  cfg.truncation_count = 32;
  cfg.threads = 1;
  cfg.out_dir = out;
  const ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.tables.size() == 2);
  REQUIRE(result.table_labels == std::vector<std::string>{"prime", "control"});
  REQUIRE(fs::exists(fs::path(out) / "prime_signal.csv"));
  REQUIRE(fs::exists(fs::path(out) / "control_signal.csv"));
  REQUIRE(fs::exists(fs::path(out) / "comparison.json"));
  REQUIRE(result.manifest.metrics.count("prime_30_prominence") == 1);
  REQUIRE(result.manifest.metrics.count("control_30_prominence") == 1);
  const auto checks = acceptance_checks(cfg, result);
  REQUIRE(checks.size() == 1);
}

TEST_CASE("sequence-variant experiments complete") {
  {
    const std::string out = fresh_dir("seq1_small");
    ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::Seq1Run);
    cfg.seq1_bound = 2000;
    cfg.truncation_count = 64;
    cfg.threads = 1;
    cfg.out_dir = out;
    const ExperimentResult result = run_experiment(cfg);
    REQUIRE(result.tables.size() == 1);
    REQUIRE(acceptance_checks(cfg, result).empty());
  }
  {
    const std::string out = fresh_dir("seq2_small");
    ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::Seq2Run);
    cfg.seq2_count = 200;
    cfg.truncation_count = 64;
    cfg.threads = 1;
    cfg.out_dir = out;
    const ExperimentResult result = run_experiment(cfg);
    REQUIRE(result.tables.size() == 1);
    REQUIRE(fs::exists(fs::path(out) / "manifest.json"));
  }
}

TEST_CASE("thread count leaves the artifacts byte-identical") {
  const std::string out1 = fresh_dir("det_t1");
  const std::string out4 = fresh_dir("det_t4");
  const ExperimentResult r1 = run_experiment(small_generalized(out1, 500, 1));
  const ExperimentResult r4 = run_experiment(small_generalized(out4, 500, 4));
  for (const std::string name : {"sequence.csv", "signal.csv", "spectrum.csv", "peaks.csv"}) {
    INFO(name);
    REQUIRE(output_sha(r1.manifest, name) == output_sha(r4.manifest, name));
  }
}

TEST_CASE("reference checks pass when the peaks are present") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::GeneralizedTable2);
  ExperimentResult result;
  TableRun run;
  for (double wl : reference_wavelengths(ExperimentId::GeneralizedTable2)) {
    Peak p;
    p.wavelength = wl * 1.001;  // inside the 0.5% tolerance
    p.frequency = 1.0 / p.wavelength;
    p.prominence = 10.0;
    run.peaks.peaks.push_back(p);
  }
  result.tables.push_back(run);
  result.table_labels.push_back("");
  const auto checks = acceptance_checks(cfg, result);
  REQUIRE(checks.size() == 10);
  for (const auto& c : checks) {
    INFO(c.name << ": " << c.detail);
    REQUIRE(c.pass);
  }
}

TEST_CASE("control check compares prominence against the prime run") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for(ExperimentId::PoissonControl);
  auto make_result = [](double prime_prom, double control_prom, bool control_has_peak) {
    ExperimentResult r;
    TableRun prime, control;
    Peak p;
    p.wavelength = 30.0;
    p.frequency = 1.0 / 30.0;
    p.prominence = prime_prom;
    prime.peaks.peaks.push_back(p);
    if (control_has_peak) {
      p.prominence = control_prom;
      control.peaks.peaks.push_back(p);
    }
    r.tables = {prime, control};
    r.table_labels = {"prime", "control"};
    return r;
  };
  REQUIRE(acceptance_checks(cfg, make_result(10.0, 0.0, false))[0].pass);
  REQUIRE(acceptance_checks(cfg, make_result(10.0, 2.0, true))[0].pass);
  REQUIRE_FALSE(acceptance_checks(cfg, make_result(10.0, 6.0, true))[0].pass);
}

TEST_CASE("cli runs the staged commands") {
  const std::string base = fresh_dir("cli");
  const std::string seq_dir = base + "/seq";
  const std::string hist_dir = base + "/hist";
  const std::string sig_dir = base + "/sig";
  const std::string spec_dir = base + "/spec";
  const std::string peak_dir = base + "/peak";

  REQUIRE(run_cli("seq --kind primes --count 200 --out " + seq_dir) == 0);
  REQUIRE(fs::exists(fs::path(seq_dir) / "sequence.csv"));
  const IntegerSequence seq = read_sequence_csv(seq_dir + "/sequence.csv");
  REQUIRE(seq.values.size() == 200);
  REQUIRE(seq.values.front() == 2);

  REQUIRE(run_cli("hist --in " + seq_dir + "/sequence.csv --mode allpairs --max-diff 100 --out " +
                  hist_dir) == 0);
  REQUIRE(fs::exists(fs::path(hist_dir) / "histogram.csv"));
  REQUIRE(fs::exists(fs::path(hist_dir) / "spikes.json"));

  REQUIRE(run_cli("signal --in " + seq_dir + "/sequence.csv --method generalized --dt 0.5 "
                  "--truncation 16 --out " + sig_dir) == 0);
  REQUIRE(fs::exists(fs::path(sig_dir) / "signal.csv"));

  REQUIRE(run_cli("spectrum --in " + sig_dir + "/signal.csv --out " + spec_dir) == 0);
  REQUIRE(fs::exists(fs::path(spec_dir) / "spectrum.csv"));

  REQUIRE(run_cli("peaks --in " + spec_dir + "/spectrum.csv --ratio 2 --out " + peak_dir) == 0);
  REQUIRE(fs::exists(fs::path(peak_dir) / "peaks.csv"));
  const PeakTable peaks = read_peaks_csv(peak_dir + "/peaks.csv");
  REQUIRE_FALSE(peaks.peaks.empty());
}

TEST_CASE("cli rejects bad invocations with exit 2") {
  const std::string base = fresh_dir("cli_bad");
  REQUIRE(run_cli("seq --kind nosuch --out " + base) == 2);
  REQUIRE(run_cli("nosuchcommand") == 2);
  REQUIRE(run_cli("hist") == 2);  // missing --in
  REQUIRE(run_cli("experiment NoSuchId --out " + base) == 2);
}

TEST_CASE("cli experiment check gates on the reference values") {
  const std::string base = fresh_dir("cli_check");
  const std::string cfg_path = base + "/tiny.conf";
  // 300 primes cannot reach the difference-2310 spike, so --check must fail
  write_text_file(cfg_path, "seq.count = 300\nhist.max_diff = 400\n");
  REQUIRE(run_cli("experiment Hist2 --config " + cfg_path + " --out " + base + "/hist2 "
                  "--check") == 4);
  // without --check the same run exits cleanly
  REQUIRE(run_cli("experiment Hist2 --config " + cfg_path + " --out " + base + "/hist2b") == 0);
  // an experiment with no reference targets reports success under --check
  write_text_file(cfg_path, "seq.bound = 2000\nkernel.truncation = 64\n");
  REQUIRE(run_cli("experiment Seq1Run --config " + cfg_path + " --out " + base + "/seq1 "
                  "--check") == 0);
}

TEST_CASE("cli verify reports digest status") {
  const std::string base = fresh_dir("cli_verify");
  const std::string cfg_path = base + "/tiny.conf";
  write_text_file(cfg_path, "seq.count = 120\nkernel.truncation = 16\nemit.svg = false\n");
  REQUIRE(run_cli("experiment GeneralizedTable2 --config " + cfg_path + " --out " + base +
                  "/run") == 0);
  REQUIRE(run_cli("verify " + base + "/run/manifest.json") == 0);
  write_text_file(base + "/run/peaks.csv", "rank,frequency,wavelength,magnitude,prominence\n");
  REQUIRE(run_cli("verify " + base + "/run/manifest.json") == 3);
  REQUIRE(run_cli("verify " + base + "/nonexistent.json") == 3);
  write_text_file(base + "/empty.json", "{}\n");
  REQUIRE(run_cli("verify " + base + "/empty.json") == 2);
}

TEST_CASE("cli flags override config files") {
  const std::string base = fresh_dir("cli_precedence");
  const std::string cfg_path = base + "/layered.conf";
  write_text_file(cfg_path,
                  "seq.count = 150\nkernel.truncation = 128\ngrid.dt = 0.5\nemit.svg = false\n");
  REQUIRE(run_cli("experiment GeneralizedTable2 --config " + cfg_path + " --truncation 64 "
                  "--out " + base + "/run") == 0);
  const nlohmann::json manifest = read_json_file(base + "/run/manifest.json");
  REQUIRE(manifest["config"]["kernel.truncation"] == "64");
  REQUIRE(manifest["config"]["grid.dt"] == "0.5");
  REQUIRE(manifest["config"]["seq.count"] == "150");
  REQUIRE(manifest["config"]["run.out"] == base + "/run");
}
