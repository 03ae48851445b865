#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "primesig/classical_sampling.hpp"
#include "primesig/errors.hpp"
#include "primesig/gap_histogram.hpp"
#include "primesig/generalized_sampling.hpp"
#include "primesig/io.hpp"
#include "primesig/sequences.hpp"
#include "primesig/spectrum.hpp"

namespace primesig {

// Flat key = value text. Lines starting with # are comments; keys are
// dotted lowercase; values are bare tokens (no quoting needed anywhere in
// the schema).
struct KeyValueConfig {
  std::map<std::string, std::string> values;

  static KeyValueConfig parse_text(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ValidationError("config line " + std::to_string(line_no) + " has no '='");
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + " has empty key");
      cfg.values[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    return parse_text(read_text_file(path));
  }

  bool has(const std::string& key) const { return values.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      return parse_double(it->second);
    } catch (const ValidationError&) {
      throw ValidationError("config key " + key + ": bad number '" + it->second + "'");
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      return parse_u64(it->second);
    } catch (const ValidationError&) {
      throw ValidationError("config key " + key + ": bad integer '" + it->second + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ValidationError("config key " + key + ": bad boolean '" + it->second + "'");
  }
};

enum class ExperimentId {
  Hist1,
  Hist2,
  ClassicalTable1,
  GeneralizedTable2,
  TranslationWindows,
  PoissonControl,
  Seq1Run,
  Seq2Run,
};

inline const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::Hist1: return "Hist1";
    case ExperimentId::Hist2: return "Hist2";
    case ExperimentId::ClassicalTable1: return "ClassicalTable1";
    case ExperimentId::GeneralizedTable2: return "GeneralizedTable2";
    case ExperimentId::TranslationWindows: return "TranslationWindows";
    case ExperimentId::PoissonControl: return "PoissonControl";
    case ExperimentId::Seq1Run: return "Seq1Run";
    case ExperimentId::Seq2Run: return "Seq2Run";
  }
  return "";
}

inline ExperimentId experiment_id_from_string(const std::string& s) {
  for (ExperimentId id : {ExperimentId::Hist1, ExperimentId::Hist2, ExperimentId::ClassicalTable1,
                          ExperimentId::GeneralizedTable2, ExperimentId::TranslationWindows,
                          ExperimentId::PoissonControl, ExperimentId::Seq1Run, ExperimentId::Seq2Run})
    if (s == to_string(id)) return id;
  throw ValidationError("unknown experiment id: " + s);
}

struct WindowRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

// Fully resolved experiment parameters. Defaults reproduce the reference
// runs; a config file overrides individual keys and the manifest echoes
// every resolved value back out.
struct ExperimentConfig {
  ExperimentId id = ExperimentId::GeneralizedTable2;

  // sequence
  std::uint64_t prime_count = 50000;
  std::uint64_t skip_first = 0;      // drop this many leading elements
  std::uint64_t seq1_bound = 209760;
  std::uint64_t seq2_count = 5871;
  std::uint64_t seed = 1;
  CramerMode cramer_mode = CramerMode::Density;
  std::vector<WindowRange> windows;  // TranslationWindows only

  // grid and kernels
  double dt = 0.25;
  SpeedScheme scheme = SpeedScheme::Centered;
  std::size_t truncation_count = 512;  // 0 = unlimited
  double singularity_epsilon = 1e-9;
  double omega_max = 0.5;
  double truncation_radius = 5000.0;  // 0 = unlimited

  // spectrum and peaks
  WindowKind window = WindowKind::Rectangular;
  bool subtract_mean = true;
  bool pad_to_pow2 = true;
  double peak_ratio = 4.0;
  double min_wavelength = 2.0;
  double max_wavelength = 500.0;
  std::size_t merge_radius_bins = 8;

  // histograms
  std::uint64_t hist_max_diff = 2400;
  unsigned spike_window = 20;
  double spike_ratio = 1.2;

  // run
  unsigned threads = 0;  // 0 = hardware default
  std::string out_dir;
  bool emit_svg = true;

  static ExperimentConfig defaults_for(ExperimentId id) {
    ExperimentConfig c;
    c.id = id;
    c.out_dir = std::string("out/") + to_string(id);
    switch (id) {
      case ExperimentId::Hist1:
        break;
      case ExperimentId::Hist2:
        c.skip_first = 1;  // drop 2: odd differences would swamp the parity structure
        break;
      case ExperimentId::ClassicalTable1:
        c.peak_ratio = 2.2;  // classical peaks barely clear the fluctuation floor
        break;
      case ExperimentId::GeneralizedTable2:
        break;
      case ExperimentId::TranslationWindows:
        c.windows = {{1, 10000}, {10001, 20000}, {20001, 30000}};
        break;
      case ExperimentId::PoissonControl:
        break;
      case ExperimentId::Seq1Run:
        break;
      case ExperimentId::Seq2Run:
        break;
    }
    return c;
  }

  void apply(const KeyValueConfig& kv) {
    prime_count = kv.get_u64("seq.count", prime_count);
    skip_first = kv.get_u64("seq.skip_first", skip_first);
    seq1_bound = kv.get_u64("seq.bound", seq1_bound);
    seq2_count = kv.get_u64("seq2.count", seq2_count);
    seed = kv.get_u64("seq.seed", seed);
    cramer_mode = cramer_mode_from_string(kv.get_string("seq.mode", to_string(cramer_mode)));
    if (kv.has("windows.ranges")) windows = parse_windows(kv.get_string("windows.ranges", ""));

    dt = kv.get_double("grid.dt", dt);
    scheme = speed_scheme_from_string(kv.get_string("kernel.scheme", to_string(scheme)));
    truncation_count = kv.get_u64("kernel.truncation", truncation_count);
    singularity_epsilon = kv.get_double("kernel.epsilon", singularity_epsilon);
    omega_max = kv.get_double("classical.omega", omega_max);
    truncation_radius = kv.get_double("classical.radius", truncation_radius);

    window = window_kind_from_string(kv.get_string("spectrum.window", to_string(window)));
    subtract_mean = kv.get_bool("spectrum.subtract_mean", subtract_mean);
    pad_to_pow2 = kv.get_bool("spectrum.pad_pow2", pad_to_pow2);
    peak_ratio = kv.get_double("peaks.ratio", peak_ratio);
    min_wavelength = kv.get_double("peaks.min_wavelength", min_wavelength);
    max_wavelength = kv.get_double("peaks.max_wavelength", max_wavelength);
    merge_radius_bins = kv.get_u64("peaks.merge_radius", merge_radius_bins);

    hist_max_diff = kv.get_u64("hist.max_diff", hist_max_diff);
    spike_window = static_cast<unsigned>(kv.get_u64("spikes.window", spike_window));
    spike_ratio = kv.get_double("spikes.ratio", spike_ratio);

    threads = static_cast<unsigned>(kv.get_u64("run.threads", threads));
    out_dir = kv.get_string("run.out", out_dir);
    emit_svg = kv.get_bool("emit.svg", emit_svg);
  }

  void validate() const {
    if (prime_count == 0) throw ValidationError("seq.count must be positive");
    if (!(dt > 0.0)) throw ValidationError("grid.dt must be positive");
    if (truncation_count != 0 && truncation_count < 8)
      throw ValidationError("kernel.truncation must be 0 (unlimited) or at least 8");
    if (!(omega_max > 0.0)) throw ValidationError("classical.omega must be positive");
    if (truncation_radius < 0.0) throw ValidationError("classical.radius must be nonnegative");
    if (!(peak_ratio > 0.0)) throw ValidationError("peaks.ratio must be positive");
    if (!(min_wavelength > 0.0) || !(max_wavelength > min_wavelength))
      throw ValidationError("peaks wavelength band is empty");
    if (hist_max_diff == 0) throw ValidationError("hist.max_diff must be positive");
    if (spike_window < 2) throw ValidationError("spikes.window must be at least 2");
    if (!(spike_ratio > 0.0)) throw ValidationError("spikes.ratio must be positive");
    if (id == ExperimentId::TranslationWindows) {
      if (windows.empty()) throw ValidationError("windows.ranges must not be empty");
      for (const auto& w : windows)
        if (w.hi <= w.lo) throw ValidationError("window range upper end must exceed lower end");
    }
    if (out_dir.empty()) throw ValidationError("run.out must not be empty");
  }

  // Echo of every resolved value, for the manifest.
  std::map<std::string, std::string> echo() const {
    std::map<std::string, std::string> m;
    m["experiment"] = to_string(id);
    m["seq.count"] = std::to_string(prime_count);
    m["seq.skip_first"] = std::to_string(skip_first);
    m["seq.bound"] = std::to_string(seq1_bound);
    m["seq2.count"] = std::to_string(seq2_count);
    m["seq.seed"] = std::to_string(seed);
    m["seq.mode"] = to_string(cramer_mode);
    if (!windows.empty()) m["windows.ranges"] = format_windows(windows);
    m["grid.dt"] = format_double(dt);
    m["kernel.scheme"] = to_string(scheme);
    m["kernel.truncation"] = std::to_string(truncation_count);
    m["kernel.epsilon"] = format_double(singularity_epsilon);
    m["classical.omega"] = format_double(omega_max);
    m["classical.radius"] = format_double(truncation_radius);
    m["spectrum.window"] = to_string(window);
    m["spectrum.subtract_mean"] = subtract_mean ? "true" : "false";
    m["spectrum.pad_pow2"] = pad_to_pow2 ? "true" : "false";
    m["peaks.ratio"] = format_double(peak_ratio);
    m["peaks.min_wavelength"] = format_double(min_wavelength);
    m["peaks.max_wavelength"] = format_double(max_wavelength);
    m["peaks.merge_radius"] = std::to_string(merge_radius_bins);
    m["hist.max_diff"] = std::to_string(hist_max_diff);
    m["spikes.window"] = std::to_string(spike_window);
    m["spikes.ratio"] = format_double(spike_ratio);
    m["run.threads"] = std::to_string(threads);
    m["run.out"] = out_dir;
    m["emit.svg"] = emit_svg ? "true" : "false";
    return m;
  }

  static std::vector<WindowRange> parse_windows(const std::string& text) {
    std::vector<WindowRange> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw ValidationError("window range needs lo:hi, got '" + item + "'");
      WindowRange w;
      w.lo = parse_u64(item.substr(0, colon));
      w.hi = parse_u64(item.substr(colon + 1));
      out.push_back(w);
    }
    if (out.empty()) throw ValidationError("windows.ranges is empty");
    return out;
  }

  static std::string format_windows(const std::vector<WindowRange>& ws) {
    std::string s;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(ws[i].lo) + ":" + std::to_string(ws[i].hi);
    }
    return s;
  }
};

}  // namespace primesig
