#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "primesig/errors.hpp"
#include "primesig/gap_histogram.hpp"
#include "primesig/grid.hpp"
#include "primesig/sequences.hpp"
#include "primesig/spectrum.hpp"

namespace primesig {

// Shortest decimal form that parses back to the same double. Locale-free
// and deterministic, which is what lets byte-identical outputs double as a
// determinism check.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw StageError("format", "double conversion failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const auto res = std::from_chars(b, b + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != b + s.size())
    throw ValidationError("bad numeric field: " + s);
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const char* b = s.data();
  const auto res = std::from_chars(b, b + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != b + s.size())
    throw ValidationError("bad integer field: " + s);
  return v;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

// Reads a CSV with the exact expected header; returns data rows as fields.
inline std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                                      const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw ValidationError("unexpected csv header in " + path + ": " + line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

}  // namespace detail

// ---- sequences: index,value ------------------------------------------------

inline void write_sequence_csv(const std::string& path, const IntegerSequence& seq) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < seq.values.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += std::to_string(seq.values[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

inline nlohmann::json sequence_sidecar(const IntegerSequence& seq) {
  nlohmann::json j;
  j["kind"] = to_string(seq.kind);
  j["count"] = seq.values.size();
  if (!seq.values.empty()) {
    j["min"] = seq.values.front();
    j["max"] = seq.values.back();
  }
  j["params"] = seq.params;
  return j;
}

inline IntegerSequence read_sequence_csv(const std::string& path) {
  IntegerSequence seq;
  seq.kind = SequenceKind::Custom;
  for (const auto& row : detail::read_csv(path, "index,value")) {
    if (row.size() != 2) throw ValidationError("bad sequence row in " + path);
    seq.values.push_back(parse_u64(row[1]));
  }
  if (!seq.strictly_increasing())
    throw ValidationError("sequence not strictly increasing: " + path);
  return seq;
}

// ---- histograms: difference,count -------------------------------------------

inline void write_histogram_csv(const std::string& path, const GapHistogram& h) {
  std::string out = "difference,count\n";
  for (const auto& [d, c] : h.counts) {
    out += std::to_string(d);
    out += ',';
    out += std::to_string(c);
    out += '\n';
  }
  write_text_file(path, out);
}

inline nlohmann::json histogram_sidecar(const GapHistogram& h) {
  nlohmann::json j;
  j["mode"] = to_string(h.mode);
  if (h.mode == PairingMode::AllPairs) j["max_diff"] = h.max_diff;
  j["distinct_differences"] = h.counts.size();
  j["total_pairs"] = h.total();
  return j;
}

inline GapHistogram read_histogram_csv(const std::string& path) {
  GapHistogram h;
  for (const auto& row : detail::read_csv(path, "difference,count")) {
    if (row.size() != 2) throw ValidationError("bad histogram row in " + path);
    h.counts[parse_u64(row[0])] = parse_u64(row[1]);
  }
  h.max_diff = h.max_difference();
  return h;
}

inline nlohmann::json spike_report_json(const SpikeReport& r) {
  nlohmann::json j;
  j["window"] = r.window;
  j["ratio_threshold"] = r.ratio_threshold;
  nlohmann::json spikes = nlohmann::json::array();
  for (const auto& s : r.spikes) {
    nlohmann::json e;
    e["difference"] = s.difference;
    e["count"] = s.count;
    e["local_baseline"] = s.local_baseline;
    if (std::isfinite(s.ratio))
      e["ratio"] = s.ratio;
    else
      e["ratio"] = "inf";
    spikes.push_back(e);
  }
  j["spikes"] = spikes;
  return j;
}

// ---- signals: t,amplitude ----------------------------------------------------

inline void write_signal_csv(const std::string& path, const Signal& sig) {
  std::string out = "t,amplitude\n";
  for (std::size_t i = 0; i < sig.amplitudes.size(); ++i) {
    out += format_double(sig.grid.point(i));
    out += ',';
    out += format_double(sig.amplitudes[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

inline nlohmann::json signal_sidecar(const Signal& sig) {
  nlohmann::json j;
  j["grid"] = {{"origin", sig.grid.origin}, {"spacing", sig.grid.spacing}, {"count", sig.grid.count}};
  j["provenance"] = sig.provenance;
  return j;
}

inline Signal read_signal_csv(const std::string& path) {
  const auto rows = detail::read_csv(path, "t,amplitude");
  if (rows.size() < 2) throw ValidationError("signal too short: " + path);
  Signal sig;
  std::vector<double> ts;
  for (const auto& row : rows) {
    if (row.size() != 2) throw ValidationError("bad signal row in " + path);
    ts.push_back(parse_double(row[0]));
    sig.amplitudes.push_back(parse_double(row[1]));
  }
  sig.grid.origin = ts.front();
  sig.grid.count = ts.size();
  sig.grid.spacing = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  if (!(sig.grid.spacing > 0.0)) throw ValidationError("non-increasing grid in " + path);
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (std::abs(sig.grid.point(i) - ts[i]) > 1e-9 * std::max(1.0, std::abs(ts[i])))
      throw ValidationError("grid not uniform in " + path);
  return sig;
}

// ---- spectra: bin,frequency,wavelength,magnitude ------------------------------

inline void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
  std::string out = "bin,frequency,wavelength,magnitude\n";
  for (std::size_t b = 0; b < spec.size(); ++b) {
    out += std::to_string(b);
    out += ',';
    out += format_double(spec.frequency(b));
    out += ',';
    out += b == 0 ? "" : format_double(spec.wavelength(b));
    out += ',';
    out += format_double(spec.magnitudes[b]);
    out += '\n';
  }
  write_text_file(path, out);
}

inline nlohmann::json spectrum_sidecar(const Spectrum& spec) {
  nlohmann::json j;
  j["dt"] = spec.dt;
  j["padded_length"] = spec.padded_length;
  j["signal_length"] = spec.signal_length;
  j["window"] = to_string(spec.window);
  j["mean_subtracted"] = spec.mean_subtracted;
  j["bin_step"] = spec.bin_step();
  return j;
}

inline Spectrum read_spectrum_csv(const std::string& path) {
  const auto rows = detail::read_csv(path, "bin,frequency,wavelength,magnitude");
  if (rows.size() < 3) throw ValidationError("spectrum too short: " + path);
  Spectrum spec;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 4) throw ValidationError("bad spectrum row in " + path);
    if (parse_u64(row[0]) != i) throw ValidationError("non-contiguous bins in " + path);
    spec.magnitudes.push_back(parse_double(row[3]));
  }
  // Recover the bin step from bin 1; dt and padded length reconstruct from
  // the one-sided bin count so wavelength queries keep working.
  const double f1 = parse_double(rows[1][1]);
  if (!(f1 > 0.0)) throw ValidationError("bad frequency column in " + path);
  spec.padded_length = (rows.size() - 1) * 2;
  spec.dt = 1.0 / (f1 * static_cast<double>(spec.padded_length));
  spec.signal_length = spec.padded_length;
  return spec;
}

// ---- peaks: rank,frequency,wavelength,magnitude,prominence ---------------------

inline void write_peaks_csv(const std::string& path, const PeakTable& table) {
  std::string out = "rank,frequency,wavelength,magnitude,prominence\n";
  for (std::size_t i = 0; i < table.peaks.size(); ++i) {
    const Peak& p = table.peaks[i];
    out += std::to_string(i + 1);
    out += ',';
    out += format_double(p.frequency);
    out += ',';
    out += format_double(p.wavelength);
    out += ',';
    out += format_double(p.magnitude);
    out += ',';
    out += format_double(p.prominence);
    out += '\n';
  }
  write_text_file(path, out);
}

inline nlohmann::json peaks_sidecar(const PeakTable& table) {
  nlohmann::json j;
  j["count"] = table.peaks.size();
  j["median_magnitude"] = table.median_magnitude;
  j["min_prominence_ratio"] = table.params.min_prominence_ratio;
  j["min_bin"] = table.params.min_bin;
  j["max_bin"] = table.params.max_bin;
  j["merge_radius_bins"] = table.params.merge_radius_bins;
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& p : table.peaks) bins.push_back(p.bin);
  j["bins"] = bins;
  return j;
}

inline PeakTable read_peaks_csv(const std::string& path) {
  PeakTable table;
  for (const auto& row : detail::read_csv(path, "rank,frequency,wavelength,magnitude,prominence")) {
    if (row.size() != 5) throw ValidationError("bad peaks row in " + path);
    Peak p;
    p.frequency = parse_double(row[1]);
    p.wavelength = parse_double(row[2]);
    p.magnitude = parse_double(row[3]);
    p.prominence = parse_double(row[4]);
    table.peaks.push_back(p);
  }
  return table;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("bad json: " + path);
  return j;
}

}  // namespace primesig
