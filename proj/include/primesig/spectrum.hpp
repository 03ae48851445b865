#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "primesig/errors.hpp"
#include "primesig/fft.hpp"
#include "primesig/grid.hpp"

namespace primesig {

enum class WindowKind { Rectangular, Hann };

inline const char* to_string(WindowKind w) {
  return w == WindowKind::Rectangular ? "rectangular" : "hann";
}

inline WindowKind window_kind_from_string(const std::string& s) {
  if (s == "rectangular") return WindowKind::Rectangular;
  if (s == "hann") return WindowKind::Hann;
  throw ValidationError("unknown window kind: " + s);
}

struct SpectrumOptions {
  WindowKind window = WindowKind::Rectangular;
  bool subtract_mean = true;  // removes the DC pedestal of indicator-like signals
  bool pad_to_pow2 = true;
};

// One-sided magnitude spectrum. Bin b corresponds to frequency
// b / (padded_length * dt); wavelength is its reciprocal.
struct Spectrum {
  std::vector<double> magnitudes;  // bins 0 .. padded_length/2
  double dt = 1.0;
  std::size_t padded_length = 0;
  std::size_t signal_length = 0;
  WindowKind window = WindowKind::Rectangular;
  bool mean_subtracted = true;

  double bin_step() const { return 1.0 / (static_cast<double>(padded_length) * dt); }
  double frequency(std::size_t bin) const { return static_cast<double>(bin) * bin_step(); }
  double wavelength(std::size_t bin) const {
    if (bin == 0) throw ValidationError("zero frequency has no wavelength");
    return 1.0 / frequency(bin);
  }
  std::size_t size() const { return magnitudes.size(); }
};

inline double wavelength_of(double frequency) {
  if (!(frequency > 0.0)) throw ValidationError("wavelength requires positive frequency");
  return 1.0 / frequency;
}

// Magnitude spectrum of a uniformly sampled signal: optional mean removal,
// optional Hann taper over the original extent, zero-padding to a power of
// two, one transform.
inline Spectrum magnitude_spectrum(const Signal& signal, const SpectrumOptions& opts = {}) {
  const std::size_t n = signal.amplitudes.size();
  if (n < 16) throw ValidationError("signal too short for a spectrum");
  if (!(signal.grid.spacing > 0.0)) throw ValidationError("grid spacing must be positive");

  std::vector<double> work(signal.amplitudes);
  if (opts.subtract_mean) {
    const double mean = std::accumulate(work.begin(), work.end(), 0.0) / static_cast<double>(n);
    for (double& v : work) v -= mean;
  }
  if (opts.window == WindowKind::Hann) {
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
      work[i] *= 0.5 * (1.0 - std::cos(phase));
    }
  }

  const std::size_t m = opts.pad_to_pow2 ? next_pow2(n) : n;
  std::vector<std::complex<double>> buf(m);
  for (std::size_t i = 0; i < n; ++i) buf[i] = work[i];
  buf = dft(std::move(buf), false);

  Spectrum spec;
  spec.dt = signal.grid.spacing;
  spec.padded_length = m;
  spec.signal_length = n;
  spec.window = opts.window;
  spec.mean_subtracted = opts.subtract_mean;
  spec.magnitudes.resize(m / 2 + 1);
  for (std::size_t b = 0; b <= m / 2; ++b) spec.magnitudes[b] = std::abs(buf[b]);
  return spec;
}

struct Peak {
  std::size_t bin = 0;
  double frequency = 0.0;   // parabolically refined
  double wavelength = 0.0;  // 1 / frequency
  double magnitude = 0.0;
  double prominence = 0.0;  // topographic: drop to the highest saddle
};

struct PeakDetectParams {
  double min_prominence_ratio = 4.0;  // relative to the in-band median magnitude
  std::size_t min_bin = 1;
  std::size_t max_bin = 0;  // 0 means the last bin
  std::size_t merge_radius_bins = 8;

  void validate() const {
    if (!(min_prominence_ratio > 0.0)) throw ValidationError("prominence ratio must be positive");
    if (min_bin < 1) throw ValidationError("min_bin must be at least 1");
  }
};

struct PeakTable {
  std::vector<Peak> peaks;  // sorted by descending prominence
  PeakDetectParams params;
  double median_magnitude = 0.0;  // median over the searched band

  const Peak* best_match(double wavelength, double rel_tol) const {
    const Peak* best = nullptr;
    for (const auto& p : peaks) {
      if (std::abs(p.wavelength - wavelength) / wavelength > rel_tol) continue;
      if (!best || p.prominence > best->prominence) best = &p;
    }
    return best;
  }
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

// Parabolic vertex through (-1, l), (0, c), (+1, r) on log magnitudes,
// clamped to half a bin. Log values make the fit match the near-Gaussian
// main lobe of a windowed tone; any non-positive magnitude falls back to
// the linear values.
inline double parabolic_offset(double l, double c, double r) {
  if (l > 0.0 && c > 0.0 && r > 0.0) {
    l = std::log(l);
    c = std::log(c);
    r = std::log(r);
  }
  const double denom = l - 2.0 * c + r;
  if (denom == 0.0) return 0.0;
  const double delta = 0.5 * (l - r) / denom;
  return std::clamp(delta, -0.5, 0.5);
}

}  // namespace detail

// Local maxima of the spectrum ranked by topographic prominence: process
// bins from highest magnitude down, growing islands and recording, each
// time two islands meet, how far the lesser summit drops to that saddle.
// Peaks below min_prominence_ratio times the in-band median are noise;
// survivors within merge_radius_bins of a stronger survivor are absorbed.
inline PeakTable detect_peaks(const Spectrum& spec, const PeakDetectParams& params = {}) {
  params.validate();
  const std::size_t last = spec.size() == 0 ? 0 : spec.size() - 1;
  const std::size_t lo = std::max<std::size_t>(params.min_bin, 1);
  const std::size_t hi = params.max_bin == 0 ? last : std::min(params.max_bin, last);
  if (lo + 2 > hi) throw ValidationError("search band needs at least three bins");
  const std::size_t width = hi - lo + 1;
  const double* mag = spec.magnitudes.data();

  std::vector<double> band(mag + lo, mag + hi + 1);
  std::nth_element(band.begin(), band.begin() + width / 2, band.end());
  double median = band[width / 2];
  if (width % 2 == 0) {
    const double upper = band[width / 2];
    std::nth_element(band.begin(), band.begin() + width / 2 - 1, band.end());
    median = 0.5 * (band[width / 2 - 1] + upper);
  }

  // Watershed over the band, highest bins first; ties resolved by index so
  // the result is independent of sort implementation details.
  std::vector<std::size_t> order(width);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mag[lo + a] != mag[lo + b]) return mag[lo + a] > mag[lo + b];
    return a < b;
  });

  detail::UnionFind uf(width);
  std::vector<bool> active(width, false);
  std::vector<std::size_t> summit(width);  // component root -> summit offset
  std::vector<double> prominence(width, -1.0);

  for (std::size_t idx : order) {
    active[idx] = true;
    summit[idx] = idx;
    for (const std::size_t nb : {idx == 0 ? idx : idx - 1, idx + 1 >= width ? idx : idx + 1}) {
      if (nb == idx || !active[nb]) continue;
      const std::size_t ra = uf.find(idx);
      const std::size_t rb = uf.find(nb);
      if (ra == rb) continue;
      std::size_t sa = summit[ra];
      std::size_t sb = summit[rb];
      // The lesser summit dies at this saddle (current bin).
      if (mag[lo + sa] > mag[lo + sb] || (mag[lo + sa] == mag[lo + sb] && sa < sb))
        std::swap(sa, sb);
      prominence[sa] = mag[lo + sa] - mag[lo + idx];
      uf.parent[ra] = rb;
      summit[uf.find(rb)] = sb;
    }
  }
  // The last surviving summit never met a rival; measure it against the
  // lowest bin of the band.
  if (width > 0) {
    const std::size_t top = order.front();
    const double floor = mag[lo + order.back()];
    if (prominence[top] < 0.0) prominence[top] = mag[lo + top] - floor;
  }

  const double threshold = params.min_prominence_ratio * median;
  std::vector<Peak> raw;
  for (std::size_t off = 0; off < width; ++off) {
    const std::size_t b = lo + off;
    if (b == 0 || b + 1 > last) continue;
    if (!(mag[b] > mag[b - 1] && mag[b] > mag[b + 1])) continue;  // strict local max
    if (prominence[off] < 0.0) continue;
    if (prominence[off] < threshold) continue;
    Peak p;
    p.bin = b;
    p.magnitude = mag[b];
    p.prominence = prominence[off];
    raw.push_back(p);
  }

  std::sort(raw.begin(), raw.end(), [](const Peak& a, const Peak& b) {
    if (a.prominence != b.prominence) return a.prominence > b.prominence;
    return a.bin < b.bin;
  });

  // Strongest-first suppression of near-duplicates.
  std::vector<Peak> kept;
  for (const Peak& p : raw) {
    bool shadowed = false;
    for (const Peak& q : kept) {
      const std::size_t d = p.bin > q.bin ? p.bin - q.bin : q.bin - p.bin;
      if (d <= params.merge_radius_bins) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) kept.push_back(p);
  }

  for (Peak& p : kept) {
    const double delta = detail::parabolic_offset(mag[p.bin - 1], mag[p.bin], mag[p.bin + 1]);
    p.frequency = (static_cast<double>(p.bin) + delta) * spec.bin_step();
    p.wavelength = 1.0 / p.frequency;
  }

  PeakTable table;
  table.peaks = std::move(kept);
  table.params = params;
  table.median_magnitude = median;
  return table;
}

struct PeakMatch {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double wavelength_a = 0.0;
  double wavelength_b = 0.0;
  double relative_error = 0.0;
};

struct PeakTableComparison {
  std::vector<PeakMatch> matched;
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_b;
  double wavelength_tolerance = 0.0;
};

// Greedy wavelength alignment of two peak tables: walk table a in rank
// order, pairing each peak with the closest unclaimed peak of b within the
// relative tolerance.
inline PeakTableComparison compare_peak_tables(const PeakTable& a, const PeakTable& b,
                                               double rel_tol) {
  if (!(rel_tol > 0.0)) throw ValidationError("tolerance must be positive");
  PeakTableComparison out;
  out.wavelength_tolerance = rel_tol;
  std::vector<bool> claimed(b.peaks.size(), false);
  for (std::size_t i = 0; i < a.peaks.size(); ++i) {
    const double wa = a.peaks[i].wavelength;
    std::size_t best = b.peaks.size();
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.peaks.size(); ++j) {
      if (claimed[j]) continue;
      const double err = std::abs(b.peaks[j].wavelength - wa) / wa;
      if (err <= rel_tol && err < best_err) {
        best = j;
        best_err = err;
      }
    }
    if (best < b.peaks.size()) {
      claimed[best] = true;
      out.matched.push_back({i, best, wa, b.peaks[best].wavelength, best_err});
    } else {
      out.unmatched_a.push_back(i);
    }
  }
  for (std::size_t j = 0; j < b.peaks.size(); ++j)
    if (!claimed[j]) out.unmatched_b.push_back(j);
  return out;
}

}  // namespace primesig
