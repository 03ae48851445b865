#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "primesig/errors.hpp"
#include "primesig/grid.hpp"
#include "primesig/parallel.hpp"
#include "primesig/sequences.hpp"

namespace primesig {

// sin(pi x) / (pi x), with the removable singularity filled in.
inline double normalized_sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

struct ClassicalBandParams {
  double omega_max = 0.5;  // bandlimit; sample spacing is 1/(2*omega_max)
};

// Reconstruction weight of the sample at t_n evaluated at t.
inline double sinc_kernel(double t, double t_n, ClassicalBandParams params) {
  return normalized_sinc(2.0 * params.omega_max * (t - t_n));
}

// Amplitudes attached to integer sample points. Points must be strictly
// increasing; amplitudes run parallel to them.
struct SampledSequence {
  std::vector<std::uint64_t> points;
  std::vector<double> amplitudes;
};

// 1.0 at lattice points that are members, 0.0 elsewhere. A member off the
// lattice simply never lights up a point.
inline std::vector<double> indicator_amplitudes(const std::vector<std::uint64_t>& lattice_points,
                                                const std::vector<std::uint64_t>& members) {
  std::vector<double> amps(lattice_points.size(), 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < lattice_points.size(); ++i) {
    while (j < members.size() && members[j] < lattice_points[i]) ++j;
    if (j < members.size() && members[j] == lattice_points[i]) amps[i] = 1.0;
  }
  return amps;
}

// Indicator samples of a sequence over the integer lattice 1..max(seq).
inline SampledSequence indicator_over_integers(const IntegerSequence& seq) {
  if (seq.values.empty()) throw ValidationError("empty sequence");
  if (!seq.strictly_increasing()) throw ValidationError("sequence must be strictly increasing");
  SampledSequence s;
  const std::uint64_t hi = seq.values.back();
  s.points.resize(hi);
  for (std::uint64_t n = 1; n <= hi; ++n) s.points[n - 1] = n;
  s.amplitudes = indicator_amplitudes(s.points, seq.values);
  return s;
}

struct ClassicalReconstruction {
  Signal signal;
  // Conservative tail bound: assumes every nonzero sample sits just outside
  // the truncation radius with no sign cancellation. Zero when unlimited.
  double truncation_error_bound = 0.0;
};

namespace detail {

inline double classical_tail_bound(const std::vector<double>& positions, double max_abs_amp,
                                   double omega_max, double radius) {
  if (!std::isfinite(radius) || positions.empty()) return 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < positions.size(); ++i)
    min_gap = std::min(min_gap, positions[i] - positions[i - 1]);
  if (!std::isfinite(min_gap)) min_gap = 1.0;  // single sample
  double sum = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i)
    sum += 1.0 / (radius + static_cast<double>(i) * min_gap);
  return max_abs_amp * sum / (std::numbers::pi * omega_max);
}

}  // namespace detail

// Shannon reconstruction: value(t) = sum over samples of
// amplitude * sinc(2*omega_max*(t - point)), restricted to samples within
// `truncation_radius` of t (pass +infinity for the full sum). Zero-amplitude
// samples are skipped up front, so indicator signals cost what their member
// count suggests, not what the lattice length suggests.
inline ClassicalReconstruction reconstruct_classical(const SampledSequence& samples,
                                                     ClassicalBandParams params,
                                                     const UniformGrid& grid,
                                                     double truncation_radius =
                                                         std::numeric_limits<double>::infinity(),
                                                     unsigned threads = 1) {
  if (samples.points.size() != samples.amplitudes.size())
    throw ValidationError("points and amplitudes differ in length");
  if (samples.points.empty()) throw ValidationError("no samples");
  if (!(params.omega_max > 0.0)) throw ValidationError("bandlimit must be positive");
  if (!(truncation_radius > 0.0)) throw ValidationError("truncation radius must be positive");
  if (grid.count == 0) throw ValidationError("empty grid");
  for (std::size_t i = 1; i < samples.points.size(); ++i)
    if (samples.points[i] <= samples.points[i - 1])
      throw ValidationError("sample points must be strictly increasing");

  // Struct-of-arrays view of the nonzero samples.
  std::vector<double> pos, amp, signed_amp;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < samples.points.size(); ++i) {
    const double a = samples.amplitudes[i];
    if (a == 0.0) continue;
    pos.push_back(static_cast<double>(samples.points[i]));
    amp.push_back(a);
    signed_amp.push_back((samples.points[i] & 1) ? -a : a);
    max_abs = std::max(max_abs, std::abs(a));
  }

  ClassicalReconstruction out;
  out.signal.grid = grid;
  out.signal.amplitudes.assign(grid.count, 0.0);
  out.truncation_error_bound =
      detail::classical_tail_bound(pos, max_abs, params.omega_max, truncation_radius);

  // At the integer lattice (omega_max exactly 1/2) the kernel collapses:
  // sinc(t - p) = (-1)^(n+p) * sin(pi r) / (pi (t - p)) where n is the
  // nearest integer to t and r = t - n. One sin() per grid point, one
  // division per sample.
  const bool integer_lattice_fast_path = params.omega_max == 0.5;
  const double two_omega = 2.0 * params.omega_max;

  parallel_for(grid.count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t gi = begin; gi < end; ++gi) {
      const double t = grid.point(gi);
      std::size_t lo = 0, hi = pos.size();
      if (std::isfinite(truncation_radius)) {
        lo = static_cast<std::size_t>(
            std::lower_bound(pos.begin(), pos.end(), t - truncation_radius) - pos.begin());
        hi = static_cast<std::size_t>(
            std::upper_bound(pos.begin(), pos.end(), t + truncation_radius) - pos.begin());
      }
      double acc = 0.0;
      if (integer_lattice_fast_path) {
        const double n = std::nearbyint(t);
        const double r = t - n;
        if (r == 0.0) {
          auto it = std::lower_bound(pos.begin(), pos.end(), n);
          if (it != pos.end() && *it == n) {
            const std::size_t idx = static_cast<std::size_t>(it - pos.begin());
            if (idx >= lo && idx < hi) acc = amp[idx];
          }
        } else {
          double dot = 0.0;
          for (std::size_t k = lo; k < hi; ++k) dot += signed_amp[k] / (t - pos[k]);
          const double parity = (static_cast<long long>(n) & 1) ? -1.0 : 1.0;
          acc = parity * std::sin(std::numbers::pi * r) / std::numbers::pi * dot;
        }
      } else {
        for (std::size_t k = lo; k < hi; ++k)
          acc += amp[k] * normalized_sinc(two_omega * (t - pos[k]));
      }
      out.signal.amplitudes[gi] = acc;
    }
  });

  out.signal.provenance["method"] = "classical";
  out.signal.provenance["omega_max"] = std::to_string(params.omega_max);
  out.signal.provenance["truncation_radius"] =
      std::isfinite(truncation_radius) ? std::to_string(truncation_radius) : "unlimited";
  out.signal.provenance["truncation_error_bound"] = std::to_string(out.truncation_error_bound);
  return out;
}

}  // namespace primesig
