#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "primesig/errors.hpp"
#include "primesig/grid.hpp"
#include "primesig/parallel.hpp"
#include "primesig/sequences.hpp"

namespace primesig {

enum class SpeedScheme { Centered, Forward, Custom };

inline const char* to_string(SpeedScheme s) {
  switch (s) {
    case SpeedScheme::Centered: return "centered";
    case SpeedScheme::Forward: return "forward";
    case SpeedScheme::Custom: return "custom";
  }
  return "custom";
}

inline SpeedScheme speed_scheme_from_string(const std::string& s) {
  if (s == "centered") return SpeedScheme::Centered;
  if (s == "forward") return SpeedScheme::Forward;
  if (s == "custom") return SpeedScheme::Custom;
  throw ValidationError("unknown speed scheme: " + s);
}

// Sample points paired with per-point speeds. The speed plays the role of a
// local sample spacing: it sets how much weight the point carries in the
// kernel sums, and thereby how the effective bandwidth varies along the
// lattice.
struct SampleLattice {
  std::vector<double> points;
  std::vector<double> speeds;
  SpeedScheme scheme = SpeedScheme::Custom;

  std::size_t size() const { return points.size(); }

  void validate() const {
    if (points.size() != speeds.size()) throw ValidationError("points and speeds differ in length");
    if (points.empty()) throw ValidationError("empty lattice");
    for (std::size_t i = 1; i < points.size(); ++i)
      if (!(points[i] > points[i - 1])) throw ValidationError("points must be strictly increasing");
    for (double s : speeds)
      if (!(s > 0.0)) throw ValidationError("speeds must be positive");
  }
};

// Derives speeds from the point spacing. Centered uses the half-width of
// the two-sided gap, (t_{i+1} - t_{i-1})/2, with half the single adjacent
// gap at the ends; Forward uses t_{n+1} - t_n with the last value copied
// from its neighbor.
inline SampleLattice make_lattice(std::vector<double> points, SpeedScheme scheme) {
  if (points.size() < 2) throw ValidationError("need at least two points");
  SampleLattice lat;
  lat.points = std::move(points);
  lat.scheme = scheme;
  const std::size_t n = lat.points.size();
  lat.speeds.resize(n);
  if (scheme == SpeedScheme::Centered) {
    lat.speeds[0] = 0.5 * (lat.points[1] - lat.points[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
      lat.speeds[i] = 0.5 * (lat.points[i + 1] - lat.points[i - 1]);
    lat.speeds[n - 1] = 0.5 * (lat.points[n - 1] - lat.points[n - 2]);
  } else if (scheme == SpeedScheme::Forward) {
    for (std::size_t i = 0; i + 1 < n; ++i) lat.speeds[i] = lat.points[i + 1] - lat.points[i];
    lat.speeds[n - 1] = lat.speeds[n - 2];
  } else {
    throw ValidationError("custom scheme requires explicit speeds");
  }
  lat.validate();
  return lat;
}

inline SampleLattice make_lattice(const IntegerSequence& seq, SpeedScheme scheme) {
  std::vector<double> pts(seq.values.begin(), seq.values.end());
  return make_lattice(std::move(pts), scheme);
}

// Evaluation policy for lattice sums: how many nearest points participate
// (0 means all of them) and how close to a sample point the raw formulas
// are abandoned for their limit values.
struct KernelEvalConfig {
  std::size_t truncation_count = 0;
  double singularity_epsilon = 1e-9;

  void validate() const {
    if (truncation_count != 0 && truncation_count < 8)
      throw ValidationError("truncation count must be at least 8");
    if (!(singularity_epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  }

  bool unlimited() const { return truncation_count == 0; }
};

namespace detail {

// Index of the first lattice point >= t.
inline std::size_t first_geq(const std::vector<double>& pts, double t) {
  return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), t) - pts.begin());
}

// Contiguous index range [first, first+W) holding the W nearest points to
// t. The cost max(t - p[a], p[a+W-1] - t) is unimodal in a, so a local
// search from the centered start finds the optimum; ties keep the current
// window, which makes the result a pure function of (t, points, W).
inline std::pair<std::size_t, std::size_t> nearest_window(const std::vector<double>& pts,
                                                          double t, std::size_t W) {
  const std::size_t n = pts.size();
  if (W == 0 || W >= n) return {0, n};
  const auto cost = [&](std::size_t a) {
    return std::max(t - pts[a], pts[a + W - 1] - t);
  };
  const std::size_t i = first_geq(pts, t);
  std::size_t a = i > W / 2 ? i - W / 2 : 0;
  a = std::min(a, n - W);
  while (a > 0 && cost(a - 1) < cost(a)) --a;
  while (a + W < n && cost(a + 1) < cost(a)) ++a;
  return {a, a + W};
}

// Nearest lattice point to t (index), resolved toward the left on exact
// midpoints.
inline std::size_t nearest_index(const std::vector<double>& pts, double t) {
  const std::size_t i = first_geq(pts, t);
  if (i == 0) return 0;
  if (i == pts.size()) return pts.size() - 1;
  return (t - pts[i - 1] <= pts[i] - t) ? i - 1 : i;
}

}  // namespace detail

// g(t) = sum of speed / (t - point)^2 over the included window. Diverges at
// sample points; callers needing values there must use the kernel limit
// forms instead.
inline double g_function(double t, const SampleLattice& lattice, const KernelEvalConfig& cfg) {
  lattice.validate();
  cfg.validate();
  const auto [a, b] = detail::nearest_window(lattice.points, t, cfg.truncation_count);
  const std::size_t near = detail::nearest_index(lattice.points, t);
  if (near >= a && near < b && std::abs(t - lattice.points[near]) <= cfg.singularity_epsilon)
    throw PoleError("g evaluated at a sample point");
  double g = 0.0;
  for (std::size_t m = a; m < b; ++m) {
    const double inv = 1.0 / (t - lattice.points[m]);
    g += lattice.speeds[m] * inv * inv;
  }
  return g;
}

// Number of lattice points strictly between t and t_n (endpoints excluded).
inline std::size_t z_count(double t, double t_n, const SampleLattice& lattice) {
  const double lo = std::min(t, t_n);
  const double hi = std::max(t, t_n);
  const auto& pts = lattice.points;
  const auto begin = std::upper_bound(pts.begin(), pts.end(), lo);
  const auto end = std::lower_bound(pts.begin(), pts.end(), hi);
  return begin < end ? static_cast<std::size_t>(end - begin) : 0;
}

namespace detail {

// Locates t_n among the lattice points, tolerating epsilon-sized noise.
inline std::size_t require_lattice_index(const SampleLattice& lattice, double t_n, double eps) {
  const std::size_t i = nearest_index(lattice.points, t_n);
  if (std::abs(lattice.points[i] - t_n) > eps)
    throw ValidationError("t_n is not a lattice point");
  return i;
}

}  // namespace detail

// One-argument reconstruction kernel
//   G(t, t_n) = (-1)^z(t,t_n) * sqrt(speed_n) / |t - t_n| * g(t)^(-1/2),
// the function that is 1 at t_n, 0 at every other sample point, and
// interpolates in between. The magnitude |t - t_n| together with the
// parity factor keeps G continuous and even around t_n; z is counted on
// the full lattice so truncation never flips signs.
inline double kernel_g1(double t, double t_n, const SampleLattice& lattice,
                        const KernelEvalConfig& cfg) {
  lattice.validate();
  cfg.validate();
  const std::size_t n = detail::require_lattice_index(lattice, t_n, cfg.singularity_epsilon);
  const std::size_t near = detail::nearest_index(lattice.points, t);
  if (std::abs(t - lattice.points[near]) <= cfg.singularity_epsilon)
    return near == n ? 1.0 : 0.0;
  const std::size_t z = z_count(t, lattice.points[n], lattice);
  const double g = g_function(t, lattice, cfg);
  const double mag = std::sqrt(lattice.speeds[n]) / std::abs(t - lattice.points[n]) / std::sqrt(g);
  return (z & 1) ? -mag : mag;
}

// Two-argument kernel G(s,t) = f(s) * sum over m of
// speed_m / ((t - point_m)(s - point_m)) * f(t), with
// f(x) = (-1)^(points below x) * g(x)^(-1/2). The parity factors combine to
// (-1)^z(s,t), which is what makes the kernel continuous in each argument.
// When either argument sits on the lattice this reduces to kernel_g1.
inline double kernel_g2(double s, double t, const SampleLattice& lattice,
                        const KernelEvalConfig& cfg) {
  lattice.validate();
  cfg.validate();
  const auto& pts = lattice.points;
  const std::size_t near_s = detail::nearest_index(pts, s);
  if (std::abs(s - pts[near_s]) <= cfg.singularity_epsilon)
    return kernel_g1(t, pts[near_s], lattice, cfg);
  const std::size_t near_t = detail::nearest_index(pts, t);
  if (std::abs(t - pts[near_t]) <= cfg.singularity_epsilon)
    return kernel_g1(s, pts[near_t], lattice, cfg);

  const auto [as, bs] = detail::nearest_window(pts, s, cfg.truncation_count);
  const auto [at, bt] = detail::nearest_window(pts, t, cfg.truncation_count);
  const std::size_t a = std::min(as, at);
  const std::size_t b = std::max(bs, bt);
  double cross = 0.0;
  for (std::size_t m = a; m < b; ++m)
    cross += lattice.speeds[m] / ((t - pts[m]) * (s - pts[m]));

  const auto f = [&](double x, std::size_t below) {
    const double gx = g_function(x, lattice, cfg);
    const double v = 1.0 / std::sqrt(gx);
    return (below & 1) ? -v : v;
  };
  return f(s, detail::first_geq(pts, s)) * cross * f(t, detail::first_geq(pts, t));
}

struct GeneralizedReconstruction {
  Signal signal;
  // Max |truncated - untruncated| over a spread of probe grid points; zero
  // when the evaluation is already untruncated.
  double truncation_error_estimate = 0.0;
};

namespace detail {

// Reconstruction value at one off-lattice point: S / sqrt(g) where
//   g = sum speed_m / (t - p_m)^2
//   S = sum sign_m * sqrt(speed_m) * amp_m / |t - p_m|
// fused into one pass with a single division per term. c_t is the number
// of lattice points below t; sign parity follows from z counted on the
// full lattice on either side of t.
inline double reconstruct_value_at(double t, const std::vector<double>& pts,
                                   const std::vector<double>& speeds,
                                   const std::vector<double>& weighted_amp,
                                   std::size_t a, std::size_t b, std::size_t c_t) {
  double g = 0.0;
  double s = 0.0;
  // Parity of z for the window's first term; alternates with m thereafter.
  // Left of t (m < c_t): z = c_t - 1 - m. Right of t: z = m - c_t.
  for (std::size_t m = a; m < b; ++m) {
    const double inv = 1.0 / (t - pts[m]);
    g += speeds[m] * inv * inv;
    const std::size_t z = m < c_t ? c_t - 1 - m : m - c_t;
    const double abs_inv = m < c_t ? inv : -inv;
    s += (z & 1) ? -weighted_amp[m] * abs_inv : weighted_amp[m] * abs_inv;
  }
  return s / std::sqrt(g);
}

}  // namespace detail

// Reconstruction through the generalized kernel: at each grid point the
// amplitude is sum over the W nearest lattice points of
// kernel_g1(t, t_n) * amplitude_n. Grid points that land on the lattice
// (within epsilon) return the sample amplitude exactly.
inline GeneralizedReconstruction reconstruct_generalized(const SampleLattice& lattice,
                                                         const std::vector<double>& amplitudes,
                                                         const UniformGrid& grid,
                                                         const KernelEvalConfig& cfg,
                                                         unsigned threads = 1) {
  lattice.validate();
  cfg.validate();
  if (amplitudes.size() != lattice.size())
    throw ValidationError("amplitudes length must match lattice length");
  if (grid.count == 0) throw ValidationError("empty grid");

  const auto& pts = lattice.points;
  std::vector<double> weighted_amp(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i)
    weighted_amp[i] = std::sqrt(lattice.speeds[i]) * amplitudes[i];

  const auto value_at = [&](double t, std::size_t W) {
    const std::size_t near = detail::nearest_index(pts, t);
    if (std::abs(t - pts[near]) <= cfg.singularity_epsilon) return amplitudes[near];
    const auto [a, b] = detail::nearest_window(pts, t, W);
    const std::size_t c_t = detail::first_geq(pts, t);
    return detail::reconstruct_value_at(t, pts, lattice.speeds, weighted_amp, a, b, c_t);
  };

  GeneralizedReconstruction out;
  out.signal.grid = grid;
  out.signal.amplitudes.assign(grid.count, 0.0);
  parallel_for(grid.count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t gi = begin; gi < end; ++gi)
      out.signal.amplitudes[gi] = value_at(grid.point(gi), cfg.truncation_count);
  });

  if (!cfg.unlimited() && cfg.truncation_count < lattice.size()) {
    // Probe a spread of grid points against the untruncated sum.
    const std::size_t probes = std::min<std::size_t>(64, grid.count);
    double worst = 0.0;
    for (std::size_t k = 0; k < probes; ++k) {
      const std::size_t gi = probes == 1 ? 0 : k * (grid.count - 1) / (probes - 1);
      const double t = grid.point(gi);
      worst = std::max(worst, std::abs(value_at(t, cfg.truncation_count) - value_at(t, 0)));
    }
    out.truncation_error_estimate = worst;
  }

  out.signal.provenance["method"] = "generalized";
  out.signal.provenance["speed_scheme"] = to_string(lattice.scheme);
  out.signal.provenance["truncation_count"] =
      cfg.unlimited() ? "unlimited" : std::to_string(cfg.truncation_count);
  out.signal.provenance["truncation_error_estimate"] =
      std::to_string(out.truncation_error_estimate);
  return out;
}

}  // namespace primesig
