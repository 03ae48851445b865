#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "primesig/errors.hpp"
#include "primesig/sequences.hpp"

namespace primesig {

enum class PairingMode { Consecutive, AllPairs };

inline const char* to_string(PairingMode m) {
  return m == PairingMode::Consecutive ? "consecutive" : "allpairs";
}

inline PairingMode pairing_mode_from_string(const std::string& s) {
  if (s == "consecutive") return PairingMode::Consecutive;
  if (s == "allpairs") return PairingMode::AllPairs;
  throw ValidationError("unknown pairing mode: " + s);
}

struct GapHistogram {
  std::map<std::uint64_t, std::uint64_t> counts;
  PairingMode mode = PairingMode::Consecutive;
  std::uint64_t max_diff = 0;  // cap for AllPairs; 0 means not applicable

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [d, c] : counts) t += c;
    return t;
  }

  std::uint64_t count(std::uint64_t d) const {
    auto it = counts.find(d);
    return it == counts.end() ? 0 : it->second;
  }

  std::uint64_t max_difference() const {
    return counts.empty() ? 0 : counts.rbegin()->first;
  }
};

// Histogram of differences between consecutive elements.
inline GapHistogram consecutive_gaps(const IntegerSequence& seq) {
  if (seq.values.size() < 2) throw ValidationError("need at least two elements");
  if (!seq.strictly_increasing()) throw ValidationError("sequence must be strictly increasing");
  GapHistogram h;
  h.mode = PairingMode::Consecutive;
  for (std::size_t i = 1; i < seq.values.size(); ++i)
    ++h.counts[seq.values[i] - seq.values[i - 1]];
  return h;
}

// Histogram of differences over all element pairs, capped at max_diff.
// A sliding window keeps this O(N * average pairs per element) rather than
// O(N^2): for each i the partner index only ever moves forward.
inline GapHistogram pair_diff_histogram(const IntegerSequence& seq, std::uint64_t max_diff) {
  if (seq.values.size() < 2) throw ValidationError("need at least two elements");
  if (max_diff == 0) throw ValidationError("max_diff must be positive");
  if (!seq.strictly_increasing()) throw ValidationError("sequence must be strictly increasing");
  const auto& v = seq.values;
  std::vector<std::uint64_t> dense(max_diff + 1, 0);
  std::size_t j = 1;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (j <= i) j = i + 1;
    while (j < v.size() && v[j] - v[i] <= max_diff) ++j;
    for (std::size_t k = i + 1; k < j; ++k) ++dense[v[k] - v[i]];
  }
  GapHistogram h;
  h.mode = PairingMode::AllPairs;
  h.max_diff = max_diff;
  for (std::uint64_t d = 1; d <= max_diff; ++d)
    if (dense[d] > 0) h.counts[d] = dense[d];
  return h;
}

struct Spike {
  std::uint64_t difference = 0;
  std::uint64_t count = 0;
  double local_baseline = 0.0;  // median of same-parity neighbors
  double ratio = 0.0;           // count / baseline; +inf when baseline is 0
};

struct SpikeReport {
  std::vector<Spike> spikes;
  unsigned window = 0;
  double ratio_threshold = 0.0;
};

namespace detail {

// Median of same-parity counts within +-window of d, excluding d itself.
// Differences absent from the histogram contribute zeros, which is what
// keeps the baseline honest for sparse histograms.
inline double parity_neighborhood_median(const GapHistogram& h, std::uint64_t d,
                                         unsigned window, std::uint64_t domain_hi) {
  std::vector<std::uint64_t> vals;
  const std::uint64_t lo = d > window ? d - window : 1;
  const std::uint64_t hi = std::min<std::uint64_t>(domain_hi, d + window);
  for (std::uint64_t dd = lo; dd <= hi; ++dd) {
    if (dd == d || ((dd ^ d) & 1)) continue;
    vals.push_back(h.count(dd));
  }
  if (vals.empty()) return 0.0;
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  if (n % 2 == 1) return static_cast<double>(vals[n / 2]);
  return 0.5 * (static_cast<double>(vals[n / 2 - 1]) + static_cast<double>(vals[n / 2]));
}

}  // namespace detail

// Differences whose count is a strict local maximum among same-parity
// neighbors (distance 2 on each side) and at least `ratio` times the median
// of same-parity counts within +-window. Parity matters: for the primes
// beyond 2 every difference is even, so comparing against odd neighbors
// would make everything look like a spike.
inline SpikeReport find_spikes(const GapHistogram& h, unsigned window, double ratio) {
  if (window < 2) throw ValidationError("spike window must be at least 2");
  if (ratio <= 0.0) throw ValidationError("spike ratio must be positive");
  const std::uint64_t domain_hi =
      h.mode == PairingMode::AllPairs ? h.max_diff : h.max_difference();
  SpikeReport report;
  report.window = window;
  report.ratio_threshold = ratio;
  for (const auto& [d, c] : h.counts) {
    const std::uint64_t left = d > 2 ? h.count(d - 2) : 0;
    const std::uint64_t right = d + 2 <= domain_hi ? h.count(d + 2) : 0;
    if (c <= left || c <= right) continue;
    const double med = detail::parity_neighborhood_median(h, d, window, domain_hi);
    if (static_cast<double>(c) >= ratio * med) {
      Spike s;
      s.difference = d;
      s.count = c;
      s.local_baseline = med;
      s.ratio = med > 0.0 ? static_cast<double>(c) / med
                          : std::numeric_limits<double>::infinity();
      report.spikes.push_back(s);
    }
  }
  return report;
}

}  // namespace primesig
