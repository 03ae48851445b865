#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "primesig/errors.hpp"
#include "primesig/rng.hpp"

namespace primesig {

enum class SequenceKind { Primes, Primorials, Seq1, Seq2, Cramer, Custom };

inline const char* to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::Primes: return "primes";
    case SequenceKind::Primorials: return "primorials";
    case SequenceKind::Seq1: return "seq1";
    case SequenceKind::Seq2: return "seq2";
    case SequenceKind::Cramer: return "cramer";
    case SequenceKind::Custom: return "custom";
  }
  return "custom";
}

inline SequenceKind sequence_kind_from_string(const std::string& s) {
  if (s == "primes") return SequenceKind::Primes;
  if (s == "primorials") return SequenceKind::Primorials;
  if (s == "seq1") return SequenceKind::Seq1;
  if (s == "seq2") return SequenceKind::Seq2;
  if (s == "cramer") return SequenceKind::Cramer;
  if (s == "custom") return SequenceKind::Custom;
  throw ValidationError("unknown sequence kind: " + s);
}

// A strictly increasing list of positive integers plus a record of how it
// was generated, so downstream reports can echo the provenance.
struct IntegerSequence {
  std::vector<std::uint64_t> values;
  SequenceKind kind = SequenceKind::Custom;
  std::map<std::string, std::string> params;

  bool strictly_increasing() const {
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] <= values[i - 1]) return false;
    return true;
  }
};

// Caps on generation work. Exceeding one raises ResourceError rather than
// silently grinding; callers can pass a larger budget deliberately.
struct SequenceBudget {
  std::uint64_t max_count = 10'000'000;
  std::uint64_t max_sieve_limit = 2'000'000'000ull;
};

namespace detail {

// Plain sieve, used for base primes up to sqrt of the segmented range.
inline std::vector<std::uint64_t> small_primes_upto(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t p = 2; p * p <= limit; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t q = p * p; q <= limit; q += p) composite[q] = true;
  }
  for (std::uint64_t n = 2; n <= limit; ++n)
    if (!composite[n]) out.push_back(n);
  return out;
}

// Segmented sieve over [lo, hi], calling f(p) for each prime in order.
template <class F>
inline void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) {
  if (hi < 2 || hi < lo) return;
  lo = std::max<std::uint64_t>(lo, 2);
  const std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(hi))) + 1;
  const std::vector<std::uint64_t> base = small_primes_upto(root);
  constexpr std::uint64_t kSegment = 1u << 20;
  std::vector<bool> composite;
  for (std::uint64_t seg_lo = lo; seg_lo <= hi; seg_lo += kSegment) {
    const std::uint64_t seg_hi = std::min(hi, seg_lo + kSegment - 1);
    composite.assign(seg_hi - seg_lo + 1, false);
    for (std::uint64_t p : base) {
      if (p * p > seg_hi) break;
      std::uint64_t start = std::max(p * p, ((seg_lo + p - 1) / p) * p);
      for (std::uint64_t q = start; q <= seg_hi; q += p) composite[q - seg_lo] = true;
    }
    for (std::uint64_t n = seg_lo; n <= seg_hi; ++n)
      if (n >= 2 && !composite[n - seg_lo]) f(n);
  }
}

}  // namespace detail

// Asymptotic upper bound on the n-th prime, n*(ln n + ln ln n), valid for
// n >= 6; smaller n are covered by a constant.
inline std::uint64_t nth_prime_upper_bound(std::uint64_t n) {
  if (n < 6) return 13;
  const double nn = static_cast<double>(n);
  const double l = std::log(nn);
  return static_cast<std::uint64_t>(nn * (l + std::log(l))) + 1;
}

// First n primes, in order.
inline IntegerSequence primes_first(std::uint64_t n, const SequenceBudget& budget = {}) {
  if (n == 0) throw ValidationError("prime count must be positive");
  if (n > budget.max_count) throw ResourceError("prime count exceeds budget");
  const std::uint64_t limit = nth_prime_upper_bound(n);
  if (limit > budget.max_sieve_limit) throw ResourceError("sieve limit exceeds budget");
  IntegerSequence seq;
  seq.kind = SequenceKind::Primes;
  seq.params["count"] = std::to_string(n);
  seq.values.reserve(n);
  detail::for_each_prime(2, limit, [&](std::uint64_t p) {
    if (seq.values.size() < n) seq.values.push_back(p);
  });
  if (seq.values.size() < n) throw StageError("primes_first", "prime bound too small");
  return seq;
}

// Primes in the closed interval [lo, hi].
inline IntegerSequence primes_in_range(std::uint64_t lo, std::uint64_t hi,
                                       const SequenceBudget& budget = {}) {
  if (hi < lo) throw ValidationError("range upper end below lower end");
  if (hi > budget.max_sieve_limit) throw ResourceError("sieve limit exceeds budget");
  IntegerSequence seq;
  seq.kind = SequenceKind::Primes;
  seq.params["lo"] = std::to_string(lo);
  seq.params["hi"] = std::to_string(hi);
  detail::for_each_prime(lo, hi, [&](std::uint64_t p) { seq.values.push_back(p); });
  if (seq.values.size() > budget.max_count) throw ResourceError("prime count exceeds budget");
  return seq;
}

// Interval of x over which a primorial is predicted to be the most common
// gap between consecutive primes. The bounds overflow double for the larger
// rows, so they are kept as decimal strings.
struct ChampionReign {
  std::string lower;
  std::string upper;
};

struct PrimorialEntry {
  unsigned k = 0;               // 1-based rank: 1 -> 2, 2 -> 6, 3 -> 30, ...
  std::uint64_t value = 0;      // product of the first k primes
  std::optional<ChampionReign> reign;
};

struct PrimorialTable {
  std::vector<PrimorialEntry> entries;
};

// First k_max primorials with exact 64-bit values. Throws OverflowError
// past 15# (the 16th primorial exceeds 2^64). Reign predictions are
// attached for ranks 2 through 6, the range where they are tabulated.
inline PrimorialTable primorials(unsigned k_max) {
  if (k_max == 0) throw ValidationError("primorial count must be positive");
  static const std::map<unsigned, ChampionReign> kReigns = {
      {2, {"4.67e4", "2.32e8"}},
      {3, {"2.06e44", "5.24e150"}},
      {4, {"4.64e487", "4.01e2607"}},
      {5, {"8.78e7769", "1.72e60178"}},
      {6, {"9.70e134460", "1.72e1386286"}},
  };
  PrimorialTable table;
  std::uint64_t value = 1;
  unsigned k = 0;
  detail::for_each_prime(2, 64, [&](std::uint64_t p) {
    if (k >= k_max) return;
    if (value > std::numeric_limits<std::uint64_t>::max() / p)
      throw OverflowError("primorial " + std::to_string(k + 1) + " exceeds 64-bit range");
    value *= p;
    ++k;
    PrimorialEntry e;
    e.k = k;
    e.value = value;
    if (auto it = kReigns.find(k); it != kReigns.end()) e.reign = it->second;
    table.entries.push_back(e);
  });
  if (k < k_max) throw OverflowError("primorial " + std::to_string(k + 1) + " exceeds 64-bit range");
  return table;
}

inline IntegerSequence primorial_sequence(unsigned k_max) {
  PrimorialTable t = primorials(k_max);
  IntegerSequence seq;
  seq.kind = SequenceKind::Primorials;
  seq.params["count"] = std::to_string(k_max);
  for (const auto& e : t.entries) seq.values.push_back(e.value);
  return seq;
}

// Perfect squares and their doubles, merged and sorted: 1, 2, 4, 8, 9, ...
inline IntegerSequence seq1_up_to(std::uint64_t bound, const SequenceBudget& budget = {}) {
  if (bound == 0) throw ValidationError("bound must be positive");
  IntegerSequence seq;
  seq.kind = SequenceKind::Seq1;
  seq.params["bound"] = std::to_string(bound);
  for (std::uint64_t n = 1; n * n <= bound; ++n) seq.values.push_back(n * n);
  for (std::uint64_t n = 1; 2 * n * n <= bound; ++n) seq.values.push_back(2 * n * n);
  std::sort(seq.values.begin(), seq.values.end());
  // A square is never twice a square, so no duplicates to remove.
  if (seq.values.size() > budget.max_count) throw ResourceError("element count exceeds budget");
  return seq;
}

// Numbers expressible as a sum of two integer squares (zero allowed):
// 1, 2, 4, 5, 8, 9, 10, 13, ... Generated by marking a^2 + b^2 up to a
// bound that grows until m elements exist.
inline IntegerSequence seq2_first(std::uint64_t m, const SequenceBudget& budget = {}) {
  if (m == 0) throw ValidationError("element count must be positive");
  if (m > budget.max_count) throw ResourceError("element count exceeds budget");
  std::uint64_t bound = std::max<std::uint64_t>(64, m * 4);
  IntegerSequence seq;
  seq.kind = SequenceKind::Seq2;
  seq.params["count"] = std::to_string(m);
  for (;;) {
    if (bound > budget.max_sieve_limit) throw ResourceError("marking bound exceeds budget");
    std::vector<bool> marked(bound + 1, false);
    for (std::uint64_t a = 0; a * a <= bound; ++a)
      for (std::uint64_t b = a; a * a + b * b <= bound; ++b) marked[a * a + b * b] = true;
    seq.values.clear();
    for (std::uint64_t n = 1; n <= bound && seq.values.size() < m; ++n)
      if (marked[n]) seq.values.push_back(n);
    if (seq.values.size() == m) return seq;
    bound *= 2;
  }
}

enum class CramerMode { Density, MeanGap };

inline const char* to_string(CramerMode m) {
  return m == CramerMode::Density ? "density" : "mean_gap";
}

inline CramerMode cramer_mode_from_string(const std::string& s) {
  if (s == "density") return CramerMode::Density;
  if (s == "mean_gap") return CramerMode::MeanGap;
  throw ValidationError("unknown cramer mode: " + s);
}

// Random model of the primes. Density mode includes each integer n >= 3
// independently with probability 1/ln n; mean-gap mode draws i.i.d.
// geometric gaps whose mean matches ln of the expected largest element.
// Draw number n is tied to the integer n (density) or to the element index
// (mean-gap), so output depends only on (count, seed, mode).
inline IntegerSequence cramer_sample(std::uint64_t count, std::uint64_t seed,
                                     CramerMode mode = CramerMode::Density,
                                     const SequenceBudget& budget = {}) {
  if (count == 0) throw ValidationError("element count must be positive");
  if (count > budget.max_count) throw ResourceError("element count exceeds budget");
  CounterRng rng{seed};
  IntegerSequence seq;
  seq.kind = SequenceKind::Cramer;
  seq.params["count"] = std::to_string(count);
  seq.params["seed"] = std::to_string(seed);
  seq.params["mode"] = to_string(mode);
  seq.values.reserve(count);
  if (mode == CramerMode::Density) {
    for (std::uint64_t n = 3; seq.values.size() < count; ++n) {
      if (n > budget.max_sieve_limit) throw ResourceError("scan limit exceeds budget");
      if (rng.uniform(n) < 1.0 / std::log(static_cast<double>(n))) seq.values.push_back(n);
    }
  } else {
    const double mean_gap = std::log(static_cast<double>(nth_prime_upper_bound(count)));
    const double q = 1.0 - 1.0 / mean_gap;  // P(gap > k) = q^k, mean = mean_gap
    std::uint64_t x = 2;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double u = rng.uniform(i);
      std::uint64_t gap = 1;
      if (u > 0.0) gap = 1 + static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log(q)));
      x += gap;
      seq.values.push_back(x);
    }
  }
  return seq;
}

}  // namespace primesig
