#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "primesig/errors.hpp"

namespace primesig {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace detail {

// Iterative radix-2 transform, in place. Twiddles come from one table of
// n/2 unit-circle values computed directly per index, so rounding does not
// accumulate across stages the way repeated multiplication would.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n < 2) return;
  if (!is_pow2(n)) throw ValidationError("radix-2 transform needs a power-of-two length");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(ang), std::sin(ang)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t block = 0; block < n; block += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = twiddle[k * stride];
        std::complex<double>& u = a[block + k];
        std::complex<double>& v = a[block + k + len / 2];
        const std::complex<double> wv = w * v;
        v = u - wv;
        u = u + wv;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= scale;
  }
}

// Chirp transform: expresses an arbitrary-length DFT as one convolution,
// carried out by zero-padded power-of-two transforms. The k^2 phase is
// reduced mod 2n before the trig call to keep angles small and exact.
inline std::vector<std::complex<double>> bluestein(const std::vector<std::complex<double>>& x,
                                                   bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }

  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  for (std::size_t k = 0; k < n; ++k) {
    b[k] = std::conj(chirp[k]);
    if (k != 0) b[m - k] = std::conj(chirp[k]);
  }
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, true);

  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
  }
  return out;
}

}  // namespace detail

// Discrete Fourier transform of any length: radix-2 when the length is a
// power of two, chirp transform otherwise. The inverse includes the 1/n
// normalization.
inline std::vector<std::complex<double>> dft(std::vector<std::complex<double>> x,
                                             bool inverse = false) {
  if (x.size() < 2) return x;
  if (is_pow2(x.size())) {
    detail::fft_pow2(x, inverse);
    return x;
  }
  return detail::bluestein(x, inverse);
}

}  // namespace primesig
