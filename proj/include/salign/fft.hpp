// Copyright 2026  salign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "salign/error.hpp"

// Discrete Fourier transform used by every analysis module.  Power-of-two
// sizes go through an iterative radix-2 transform; every other size goes
// through Bluestein's chirp-z reduction onto a power-of-two convolution,
// so dft() accepts any length >= 1.

namespace salign {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline void fft_radix2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n < 2) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bluestein: x[n] e^{-i pi n^2 / N} convolved with the conjugate chirp.
inline std::vector<cplx> fft_bluestein(std::span<const cplx> x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for long inputs
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cplx(std::cos(ang), std::sin(ang));
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cplx> a(m, cplx(0.0, 0.0));
  std::vector<cplx> b(m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  for (std::size_t k = 0; k < n; ++k) {
    b[k] = std::conj(chirp[k]);
    if (k != 0) b[m - k] = std::conj(chirp[k]);
  }
  fft_radix2(a, false);
  fft_radix2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_radix2(a, true);
  std::vector<cplx> out(n);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
  return out;
}

}  // namespace detail

/// Forward DFT, any size. X[k] = sum_n x[n] e^{-i 2 pi k n / N}.
inline std::vector<cplx> dft(std::span<const cplx> x) {
  if (x.empty()) throw_error("dft: empty input");
  if (is_power_of_two(x.size())) {
    std::vector<cplx> a(x.begin(), x.end());
    detail::fft_radix2(a, false);
    return a;
  }
  return detail::fft_bluestein(x, false);
}

/// Inverse DFT, any size, with the 1/N factor applied.
inline std::vector<cplx> idft(std::span<const cplx> x) {
  if (x.empty()) throw_error("idft: empty input");
  std::vector<cplx> a;
  if (is_power_of_two(x.size())) {
    a.assign(x.begin(), x.end());
    detail::fft_radix2(a, true);
  } else {
    a = detail::fft_bluestein(x, true);
  }
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : a) v *= scale;
  return a;
}

inline std::vector<cplx> dft_real(std::span<const double> x) {
  std::vector<cplx> tmp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = cplx(x[i], 0.0);
  return dft(tmp);
}

}  // namespace salign
