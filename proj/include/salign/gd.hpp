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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "salign/dsp.hpp"
#include "salign/error.hpp"
#include "salign/fft.hpp"

// Group-delay syllable segmentation.  The smoothed short-term energy contour
// is treated as the magnitude spectrum of a fictitious signal; a causal
// lifter on its cepstrum yields a minimum-phase-like construction whose
// group delay peaks at energy lobes (syllable nuclei) and dips between them
// (syllable boundaries).  The method sees only the signal, so it can
// over-generate boundaries; downstream snapping keeps the nearest ones.

namespace salign {

// TODO: some GD formulations invert the energy first, swapping the roles of
// peaks and valleys; add an invert flag here if such contours are needed.
struct GdConfig {
  double wsf = 8.0;                   // window scale factor; lifter keeps ceil(M/wsf) coeffs
  double min_peak_prominence = 0.05;  // fraction of the tau dynamic range
  int energy_smoothing_frames = 5;    // moving-average width, odd
  double denom_floor = 1e-12;

  void validate() const {
    if (wsf < 1.0) throw_error("wsf must be >= 1, got ", wsf);
    if (min_peak_prominence <= 0.0 || min_peak_prominence >= 1.0)
      throw_error("min_peak_prominence must be in (0,1), got ", min_peak_prominence);
    if (energy_smoothing_frames < 1 || energy_smoothing_frames % 2 == 0)
      throw_error("energy_smoothing_frames must be odd and >= 1, got ", energy_smoothing_frames);
    if (denom_floor <= 0.0) throw_error("denom_floor must be positive");
  }
};

struct GdBoundaries {
  std::vector<double> boundary_times_s;  // valleys between consecutive peaks
  std::vector<double> peak_times_s;      // syllable nuclei
};

namespace detail {

/// Centered moving average; the window shrinks to the valid range at edges.
inline std::vector<double> moving_average(const std::vector<double>& x, int width) {
  if (width <= 1) return x;
  const int n = static_cast<int>(x.size());
  const int half = width / 2;
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += x[j];
    out[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

/// Local maxima with topographic prominence; contour edges excluded.
inline std::vector<std::size_t> prominent_peaks(const std::vector<double>& x,
                                                double min_prominence_fraction) {
  const std::size_t n = x.size();
  std::vector<std::size_t> peaks;
  if (n < 3) return peaks;
  const double hi = *std::max_element(x.begin(), x.end());
  const double lo = *std::min_element(x.begin(), x.end());
  const double range = hi - lo;
  // a numerically flat contour has no structure; the guard is relative to
  // the contour magnitude so amplitude scaling cannot flip it
  if (range <= 1e-9 * std::max({1.0, std::abs(hi), std::abs(lo)})) return peaks;
  const double min_prom = min_prominence_fraction * range;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
    // prominence: higher of the two saddle minima toward the nearest
    // higher ground (or the contour edge) on each side
    double left_min = x[i];
    for (std::size_t j = i; j-- > 0;) {
      left_min = std::min(left_min, x[j]);
      if (x[j] > x[i]) break;
    }
    double right_min = x[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      right_min = std::min(right_min, x[j]);
      if (x[j] > x[i]) break;
    }
    if (x[i] - std::max(left_min, right_min) >= min_prom) peaks.push_back(i);
  }
  return peaks;
}

}  // namespace detail

/// Group-delay contour of the minimum-phase construction over the smoothed
/// energy contour.  Requires at least 4 frames.
inline FrameContour min_phase_group_delay(const FrameContour& energy, const GdConfig& cfg) {
  cfg.validate();
  const std::size_t m = energy.size();
  if (m < 4) throw_error("group delay needs at least 4 frames, got ", m);

  const std::vector<double> smooth =
      detail::moving_average(energy.values, cfg.energy_smoothing_frames);

  // Even-symmetric length-2M extension: s[k] == s[(2M-k) mod 2M], so the
  // inverse DFT (the root cepstrum) is real.
  const std::size_t n = 2 * m;
  std::vector<cplx> spectrum(n);
  spectrum[0] = cplx(smooth[0], 0.0);
  for (std::size_t k = 1; k < m; ++k) spectrum[k] = cplx(smooth[k], 0.0);
  spectrum[m] = cplx(smooth[m - 1], 0.0);
  for (std::size_t k = m + 1; k < n; ++k) spectrum[k] = spectrum[n - k];

  std::vector<cplx> cepstrum = idft(spectrum);

  // causal lifter: keep coefficients 0..ceil(M/wsf), zero the rest
  const auto keep = static_cast<std::size_t>(
      std::ceil(static_cast<double>(m) / cfg.wsf));
  std::vector<cplx> x(n, cplx(0.0, 0.0));
  std::vector<cplx> nx(n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i <= keep && i < n; ++i) {
    x[i] = cplx(cepstrum[i].real(), 0.0);
    nx[i] = cplx(static_cast<double>(i) * cepstrum[i].real(), 0.0);
  }

  const std::vector<cplx> xf = dft(x);
  const std::vector<cplx> yf = dft(nx);

  FrameContour tau;
  tau.frame_spec = energy.frame_spec;
  tau.kind = ContourKind::group_delay;
  tau.values.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double num = xf[k].real() * yf[k].real() + xf[k].imag() * yf[k].imag();
    const double den = std::max(std::norm(xf[k]), cfg.denom_floor);
    tau.values[k] = num / den;
  }
  return tau;
}

/// Peaks of tau are nuclei; the global minimum between each consecutive
/// peak pair is a boundary.  Fewer than two peaks yield no boundaries.
inline GdBoundaries detect_syllable_boundaries(const FrameContour& tau, const GdConfig& cfg) {
  cfg.validate();
  GdBoundaries out;
  const auto peaks = detail::prominent_peaks(tau.values, cfg.min_peak_prominence);
  for (std::size_t p : peaks) out.peak_times_s.push_back(tau.frame_time_s(p));
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
    std::size_t argmin = peaks[i] + 1;
    for (std::size_t k = peaks[i] + 1; k < peaks[i + 1]; ++k)
      if (tau.values[k] < tau.values[argmin]) argmin = k;
    out.boundary_times_s.push_back(tau.frame_time_s(argmin));
  }
  return out;
}

inline GdBoundaries gd_boundaries_for_waveform(const Waveform& w, const FrameSpec& spec,
                                               const GdConfig& cfg) {
  const FrameContour energy = short_term_energy(w, spec);
  const FrameContour tau = min_phase_group_delay(energy, cfg);
  return detect_syllable_boundaries(tau, cfg);
}

}  // namespace salign
