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
#include <string>
#include <vector>

#include "salign/align.hpp"
#include "salign/dsp.hpp"
#include "salign/error.hpp"

// Sub-band spectral flux and class-gated boundary correction.  Sibilant
// fricatives and affricates concentrate energy in the upper bands, nasal
// murmur in the lowest band; the frame-to-frame flux inside the matching
// band spikes at their onsets and offsets.  Spectra are L2-normalized per
// frame before differencing, so the cue tracks spectral shape change, not
// loudness change.

namespace salign {

struct BandSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
  std::string name;

  void validate(int sample_rate) const {
    if (low_hz < 0.0 || !(low_hz < high_hz))
      throw_error("band '", name, "': need 0 <= low < high, got [", low_hz, ", ", high_hz, "]");
    if (high_hz > sample_rate / 2.0)
      throw_error("band '", name, "' exceeds Nyquist (", sample_rate / 2.0, " Hz)");
  }
};

struct SbsfConfig {
  BandSpec high_band{4000.0, 8000.0, "high"};  // fricatives, affricates
  BandSpec low_band{0.0, 600.0, "low"};        // nasals
  double search_window_s = 0.05;
  double flux_floor = 0.1;  // relative to the global flux maximum

  void validate() const {
    if (search_window_s <= 0.0) throw_error("search_window_s must be positive");
    if (flux_floor <= 0.0 || flux_floor >= 1.0)
      throw_error("flux_floor must be in (0,1), got ", flux_floor);
  }
};

/// Flux frames are one hop long: a transition then separates two adjacent
/// frames instead of being smeared across overlapping long windows, so the
/// argmax lands within one frame of the event.
inline FrameSpec sbsf_frame_spec(const FrameSpec& analysis) {
  return FrameSpec{analysis.hop_s, analysis.hop_s, Window::hann};
}

namespace detail {

inline std::vector<std::vector<double>> normalized_spectra(const Waveform& w,
                                                           const FrameSpec& spec,
                                                           std::size_t n_fft) {
  auto spectra = magnitude_spectrogram(w, spec, n_fft);
  for (auto& frame : spectra) {
    double norm = 0.0;
    for (double v : frame) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& v : frame) v /= norm;
  }
  return spectra;
}

inline FrameContour band_flux(const std::vector<std::vector<double>>& spectra,
                              const FrameSpec& spec, std::size_t n_fft, int sample_rate,
                              const BandSpec& band) {
  band.validate(sample_rate);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
  const std::size_t n_bins = n_fft / 2 + 1;
  std::size_t k_lo = n_bins, k_hi = 0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double f = k * bin_hz;
    if (f >= band.low_hz && f <= band.high_hz) {
      k_lo = std::min(k_lo, k);
      k_hi = std::max(k_hi, k + 1);
    }
  }
  FrameContour flux;
  flux.frame_spec = spec;
  flux.kind = ContourKind::flux;
  flux.values.assign(spectra.size(), 0.0);
  for (std::size_t m = 1; m < spectra.size(); ++m) {
    double acc = 0.0;
    for (std::size_t k = k_lo; k < k_hi; ++k) {
      const double d = spectra[m][k] - spectra[m - 1][k];
      acc += d * d;
    }
    flux.values[m] = acc;
  }
  return flux;
}

}  // namespace detail

/// flux[m] = sum over band bins of (|X_m| - |X_{m-1}|)^2 on per-frame
/// L2-normalized spectra; flux[0] = 0.
inline FrameContour subband_spectral_flux(const Waveform& w, const FrameSpec& spec,
                                          std::size_t n_fft, const BandSpec& band) {
  band.validate(w.sample_rate);
  return detail::band_flux(detail::normalized_spectra(w, spec, n_fft), spec, n_fft,
                           w.sample_rate, band);
}

/// Moves the boundary to the frame-start time of the flux argmax inside
/// [boundary - window, boundary + window], provided that maximum clears
/// flux_floor x the global maximum; otherwise returns it unchanged.
inline double refine_boundary(double boundary_s, const FrameContour& flux,
                              double search_window_s, double flux_floor) {
  if (flux.values.empty()) return boundary_s;
  const double global_max = *std::max_element(flux.values.begin(), flux.values.end());
  if (global_max <= 0.0) return boundary_s;
  const double lo = boundary_s - search_window_s;
  const double hi = boundary_s + search_window_s;
  std::size_t best = flux.size();
  for (std::size_t m = 0; m < flux.size(); ++m) {
    const double t = flux.frame_time_s(m);
    if (t < lo || t > hi) continue;
    if (best == flux.size() || flux.values[m] > flux.values[best]) best = m;
  }
  if (best == flux.size()) return boundary_s;
  if (flux.values[best] < flux_floor * global_max) return boundary_s;
  return flux.frame_time_s(best);
}

namespace detail {

inline bool uses_high_band(PhoneClass c) {
  return c == PhoneClass::fricative || c == PhoneClass::affricate;
}

}  // namespace detail

/// Applies refine_boundary at every boundary whose adjacent phones make it
/// eligible: fricative/affricate neighbours use the high band, nasals the
/// low band (high band wins when both apply), pause-adjacent boundaries are
/// never touched.  Moves are clamped so no interval shrinks below one hop
/// (or below its incoming length, if already shorter).
inline AlignmentTier refine_tier(const AlignmentTier& tier, const Waveform& w,
                                 const PhoneClassTable& table, const SbsfConfig& cfg,
                                 const FrameSpec& spec, std::size_t n_fft) {
  cfg.validate();
  tier.validate();
  AlignmentTier out = tier;
  if (tier.size() < 2) return out;
  if (spec.frame_count(w.samples.size(), w.sample_rate) < 2) return out;

  // one spectrogram pass feeds both bands
  const auto spectra = detail::normalized_spectra(w, spec, n_fft);
  const FrameContour high_flux =
      detail::band_flux(spectra, spec, n_fft, w.sample_rate, cfg.high_band);
  const FrameContour low_flux =
      detail::band_flux(spectra, spec, n_fft, w.sample_rate, cfg.low_band);
  const double min_dur = spec.hop_s;

  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    const PhoneClass left = table.classify(out.intervals[i].symbol);
    const PhoneClass right = table.classify(out.intervals[i + 1].symbol);
    if (is_pause_class(left) || is_pause_class(right)) continue;

    const FrameContour* flux = nullptr;
    if (detail::uses_high_band(left) || detail::uses_high_band(right))
      flux = &high_flux;
    else if (left == PhoneClass::nasal || right == PhoneClass::nasal)
      flux = &low_flux;
    else
      continue;

    const double boundary = out.intervals[i].end_s;
    double moved = refine_boundary(boundary, *flux, cfg.search_window_s, cfg.flux_floor);
    if (moved == boundary) continue;

    // keep both neighbours at >= min_dur (or their incoming length)
    const double left_min = std::min(min_dur, out.intervals[i].duration_s());
    const double right_min = std::min(min_dur, out.intervals[i + 1].duration_s());
    const double clamp_lo = out.intervals[i].start_s + left_min;
    const double clamp_hi = out.intervals[i + 1].end_s - right_min;
    if (clamp_lo > clamp_hi) continue;
    moved = std::clamp(moved, clamp_lo, clamp_hi);

    out.intervals[i].end_s = moved;
    out.intervals[i + 1].start_s = moved;
  }
  out.validate();
  return out;
}

}  // namespace salign
