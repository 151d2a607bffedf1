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
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "salign/error.hpp"
#include "salign/fft.hpp"

// Short-time analysis primitives.  Conventions used throughout:
//   - frames start at sample i*hop and cover frame_len samples, no padding,
//     trailing partial frame dropped;
//   - the boundary time of frame m is m*hop_s (frame start);
//   - short-term energy is the mean of squared windowed samples, so the
//     contour magnitude does not depend on the frame length.

namespace salign {

struct Waveform {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  int sample_rate = 0;          // Hz

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

enum class Window { rectangular, hamming, hann };

inline const char* window_name(Window w) {
  switch (w) {
    case Window::rectangular: return "rectangular";
    case Window::hamming: return "hamming";
    case Window::hann: return "hann";
  }
  return "?";
}

inline Window window_from_name(const std::string& s) {
  if (s == "rectangular") return Window::rectangular;
  if (s == "hamming") return Window::hamming;
  if (s == "hann") return Window::hann;
  throw_error("unknown window type '", s, "'");
}

struct FrameSpec {
  double frame_len_s = 0.025;
  double hop_s = 0.010;
  Window window = Window::hamming;

  std::size_t frame_len_samples(int sample_rate) const {
    auto n = static_cast<std::size_t>(std::llround(frame_len_s * sample_rate));
    return n;
  }
  std::size_t hop_samples(int sample_rate) const {
    auto n = static_cast<std::size_t>(std::llround(hop_s * sample_rate));
    return n;
  }

  void validate(int sample_rate) const {
    if (sample_rate <= 0) throw_error("sample rate must be positive, got ", sample_rate);
    if (hop_s <= 0.0 || hop_s > frame_len_s)
      throw_error("frame spec requires 0 < hop_s <= frame_len_s (hop_s=", hop_s,
                  ", frame_len_s=", frame_len_s, ")");
    if (frame_len_samples(sample_rate) < 2)
      throw_error("frame length must be at least 2 samples");
    if (hop_samples(sample_rate) < 1) throw_error("hop must be at least 1 sample");
  }

  /// Number of full frames in a signal of n_samples: floor((N - L)/H) + 1,
  /// with the hop taken at its exact (real-valued) sample count so frame
  /// start times never drift from the nominal m*hop_s grid.
  std::size_t frame_count(std::size_t n_samples, int sample_rate) const {
    const std::size_t len = frame_len_samples(sample_rate);
    if (n_samples < len) return 0;
    const double hop_exact = hop_s * sample_rate;
    return static_cast<std::size_t>(
               std::floor(static_cast<double>(n_samples - len) / hop_exact)) + 1;
  }

  /// First sample of frame i, rounded per frame (non-accumulating).
  std::size_t frame_start_sample(std::size_t i, int sample_rate) const {
    return static_cast<std::size_t>(std::llround(static_cast<double>(i) * hop_s * sample_rate));
  }
};

enum class ContourKind { energy, group_delay, flux };

struct FrameContour {
  std::vector<double> values;  // one per frame
  FrameSpec frame_spec;
  ContourKind kind = ContourKind::energy;

  std::size_t size() const { return values.size(); }
  /// Frame-start time of frame m.
  double frame_time_s(std::size_t m) const { return static_cast<double>(m) * frame_spec.hop_s; }
};

struct CepstraSequence {
  std::vector<std::vector<double>> frames;  // c_1..c_D per frame, c0 excluded
  int dim = 0;
  FrameSpec frame_spec;
};

inline std::vector<double> window_coefficients(Window w, std::size_t len) {
  std::vector<double> c(len, 1.0);
  if (len < 2) return c;
  const double denom = static_cast<double>(len - 1);
  switch (w) {
    case Window::rectangular:
      break;
    case Window::hamming:
      for (std::size_t n = 0; n < len; ++n)
        c[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / denom);
      break;
    case Window::hann:
      for (std::size_t n = 0; n < len; ++n)
        c[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / denom));
      break;
  }
  return c;
}

/// Slices the signal into windowed frames; frame i covers [i*hop, i*hop+len).
inline std::vector<std::vector<double>> frame_signal(const Waveform& w, const FrameSpec& spec) {
  spec.validate(w.sample_rate);
  const std::size_t len = spec.frame_len_samples(w.sample_rate);
  if (w.samples.size() < len)
    throw_error("signal too short: ", w.samples.size(), " samples, frame needs ", len);
  const std::size_t m = spec.frame_count(w.samples.size(), w.sample_rate);
  const std::vector<double> win = window_coefficients(spec.window, len);
  std::vector<std::vector<double>> frames(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t start = spec.frame_start_sample(i, w.sample_rate);
    if (start + len > w.samples.size()) start = w.samples.size() - len;  // rounding guard
    frames[i].resize(len);
    const double* src = w.samples.data() + start;
    for (std::size_t n = 0; n < len; ++n) frames[i][n] = src[n] * win[n];
  }
  return frames;
}

/// E[m] = mean of squared windowed samples of frame m.
inline FrameContour short_term_energy(const Waveform& w, const FrameSpec& spec) {
  const auto frames = frame_signal(w, spec);
  FrameContour c;
  c.frame_spec = spec;
  c.kind = ContourKind::energy;
  c.values.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    double acc = 0.0;
    for (double v : frames[i]) acc += v * v;
    c.values[i] = acc / static_cast<double>(frames[i].size());
  }
  return c;
}

/// Per-frame magnitude spectra, n_fft/2 + 1 bins each.
inline std::vector<std::vector<double>> magnitude_spectrogram(const Waveform& w,
                                                              const FrameSpec& spec,
                                                              std::size_t n_fft) {
  spec.validate(w.sample_rate);
  const std::size_t len = spec.frame_len_samples(w.sample_rate);
  if (!is_power_of_two(n_fft)) throw_error("n_fft must be a power of two, got ", n_fft);
  if (n_fft < len) throw_error("n_fft (", n_fft, ") smaller than frame length (", len, ")");
  const auto frames = frame_signal(w, spec);
  const std::size_t n_bins = n_fft / 2 + 1;
  std::vector<std::vector<double>> spectra(frames.size());
  std::vector<cplx> buf(n_fft);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
    for (std::size_t n = 0; n < len; ++n) buf[n] = cplx(frames[i][n], 0.0);
    std::vector<cplx> spec_i = dft(buf);
    spectra[i].resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) spectra[i][k] = std::abs(spec_i[k]);
  }
  return spectra;
}

namespace detail {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters over power-spectrum bins, covering 0..sample_rate/2.
/// Returned as (n_mels x n_bins) weights.
inline std::vector<std::vector<double>> mel_filterbank(int sample_rate, std::size_t n_fft,
                                                       std::size_t n_mels) {
  const std::size_t n_bins = n_fft / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges_hz(n_mels + 2);
  for (std::size_t i = 0; i < n_mels + 2; ++i)
    edges_hz[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  std::vector<std::vector<double>> fb(n_mels, std::vector<double>(n_bins, 0.0));
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges_hz[m], mid = edges_hz[m + 1], hi = edges_hz[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      if (f > lo && f < mid)
        fb[m][k] = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        fb[m][k] = (hi - f) / (hi - mid);
    }
  }
  return fb;
}

/// Orthonormal DCT-II matrix rows 0..n_out-1 over n_in points.
inline std::vector<std::vector<double>> dct2_orthonormal(std::size_t n_out, std::size_t n_in) {
  std::vector<std::vector<double>> t(n_out, std::vector<double>(n_in));
  for (std::size_t k = 0; k < n_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n_in));
    for (std::size_t n = 0; n < n_in; ++n)
      t[k][n] = scale * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * n_in));
  }
  return t;
}

}  // namespace detail

constexpr double kLogFloor = 1e-10;  // power floor before log; avoids -inf on silence

/// Mel filterbank cepstra c_1..c_D (c0 excluded).
inline CepstraSequence mel_cepstra(const Waveform& w, const FrameSpec& spec, std::size_t n_fft,
                                   std::size_t n_mels, std::size_t n_ceps) {
  if (n_ceps < 1) throw_error("cepstral order must be at least 1");
  if (n_mels < n_ceps + 1)
    throw_error("n_mels (", n_mels, ") must be at least n_ceps+1 (", n_ceps + 1, ")");
  const auto spectra = magnitude_spectrogram(w, spec, n_fft);
  const auto fb = detail::mel_filterbank(w.sample_rate, n_fft, n_mels);
  const auto dct = detail::dct2_orthonormal(n_ceps + 1, n_mels);
  CepstraSequence seq;
  seq.dim = static_cast<int>(n_ceps);
  seq.frame_spec = spec;
  seq.frames.resize(spectra.size());
  std::vector<double> logmel(n_mels);
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    for (std::size_t m = 0; m < n_mels; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < spectra[i].size(); ++k)
        acc += fb[m][k] * spectra[i][k] * spectra[i][k];
      logmel[m] = std::log(std::max(acc, kLogFloor));
    }
    seq.frames[i].resize(n_ceps);
    for (std::size_t d = 1; d <= n_ceps; ++d) {
      double acc = 0.0;
      for (std::size_t m = 0; m < n_mels; ++m) acc += dct[d][m] * logmel[m];
      seq.frames[i][d - 1] = acc;
    }
  }
  return seq;
}

}  // namespace salign
