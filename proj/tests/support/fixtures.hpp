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

// Synthetic speech-like fixtures: vowels are harmonic tone stacks,
// fricatives are 4-8 kHz band noise, nasals are 150 Hz-dominant tones,
// pauses are silence.  Crude, but the acoustic cues the segmenters rely on
// (energy lobes per syllable, band-concentrated spectra) are all present
// and the true boundaries are known exactly.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "salign/align.hpp"
#include "salign/dsp.hpp"

namespace fixtures {

using salign::AlignmentTier;
using salign::PhoneClass;
using salign::PhoneClassTable;
using salign::Waveform;

inline PhoneClassTable table() {
  PhoneClassTable t;
  t.insert("a", PhoneClass::vowel);
  t.insert("i", PhoneClass::vowel);
  t.insert("u", PhoneClass::vowel);
  t.insert("s", PhoneClass::fricative);
  t.insert("f", PhoneClass::fricative);
  t.insert("c", PhoneClass::affricate);
  t.insert("m", PhoneClass::nasal);
  t.insert("n", PhoneClass::nasal);
  t.insert("k", PhoneClass::stop);
  t.insert("t", PhoneClass::stop);
  t.insert("y", PhoneClass::semivowel);
  t.insert("r", PhoneClass::trill);
  t.insert("l", PhoneClass::lateral);
  return t;
}

// 5 ms raised-cosine edges keep phone transitions click-free
constexpr double kEdgeRampS = 0.005;

inline double edge_ramp(std::size_t s, std::size_t s0, std::size_t s1, int sr) {
  const double ramp = kEdgeRampS * sr;
  const double into = static_cast<double>(s - s0);
  const double left = static_cast<double>(s1 - 1 - s);
  double g = 1.0;
  if (into < ramp) g = std::min(g, 0.5 - 0.5 * std::cos(std::numbers::pi * into / ramp));
  if (left < ramp) g = std::min(g, 0.5 - 0.5 * std::cos(std::numbers::pi * left / ramp));
  return g;
}

inline void add_tone(std::vector<double>& buf, std::size_t s0, std::size_t s1, int sr,
                     double freq, double amp, double phase = 0.0) {
  for (std::size_t s = s0; s < s1 && s < buf.size(); ++s) {
    const double t = static_cast<double>(s) / sr;
    buf[s] += edge_ramp(s, s0, s1, sr) * amp *
              std::sin(2.0 * std::numbers::pi * freq * t + phase);
  }
}

// Random tone cluster with a minimum component spacing.  Tightly packed
// components beat against each other inside one analysis bin and make the
// short-window spectral shape flutter frame to frame; spacing them wider
// than the window main lobe keeps the shape stationary while the signal
// still sounds and measures as band noise.
inline void add_band_noise(std::vector<double>& buf, std::size_t s0, std::size_t s1, int sr,
                           double lo_hz, double hi_hz, double amp, std::mt19937_64& rng) {
  const double min_spacing = 190.0;
  std::uniform_real_distribution<double> jitter_d(0.0, min_spacing * 0.8);
  std::uniform_real_distribution<double> phase_d(0.0, 2.0 * std::numbers::pi);
  std::vector<double> freqs;
  for (double f = lo_hz; f + min_spacing * 0.8 < hi_hz; f += min_spacing)
    freqs.push_back(f + jitter_d(rng));
  const double comp_amp = amp / std::sqrt(freqs.size() / 2.0);
  for (double f : freqs) add_tone(buf, s0, s1, sr, f, comp_amp, phase_d(rng));
}

/// Renders one phone segment into buf[s0, s1).
inline void render_phone(std::vector<double>& buf, const std::string& sym, std::size_t s0,
                         std::size_t s1, int sr, std::mt19937_64& rng) {
  if (sym == "SIL" || sym == "sp") return;
  if (sym == "a" || sym == "i" || sym == "u") {
    // female-register pitch keeps >= 2 periods in a 10 ms analysis window
    const double f0 = (sym == "a") ? 220.0 : (sym == "i") ? 240.0 : 260.0;
    const double formant = (sym == "a") ? 700.0 : (sym == "i") ? 2100.0 : 600.0;
    for (int h = 1; h * f0 <= 1400.0; ++h)
      add_tone(buf, s0, s1, sr, f0 * h, 0.30 / h);
    add_tone(buf, s0, s1, sr, formant, 0.12);
    return;
  }
  if (sym == "m" || sym == "n") {
    const double f0 = (sym == "m") ? 150.0 : 155.0;
    add_tone(buf, s0, s1, sr, f0, 0.30);
    add_tone(buf, s0, s1, sr, f0 * 3.0, 0.05);
    return;
  }
  if (sym == "s" || sym == "f" || sym == "c") {
    add_band_noise(buf, s0, s1, sr, 4200.0, 7800.0, 0.18, rng);
    return;
  }
  // fallback for symbols without a bespoke recipe: mid-band tone
  add_tone(buf, s0, s1, sr, 900.0, 0.2);
}

inline Waveform render_tier(const AlignmentTier& tier, int sr, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Waveform w;
  w.sample_rate = sr;
  w.samples.assign(static_cast<std::size_t>(std::llround(tier.end_s() * sr)), 0.0);
  for (const auto& iv : tier.intervals) {
    const auto s0 = static_cast<std::size_t>(std::llround(iv.start_s * sr));
    const auto s1 = static_cast<std::size_t>(std::llround(iv.end_s * sr));
    render_phone(w.samples, iv.symbol, s0, s1, sr, rng);
  }
  return w;
}

struct UtteranceSpec {
  int n_words_min = 2;
  int n_words_max = 2;
  int n_sylls_min = 4;
  int n_sylls_max = 6;
  double coda_prob = 0.25;
  int sample_rate = 22050;
};

/// Builds a random CV(C) utterance tier with word-separating silences.
inline AlignmentTier make_true_tier(std::mt19937_64& rng, const UtteranceSpec& spec = {}) {
  const std::vector<std::string> onsets = {"s", "f", "m", "n"};
  const std::vector<std::string> vowels = {"a", "i", "u"};
  const std::vector<std::string> codas = {"m", "s", "n"};
  std::uniform_int_distribution<int> words_d(spec.n_words_min, spec.n_words_max);
  std::uniform_int_distribution<int> sylls_d(spec.n_sylls_min, spec.n_sylls_max);
  // consonants at >= 90 ms keep the far phone edge (and its flux peak,
  // which can sit one frame early) outside the +-50 ms search window even
  // for worst-case +-30 ms perturbations
  std::uniform_real_distribution<double> onset_dur(0.090, 0.130);
  std::uniform_real_distribution<double> vowel_dur(0.110, 0.220);
  std::uniform_real_distribution<double> coda_dur(0.090, 0.130);
  std::uniform_real_distribution<double> sil_dur(0.150, 0.280);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AlignmentTier tier;
  double t = 0.0;
  auto push = [&](const std::string& sym, double dur) {
    tier.intervals.push_back({t, t + dur, sym});
    t += dur;
  };
  auto cls_of = [](const std::string& s) { return s == "s" || s == "f" ? 'f' : 'n'; };
  push("SIL", 0.200);
  const int n_words = words_d(rng);
  for (int word = 0; word < n_words; ++word) {
    const int n_sylls = sylls_d(rng);
    std::string pending_coda;
    for (int syll = 0; syll < n_sylls; ++syll) {
      const std::string onset = onsets[rng() % onsets.size()];
      // a coda of the same class as the following onset would make a
      // boundary with no spectral cue at all; skip those
      if (!pending_coda.empty() && cls_of(pending_coda) != cls_of(onset))
        push(pending_coda, coda_dur(rng));
      pending_coda.clear();
      push(onset, onset_dur(rng));
      push(vowels[rng() % vowels.size()], vowel_dur(rng));
      if (unit(rng) < spec.coda_prob) pending_coda = codas[rng() % codas.size()];
    }
    push("SIL", word + 1 == n_words ? 0.200 : sil_dur(rng));
  }
  return tier;
}

/// i.i.d. uniform +-max_shift_s on every interior boundary, redrawn until
/// every interval keeps at least min_dur_s.
inline AlignmentTier perturb_tier(const AlignmentTier& truth, double max_shift_s,
                                  std::mt19937_64& rng, double min_dur_s = 0.012) {
  std::uniform_real_distribution<double> shift_d(-max_shift_s, max_shift_s);
  const std::size_t n = truth.size();
  AlignmentTier out;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    out = truth;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double b = truth.intervals[i].end_s + shift_d(rng);
      out.intervals[i].end_s = b;
      out.intervals[i + 1].start_s = b;
    }
    for (const auto& iv : out.intervals)
      if (iv.duration_s() < min_dur_s) {
        ok = false;
        break;
      }
    if (ok) return out;
  }
  throw salign::Error("perturb_tier: could not draw a valid perturbation");
}

struct SyntheticUtterance {
  AlignmentTier truth;
  AlignmentTier initial;  // perturbed
  Waveform audio;
};

inline SyntheticUtterance make_utterance(std::uint64_t seed, double perturb_s = 0.030,
                                         const UtteranceSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  SyntheticUtterance u;
  u.truth = make_true_tier(rng, spec);
  u.audio = render_tier(u.truth, spec.sample_rate, seed ^ 0x9e3779b97f4a7c15ull);
  u.initial = perturb_tier(u.truth, perturb_s, rng);
  return u;
}

/// K tone bursts separated by silent gaps; returns the audio and the gap
/// intervals (silence spans between consecutive bursts).
inline std::pair<Waveform, std::vector<std::pair<double, double>>> make_bursts(
    int k, int sr = 16000, double burst_s = 0.300, double gap_s = 0.120) {
  Waveform w;
  w.sample_rate = sr;
  const double lead = 0.150;
  const double total = lead * 2 + k * burst_s + (k - 1) * gap_s;
  w.samples.assign(static_cast<std::size_t>(std::llround(total * sr)), 0.0);
  std::vector<std::pair<double, double>> gaps;
  double t = lead;
  for (int i = 0; i < k; ++i) {
    const auto s0 = static_cast<std::size_t>(std::llround(t * sr));
    const auto s1 = static_cast<std::size_t>(std::llround((t + burst_s) * sr));
    for (int h = 1; h <= 5; ++h)
      add_tone(w.samples, s0, s1, sr, 140.0 * h, 0.35 / h);
    t += burst_s;
    if (i + 1 < k) {
      gaps.emplace_back(t, t + gap_s);
      t += gap_s;
    }
  }
  return {w, gaps};
}

}  // namespace fixtures
