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
#include <numeric>
#include <string>
#include <vector>

#include "salign/align.hpp"
#include "salign/dsp.hpp"
#include "salign/error.hpp"
#include "salign/gd.hpp"
#include "salign/sbsf.hpp"

// Hybrid segmentation per utterance: syllabify, snap syllable boundaries to
// group-delay boundaries, redistribute phone boundaries proportionally
// inside each resized syllable, then apply the sub-band flux correction.
// Pause boundaries are immutable anchors throughout.  Also exports integer
// per-phone frame counts on the mel-frame grid.

namespace salign {

struct HybridConfig {
  GdConfig gd;
  SbsfConfig sbsf;
  FrameSpec frame_spec;
  std::size_t n_fft = 1024;
  // one hop by default: GD valleys sit mid-consonant, not on the phone
  // edge, so aggressive snapping degrades alignments that are already
  // close; raise this for corpora with gross initial errors
  double max_snap_shift_s = 0.010;
  int min_phone_dur_frames = 1;
  SyllabifyRule syllabify_rule = SyllabifyRule::onset_attach;

  void validate() const {
    gd.validate();
    sbsf.validate();
    if (max_snap_shift_s <= 0.0) throw_error("max_snap_shift_s must be positive");
    if (min_phone_dur_frames < 1) throw_error("min_phone_dur_frames must be >= 1");
  }
};

struct DurationTargets {
  struct Entry {
    std::string symbol;
    std::int64_t frames = 0;
  };
  std::vector<Entry> entries;
  std::int64_t total_frames = 0;
  double hop_s = 0.0;
};

/// Greedy earliest-first snapping: each syllable boundary moves to the
/// nearest still-unused GD boundary within max_shift_s; moves that break
/// strict monotonicity are reverted.
inline std::vector<double> snap_syllable_boundaries(const std::vector<double>& bounds_s,
                                                    const GdBoundaries& gd,
                                                    double max_shift_s) {
  std::vector<double> snapped = bounds_s;
  std::vector<bool> used(gd.boundary_times_s.size(), false);
  std::vector<bool> moved(bounds_s.size(), false);
  for (std::size_t i = 0; i < bounds_s.size(); ++i) {
    std::size_t best = gd.boundary_times_s.size();
    double best_d = 0.0;
    for (std::size_t g = 0; g < gd.boundary_times_s.size(); ++g) {
      if (used[g]) continue;
      const double d = std::abs(gd.boundary_times_s[g] - bounds_s[i]);
      if (d > max_shift_s) continue;
      if (best == gd.boundary_times_s.size() || d < best_d) {  // ties keep the earlier one
        best = g;
        best_d = d;
      }
    }
    if (best < gd.boundary_times_s.size()) {
      snapped[i] = gd.boundary_times_s[best];
      used[best] = true;
      moved[i] = true;
    }
  }
  // revert any move that broke strict ordering; reverting restores members
  // of a strictly increasing sequence, so this terminates
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < snapped.size(); ++i) {
      if (snapped[i] < snapped[i + 1]) continue;
      if (moved[i + 1]) {
        snapped[i + 1] = bounds_s[i + 1];
        moved[i + 1] = false;
        changed = true;
      } else if (moved[i]) {
        snapped[i] = bounds_s[i];
        moved[i] = false;
        changed = true;
      }
    }
  }
  return snapped;
}

/// Linear rescale of boundaries strictly inside [s0,e0] onto [s1,e1].
inline std::vector<double> redistribute_phones(const std::vector<double>& old_bounds,
                                               double s0, double e0, double s1, double e1) {
  if (!(s0 < e0) || !(s1 < e1))
    throw_error("degenerate span in redistribution: [", s0, ",", e0, ") -> [", s1, ",", e1, ")");
  const double scale = (e1 - s1) / (e0 - s0);
  std::vector<double> out;
  out.reserve(old_bounds.size());
  for (double b : old_bounds) out.push_back(s1 + (b - s0) * scale);
  return out;
}

namespace detail {

struct SpeechChunk {
  std::size_t first_syll = 0;  // indices into the syllable list
  std::size_t n_sylls = 0;
};

/// Groups consecutive syllables whose phone ranges touch into chunks.
inline std::vector<SpeechChunk> group_chunks(const std::vector<Syllable>& sylls) {
  std::vector<SpeechChunk> chunks;
  for (std::size_t s = 0; s < sylls.size(); ++s) {
    if (!chunks.empty()) {
      const Syllable& prev = sylls[s - 1];
      if (prev.hi == sylls[s].lo) {
        ++chunks.back().n_sylls;
        continue;
      }
    }
    chunks.push_back({s, 1});
  }
  return chunks;
}

}  // namespace detail

/// Full hybrid segmentation.  The output tier keeps the input's symbol
/// sequence and total span; only interior speech boundaries move.
inline AlignmentTier hybrid_segment(const Waveform& w, const AlignmentTier& initial,
                                    const PhoneClassTable& table, const HybridConfig& cfg) {
  cfg.validate();
  initial.validate();
  if (w.samples.empty() || w.sample_rate <= 0) throw_error("hybrid_segment: empty waveform");
  if (initial.empty()) return initial;
  if (initial.end_s() > w.duration_s() + cfg.frame_spec.frame_len_s)
    throw_error("tier ends at ", initial.end_s(), " s but audio lasts only ",
                w.duration_s(), " s");

  const auto sylls = syllabify(initial, table, cfg.syllabify_rule);
  const auto chunks = detail::group_chunks(sylls);
  const double min_dur = cfg.min_phone_dur_frames * cfg.frame_spec.hop_s;

  std::vector<double> new_start(initial.size());
  std::vector<double> new_end(initial.size());
  for (std::size_t i = 0; i < initial.size(); ++i) {
    new_start[i] = initial.intervals[i].start_s;
    new_end[i] = initial.intervals[i].end_s;
  }

  for (const auto& chunk : chunks) {
    const Syllable& first = sylls[chunk.first_syll];
    const Syllable& last = sylls[chunk.first_syll + chunk.n_sylls - 1];
    const double chunk_t0 = initial.intervals[first.lo].start_s;
    const double chunk_t1 = initial.intervals[last.hi - 1].end_s;

    // vowel-less pseudo-syllable chunks are exempt from snapping, and a
    // single-syllable chunk has no interior syllable boundary anyway
    if (chunk.n_sylls < 2) continue;

    // GD boundaries from the chunk's audio slice, offset back to utterance time
    const auto s0 = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(chunk_t0 * w.sample_rate), 0,
                              static_cast<long long>(w.samples.size())));
    const auto s1 = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(chunk_t1 * w.sample_rate),
                              static_cast<long long>(s0),
                              static_cast<long long>(w.samples.size())));
    Waveform slice{std::vector<double>(w.samples.begin() + s0, w.samples.begin() + s1),
                   w.sample_rate};
    GdBoundaries gd;
    if (cfg.frame_spec.frame_count(slice.samples.size(), w.sample_rate) >= 4) {
      gd = gd_boundaries_for_waveform(slice, cfg.frame_spec, cfg.gd);
      const double offset = static_cast<double>(s0) / w.sample_rate;
      for (double& t : gd.boundary_times_s) t += offset;
      for (double& t : gd.peak_times_s) t += offset;
    }

    // interior syllable boundaries of this chunk
    std::vector<double> syll_bounds;
    for (std::size_t s = 1; s < chunk.n_sylls; ++s)
      syll_bounds.push_back(initial.intervals[sylls[chunk.first_syll + s].lo].start_s);

    std::vector<double> snapped = snap_syllable_boundaries(syll_bounds, gd, cfg.max_snap_shift_s);

    // revert snaps that would squeeze a syllable below its minimum span
    // (min_dur per phone, or its incoming span if already tighter)
    for (bool again = true; again;) {
      again = false;
      for (std::size_t s = 0; s < chunk.n_sylls; ++s) {
        const Syllable& syl = sylls[chunk.first_syll + s];
        const double old_lo = initial.intervals[syl.lo].start_s;
        const double old_hi = initial.intervals[syl.hi - 1].end_s;
        const double lo = (s == 0) ? chunk_t0 : snapped[s - 1];
        const double hi = (s + 1 == chunk.n_sylls) ? chunk_t1 : snapped[s];
        const double need =
            std::min(old_hi - old_lo, static_cast<double>(syl.hi - syl.lo) * min_dur);
        if (hi - lo >= need) continue;
        if (s + 1 < chunk.n_sylls && snapped[s] != syll_bounds[s]) {
          snapped[s] = syll_bounds[s];
          again = true;
        } else if (s > 0 && snapped[s - 1] != syll_bounds[s - 1]) {
          snapped[s - 1] = syll_bounds[s - 1];
          again = true;
        }
      }
    }

    // proportional redistribution of phone boundaries inside each syllable
    for (std::size_t s = 0; s < chunk.n_sylls; ++s) {
      const Syllable& syl = sylls[chunk.first_syll + s];
      const double old_lo = initial.intervals[syl.lo].start_s;
      const double old_hi = initial.intervals[syl.hi - 1].end_s;
      const double lo = (s == 0) ? chunk_t0 : snapped[s - 1];
      const double hi = (s + 1 == chunk.n_sylls) ? chunk_t1 : snapped[s];
      std::vector<double> inner;
      for (std::size_t p = syl.lo + 1; p < syl.hi; ++p)
        inner.push_back(initial.intervals[p].start_s);
      const std::vector<double> mapped =
          inner.empty() ? inner : redistribute_phones(inner, old_lo, old_hi, lo, hi);
      new_start[syl.lo] = lo;
      for (std::size_t p = 0; p < mapped.size(); ++p) {
        new_end[syl.lo + p] = mapped[p];
        new_start[syl.lo + p + 1] = mapped[p];
      }
      new_end[syl.hi - 1] = hi;
    }
  }

  AlignmentTier snapped_tier;
  snapped_tier.level = initial.level;
  snapped_tier.intervals.resize(initial.size());
  for (std::size_t i = 0; i < initial.size(); ++i)
    snapped_tier.intervals[i] = {new_start[i], new_end[i], initial.intervals[i].symbol};
  snapped_tier.validate();

  AlignmentTier refined = refine_tier(snapped_tier, w, table, cfg.sbsf,
                                      sbsf_frame_spec(cfg.frame_spec), cfg.n_fft);

  // bug guard: symbol sequence and total span must be preserved
  if (refined.size() != initial.size())
    throw_error("internal error: hybrid segmentation changed the interval count");
  for (std::size_t i = 0; i < refined.size(); ++i)
    if (refined.intervals[i].symbol != initial.intervals[i].symbol)
      throw_error("internal error: hybrid segmentation relabeled interval ", i);
  if (std::abs(refined.end_s() - initial.end_s()) > kContiguityTolS ||
      std::abs(refined.start_s() - initial.start_s()) > kContiguityTolS)
    throw_error("internal error: hybrid segmentation changed the tier span");
  refined.validate();
  return refined;
}

/// Integer frame counts by the largest-remainder method: floors first, then
/// remainders (ties to the earliest index) absorb the leftover so the total
/// matches exactly.  Symbols: leading SIL -> "$", trailing SIL -> ".",
/// sp -> ",".
inline DurationTargets export_durations(const AlignmentTier& tier, double hop_s,
                                        std::int64_t total_frames) {
  if (hop_s <= 0.0) throw_error("hop_s must be positive");
  const std::size_t n = tier.size();
  if (total_frames < static_cast<std::int64_t>(n))
    throw_error("frame budget too small: ", total_frames, " frames for ", n, " phones");

  if (n == 0 && total_frames != 0)
    throw_error("cannot distribute ", total_frames, " frames over an empty tier");

  DurationTargets out;
  out.total_frames = total_frames;
  out.hop_s = hop_s;
  if (n == 0) return out;

  // remainders are quantized so float dust cannot flip a floor or a
  // tie-break; ties then resolve to the earliest index via stable sort
  std::vector<std::int64_t> rem(n), frames(n);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double raw = tier.intervals[i].duration_s() / hop_s;
    const double nearest = std::round(raw);
    if (std::abs(raw - nearest) < 1e-9 * std::max(1.0, std::abs(raw))) raw = nearest;
    frames[i] = static_cast<std::int64_t>(std::floor(raw));
    rem[i] = std::llround((raw - static_cast<double>(frames[i])) * 1e9);
    assigned += frames[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });

  std::int64_t leftover = total_frames - assigned;
  while (leftover > 0) {
    for (std::size_t idx : order) {
      frames[idx] += 1;
      if (--leftover == 0) break;
    }
  }
  // over-assignment (budget smaller than the raw total): take back from the
  // smallest remainders first, never below zero
  while (leftover < 0) {
    bool took = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (frames[*it] == 0) continue;
      frames[*it] -= 1;
      took = true;
      if (++leftover == 0) break;
    }
    if (!took) throw_error("internal error: cannot satisfy frame budget ", total_frames);
  }

  out.entries.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& sym = tier.intervals[i].symbol;
    std::string mapped = sym;
    if (sym == "SIL" && i == 0)
      mapped = "$";
    else if (sym == "SIL" && i + 1 == n)
      mapped = ".";
    else if (sym == "sp")
      mapped = ",";
    out.entries[i] = {mapped, frames[i]};
  }
  return out;
}

/// One utterance per line: `utt_id|symbol:frames symbol:frames ...`.
inline std::string format_duration_line(const std::string& utt_id, const DurationTargets& t) {
  std::string line = utt_id;
  line += '|';
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    if (i > 0) line += ' ';
    line += t.entries[i].symbol;
    line += ':';
    line += std::to_string(t.entries[i].frames);
  }
  return line;
}

inline std::pair<std::string, DurationTargets> parse_duration_line(const std::string& line,
                                                                   double hop_s = 0.0) {
  const auto bar = line.find('|');
  if (bar == std::string::npos) throw_error("duration line missing '|': '", line, "'");
  DurationTargets t;
  t.hop_s = hop_s;
  const std::string utt_id = line.substr(0, bar);
  std::istringstream rest(line.substr(bar + 1));
  std::string tok;
  while (rest >> tok) {
    const auto colon = tok.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
      throw_error("bad duration token '", tok, "'");
    DurationTargets::Entry e;
    e.symbol = tok.substr(0, colon);
    try {
      e.frames = std::stoll(tok.substr(colon + 1));
    } catch (const std::exception&) {
      throw_error("bad frame count in token '", tok, "'");
    }
    if (e.frames < 0) throw_error("negative frame count in token '", tok, "'");
    t.total_frames += e.frames;
    t.entries.push_back(std::move(e));
  }
  return {utt_id, std::move(t)};
}

}  // namespace salign
