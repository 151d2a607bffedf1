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
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "salign/align.hpp"
#include "salign/dsp.hpp"
#include "salign/error.hpp"

// Objective evaluation: DTW-based mel-cepstral distortion and boundary
// difference statistics.  MCD convention: (10/ln 10) * sqrt(2 * sum_d
// (c_d - c'_d)^2) averaged along the DTW path, c0 excluded.  Published MCD
// values depend on this convention and on the cepstral frontend, so scores
// are comparable only within one toolkit.

namespace salign {

constexpr double kMcdScale = 4.342944819032518;  // 10 / ln 10

struct McdResult {
  double mcd_db = 0.0;
  std::int64_t path_length = 0;
  std::int64_t ref_frames = 0;
  std::int64_t syn_frames = 0;
};

struct BoundaryDiffReport {
  double mean_abs_ms = 0.0;
  double median_abs_ms = 0.0;
  std::map<double, double> pct_within;  // tolerance_ms -> fraction
  std::int64_t n_boundaries = 0;
};

using WarpPath = std::vector<std::pair<std::size_t, std::size_t>>;

namespace detail {

inline double frame_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

}  // namespace detail

/// Monotone, continuous warping path with steps (1,1),(1,0),(0,1),
/// minimizing the summed Euclidean frame distance.  Ties prefer (1,1),
/// then (1,0).
inline WarpPath dtw_align(const CepstraSequence& a, const CepstraSequence& b) {
  if (a.frames.empty() || b.frames.empty()) throw_error("dtw: empty cepstra sequence");
  if (a.dim != b.dim)
    throw_error("dtw: dimension mismatch (", a.dim, " vs ", b.dim, ")");
  const std::size_t la = a.frames.size(), lb = b.frames.size();

  // rolling cost rows plus a full step matrix for backtracking
  // steps: 0 = (1,1), 1 = (1,0), 2 = (0,1)
  std::vector<std::uint8_t> step(la * lb);
  std::vector<double> prev(lb), cur(lb);
  for (std::size_t j = 0; j < lb; ++j) {
    const double d = detail::frame_dist(a.frames[0], b.frames[j]);
    prev[j] = (j == 0) ? d : prev[j - 1] + d;
    step[j] = 2;
  }
  for (std::size_t i = 1; i < la; ++i) {
    for (std::size_t j = 0; j < lb; ++j) {
      const double d = detail::frame_dist(a.frames[i], b.frames[j]);
      if (j == 0) {
        cur[0] = prev[0] + d;
        step[i * lb] = 1;
        continue;
      }
      double best = prev[j - 1];
      std::uint8_t s = 0;
      if (prev[j] < best) {
        best = prev[j];
        s = 1;
      }
      if (cur[j - 1] < best) {
        best = cur[j - 1];
        s = 2;
      }
      cur[j] = best + d;
      step[i * lb + j] = s;
    }
    std::swap(prev, cur);
  }

  WarpPath path;
  std::size_t i = la - 1, j = lb - 1;
  path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    switch (step[i * lb + j]) {
      case 0: --i; --j; break;
      case 1: --i; break;
      default: --j; break;
    }
    path.emplace_back(i, j);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

inline McdResult mcd(const CepstraSequence& ref, const CepstraSequence& syn) {
  const WarpPath path = dtw_align(ref, syn);
  double acc = 0.0;
  for (const auto& [i, j] : path) {
    double sq = 0.0;
    for (int d = 0; d < ref.dim; ++d) {
      const double diff = ref.frames[i][d] - syn.frames[j][d];
      sq += diff * diff;
    }
    acc += kMcdScale * std::sqrt(2.0 * sq);
  }
  McdResult r;
  r.path_length = static_cast<std::int64_t>(path.size());
  r.ref_frames = static_cast<std::int64_t>(ref.frames.size());
  r.syn_frames = static_cast<std::int64_t>(syn.frames.size());
  r.mcd_db = acc / static_cast<double>(path.size());
  return r;
}

/// Absolute differences of shared internal boundaries, in milliseconds.
/// Both tiers must carry the identical symbol sequence.
inline BoundaryDiffReport boundary_diff(const AlignmentTier& ref, const AlignmentTier& hyp,
                                        std::span<const double> tolerances_ms = {}) {
  static constexpr double kDefaultTols[] = {5.0, 10.0, 20.0, 50.0};
  if (tolerances_ms.empty()) tolerances_ms = kDefaultTols;
  if (ref.size() != hyp.size())
    throw_error("tier mismatch: ", ref.size(), " vs ", hyp.size(), " intervals");
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (ref.intervals[i].symbol != hyp.intervals[i].symbol)
      throw_error("tier mismatch at interval ", i, ": '", ref.intervals[i].symbol, "' vs '",
                  hyp.intervals[i].symbol, "'");

  BoundaryDiffReport rep;
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < ref.size(); ++i)
    diffs.push_back(std::abs(ref.intervals[i].end_s - hyp.intervals[i].end_s) * 1000.0);
  rep.n_boundaries = static_cast<std::int64_t>(diffs.size());
  for (double tol : tolerances_ms) rep.pct_within[tol] = diffs.empty() ? 1.0 : 0.0;
  if (diffs.empty()) return rep;

  double sum = 0.0;
  for (double d : diffs) sum += d;
  rep.mean_abs_ms = sum / static_cast<double>(diffs.size());
  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  rep.median_abs_ms = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  for (double tol : tolerances_ms) {
    std::size_t count = 0;
    for (double d : diffs)
      if (d <= tol + 1e-9) ++count;  // slack keeps exact-tolerance diffs inside
    rep.pct_within[tol] = static_cast<double>(count) / static_cast<double>(n);
  }
  return rep;
}

/// Two-sided paired permutation test on per-utterance score differences.
/// Returns the p-value for mean(a - b) != 0 under random sign flips.
inline double paired_permutation_test(std::span<const double> a, std::span<const double> b,
                                      int n_resamples = 10000, std::uint64_t seed = 0) {
  if (a.size() != b.size()) throw_error("permutation test: unequal sample counts");
  if (a.empty()) throw_error("permutation test: no samples");
  std::vector<double> d(a.size());
  double observed = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
    observed += d[i];
  }
  observed = std::abs(observed / static_cast<double>(d.size()));
  std::mt19937_64 rng(seed);
  int hits = 0;
  for (int r = 0; r < n_resamples; ++r) {
    double acc = 0.0;
    for (double v : d) acc += (rng() & 1u) ? v : -v;
    if (std::abs(acc / static_cast<double>(d.size())) >= observed) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(n_resamples + 1);
}

}  // namespace salign
