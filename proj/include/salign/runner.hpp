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

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "salign/error.hpp"
#include "salign/hybrid.hpp"
#include "salign/manifest.hpp"
#include "salign/metrics.hpp"
#include "salign/wav.hpp"

// Batch refinement over a corpus manifest.  Utterances are independent, so
// a fixed worker pool pulls indices from an atomic counter; results land in
// per-index slots and are written in manifest order, which makes the output
// bytes independent of worker count and scheduling.

namespace salign {

struct UtteranceResult {
  std::string utt_id;
  bool ok = false;
  std::string error;
  std::string refined_labels;   // label-file bytes
  std::string duration_line;    // `utt_id|sym:frames ...`
  double mean_shift_ms = 0.0;   // boundary movement vs the initial tier
  double max_shift_ms = 0.0;
  std::size_t n_boundaries = 0;
};

struct RunSummary {
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  double wall_ms = 0.0;
  std::vector<UtteranceResult> results;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n_ok"] = n_ok;
    j["n_failed"] = n_failed;
    j["wall_ms"] = wall_ms;
    auto arr = nlohmann::json::array();
    for (const auto& r : results) {
      nlohmann::json u;
      u["utt_id"] = r.utt_id;
      u["ok"] = r.ok;
      if (!r.ok) u["error"] = r.error;
      else {
        u["mean_shift_ms"] = r.mean_shift_ms;
        u["max_shift_ms"] = r.max_shift_ms;
        u["n_boundaries"] = r.n_boundaries;
      }
      arr.push_back(std::move(u));
    }
    j["utterances"] = std::move(arr);
    return j;
  }
};

namespace detail {

/// Writes via a temp file in the same directory, then renames into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_io_error("cannot create '", tmp.string(), "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw_io_error("failed writing '", tmp.string(), "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw_io_error("cannot rename '", tmp.string(), "' to '", path.string(), "'");
}

inline UtteranceResult refine_one(const ManifestEntry& entry, const PhoneClassTable& table,
                                  const ToolConfig& cfg) {
  UtteranceResult res;
  res.utt_id = entry.utt_id;
  try {
    const Waveform w = load_wav(entry.wav_path, cfg.target_sample_rate);
    const AlignmentTier initial = parse_label_file(read_text_file(entry.lab_path), cfg.time_unit);
    initial.validate();
    const AlignmentTier refined = hybrid_segment(w, initial, table, cfg.hybrid);

    double sum = 0.0, worst = 0.0;
    for (std::size_t i = 0; i + 1 < refined.size(); ++i) {
      const double d =
          std::abs(refined.intervals[i].end_s - initial.intervals[i].end_s) * 1000.0;
      sum += d;
      worst = std::max(worst, d);
      ++res.n_boundaries;
    }
    res.mean_shift_ms = res.n_boundaries ? sum / static_cast<double>(res.n_boundaries) : 0.0;
    res.max_shift_ms = worst;

    res.refined_labels = write_label_file(refined, cfg.time_unit);
    const auto total_frames = static_cast<std::int64_t>(
        cfg.hybrid.frame_spec.frame_count(w.samples.size(), w.sample_rate));
    const DurationTargets targets =
        export_durations(refined, cfg.hybrid.frame_spec.hop_s, total_frames);
    res.duration_line = format_duration_line(entry.utt_id, targets);
    res.ok = true;
  } catch (const std::exception& e) {
    res.ok = false;
    res.error = e.what();
  }
  return res;
}

}  // namespace detail

/// Refines every manifest entry and writes, under out_dir:
///   labs/<utt_id>.lab    refined alignment (atomic, per utterance)
///   durations.txt        one duration line per successful utterance
///   summary.json         counts, per-utterance shift statistics, wall time
/// Failures are recorded in the summary and do not abort the batch.
inline RunSummary run_refine(const CorpusManifest& manifest, const PhoneClassTable& table,
                             const ToolConfig& cfg, unsigned workers,
                             const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  const fs::path out(out_dir);
  const fs::path labs = out / "labs";
  std::error_code ec;
  fs::create_directories(labs, ec);
  if (ec) throw_io_error("cannot create output directory '", labs.string(), "'");

  RunSummary summary;
  summary.results.resize(manifest.entries.size());
  if (workers == 0) workers = 1;

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= manifest.entries.size()) return;
      summary.results[i] = detail::refine_one(manifest.entries[i], table, cfg);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::string durations;
  for (const auto& r : summary.results) {
    if (r.ok) {
      detail::atomic_write(labs / (r.utt_id + ".lab"), r.refined_labels);
      durations += r.duration_line;
      durations += '\n';
      ++summary.n_ok;
    } else {
      ++summary.n_failed;
    }
  }
  detail::atomic_write(out / "durations.txt", durations);

  summary.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0).count();
  detail::atomic_write(out / "summary.json", summary.to_json().dump(2) + "\n");
  return summary;
}

}  // namespace salign
