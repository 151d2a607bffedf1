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

#include <doctest.h>

#include <cmath>
#include <random>

#include "salign/hybrid.hpp"
#include "support/fixtures.hpp"

using namespace salign;

TEST_CASE("snap_syllable_boundaries") {
  SUBCASE("snaps to the nearest gd boundary within reach") {
    GdBoundaries gd;
    gd.boundary_times_s = {0.47, 0.90};
    const auto out = snap_syllable_boundaries({0.50}, gd, 0.05);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == 0.47);
  }
  SUBCASE("empty gd set leaves bounds unchanged") {
    const auto out = snap_syllable_boundaries({0.5, 0.7}, GdBoundaries{}, 0.05);
    CHECK(out == std::vector<double>{0.5, 0.7});
  }
  SUBCASE("greedy earliest-first wins ties and consumes boundaries once") {
    GdBoundaries gd;
    gd.boundary_times_s = {0.51};
    const auto out = snap_syllable_boundaries({0.50, 0.52}, gd, 0.05);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 0.51);
    CHECK(out[1] == 0.52);
  }
  SUBCASE("moves beyond max shift are not taken") {
    GdBoundaries gd;
    gd.boundary_times_s = {0.60};
    const auto out = snap_syllable_boundaries({0.50}, gd, 0.05);
    CHECK(out[0] == 0.50);
  }
  SUBCASE("order-breaking moves are reverted") {
    GdBoundaries gd;
    gd.boundary_times_s = {0.545};
    const auto out = snap_syllable_boundaries({0.50, 0.54}, gd, 0.05);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 0.50);  // snapping to 0.545 would pass 0.54
    CHECK(out[1] == 0.54);
  }
  SUBCASE("never moves farther than max shift") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> bounds, gdb;
      for (int i = 0; i < 8; ++i) bounds.push_back(d(rng));
      for (int i = 0; i < 6; ++i) gdb.push_back(d(rng));
      std::sort(bounds.begin(), bounds.end());
      bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
      std::sort(gdb.begin(), gdb.end());
      GdBoundaries gd;
      gd.boundary_times_s = gdb;
      const auto out = snap_syllable_boundaries(bounds, gd, 0.08);
      REQUIRE(out.size() == bounds.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(std::abs(out[i] - bounds[i]) <= 0.08 + 1e-12);
        if (i > 0) CHECK(out[i] > out[i - 1]);
      }
    }
  }
}

TEST_CASE("redistribute_phones") {
  SUBCASE("linear rescale") {
    const auto out = redistribute_phones({1.2}, 1.0, 1.5, 1.0, 1.6);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == doctest::Approx(1.24).epsilon(1e-12));
  }
  SUBCASE("identity when spans match") {
    const auto out = redistribute_phones({1.2, 1.3}, 1.0, 1.5, 1.0, 1.5);
    CHECK(out[0] == doctest::Approx(1.2));
    CHECK(out[1] == doctest::Approx(1.3));
  }
  SUBCASE("no bounds, no output") {
    CHECK(redistribute_phones({}, 1.0, 1.5, 2.0, 2.5).empty());
  }
  SUBCASE("degenerate spans are rejected") {
    CHECK_THROWS_AS((void)redistribute_phones({1.2}, 1.5, 1.5, 1.0, 1.6), Error);
    CHECK_THROWS_AS((void)redistribute_phones({1.2}, 1.0, 1.5, 1.6, 1.6), Error);
  }
  SUBCASE("duration ratios are preserved") {
    std::mt19937_64 rng(64);
    std::uniform_real_distribution<double> d(0.01, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const double s0 = d(rng), e0 = s0 + d(rng) + 0.05;
      const double s1 = d(rng), e1 = s1 + d(rng) + 0.05;
      std::vector<double> bounds;
      double at = s0;
      for (int i = 0; i < 4; ++i) {
        at += (e0 - at) * d(rng) * 0.4 + 1e-4;
        if (at >= e0) break;
        bounds.push_back(at);
      }
      const auto mapped = redistribute_phones(bounds, s0, e0, s1, e1);
      std::vector<double> old_edges = {s0};
      old_edges.insert(old_edges.end(), bounds.begin(), bounds.end());
      old_edges.push_back(e0);
      std::vector<double> new_edges = {s1};
      new_edges.insert(new_edges.end(), mapped.begin(), mapped.end());
      new_edges.push_back(e1);
      for (std::size_t i = 0; i + 1 < old_edges.size(); ++i) {
        const double r_old = (old_edges[i + 1] - old_edges[i]) / (e0 - s0);
        const double r_new = (new_edges[i + 1] - new_edges[i]) / (e1 - s1);
        CHECK(r_new == doctest::Approx(r_old).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("hybrid_segment") {
  const auto table = fixtures::table();
  HybridConfig cfg;
  SUBCASE("pure silence tier is unchanged") {
    AlignmentTier t;
    t.intervals.push_back({0.0, 1.0, "SIL"});
    Waveform w{std::vector<double>(22050, 0.0), 22050};
    const auto out = hybrid_segment(w, t, table, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out.intervals[0].start_s == 0.0);
    CHECK(out.intervals[0].end_s == 1.0);
  }
  SUBCASE("already-accurate alignments stay within one frame") {
    auto utt = fixtures::make_utterance(321);
    const auto out = hybrid_segment(utt.audio, utt.truth, table, cfg);
    REQUIRE(out.size() == utt.truth.size());
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
      CHECK(std::abs(out.intervals[i].end_s - utt.truth.intervals[i].end_s) <=
            cfg.frame_spec.hop_s + 1e-9);
  }
  SUBCASE("symbols, span and silence anchors are preserved") {
    for (int seed : {1, 2, 3, 4, 5}) {
      auto utt = fixtures::make_utterance(seed);
      const auto out = hybrid_segment(utt.audio, utt.initial, table, cfg);
      out.validate();
      REQUIRE(out.size() == utt.initial.size());
      for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out.intervals[i].symbol == utt.initial.intervals[i].symbol);
      CHECK(out.end_s() == doctest::Approx(utt.initial.end_s()).epsilon(1e-12));
      for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        const bool pause_adjacent =
            is_pause_class(table.classify(out.intervals[i].symbol)) ||
            is_pause_class(table.classify(out.intervals[i + 1].symbol));
        if (pause_adjacent)
          CHECK(out.intervals[i].end_s == utt.initial.intervals[i].end_s);
      }
    }
  }
  SUBCASE("deterministic") {
    auto utt = fixtures::make_utterance(99);
    const auto a = hybrid_segment(utt.audio, utt.initial, table, cfg);
    const auto b = hybrid_segment(utt.audio, utt.initial, table, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.intervals[i].start_s == b.intervals[i].start_s);
      CHECK(a.intervals[i].end_s == b.intervals[i].end_s);
    }
  }
  SUBCASE("tier longer than the audio is rejected") {
    AlignmentTier t;
    t.intervals.push_back({0.0, 2.0, "a"});
    Waveform w{std::vector<double>(22050, 0.1), 22050};
    CHECK_THROWS_AS((void)hybrid_segment(w, t, table, cfg), Error);
  }
  SUBCASE("improves perturbed alignments on the synthetic fixture") {
    double init_err = 0.0, out_err = 0.0;
    long n = 0;
    for (int seed : {10, 11, 12, 13, 14, 15}) {
      auto utt = fixtures::make_utterance(seed);
      const auto out = hybrid_segment(utt.audio, utt.initial, table, cfg);
      for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        init_err += std::abs(utt.initial.intervals[i].end_s - utt.truth.intervals[i].end_s);
        out_err += std::abs(out.intervals[i].end_s - utt.truth.intervals[i].end_s);
        ++n;
      }
    }
    CHECK(out_err < init_err);
  }
}

TEST_CASE("export_durations") {
  SUBCASE("exact division") {
    AlignmentTier t;
    t.intervals.push_back({0.0, 0.1, "a"});
    t.intervals.push_back({0.1, 0.2, "b"});
    t.intervals.push_back({0.2, 0.3, "c"});
    const auto out = export_durations(t, 0.010, 30);
    REQUIRE(out.entries.size() == 3);
    CHECK(out.entries[0].frames == 10);
    CHECK(out.entries[1].frames == 10);
    CHECK(out.entries[2].frames == 10);
  }
  SUBCASE("largest remainder, ties to the earliest") {
    AlignmentTier t;
    t.intervals.push_back({0.0, 0.105, "a"});
    t.intervals.push_back({0.105, 0.200, "b"});
    t.intervals.push_back({0.200, 0.300, "c"});
    const auto out = export_durations(t, 0.010, 30);
    CHECK(out.entries[0].frames == 11);
    CHECK(out.entries[1].frames == 9);
    CHECK(out.entries[2].frames == 10);
  }
  SUBCASE("pause symbol substitution") {
    AlignmentTier t;
    t.intervals.push_back({0.0, 0.1, "SIL"});
    t.intervals.push_back({0.1, 0.2, "a"});
    t.intervals.push_back({0.2, 0.3, "sp"});
    t.intervals.push_back({0.3, 0.4, "k"});
    t.intervals.push_back({0.4, 0.5, "SIL"});
    const auto out = export_durations(t, 0.010, 50);
    REQUIRE(out.entries.size() == 5);
    CHECK(out.entries[0].symbol == "$");
    CHECK(out.entries[1].symbol == "a");
    CHECK(out.entries[2].symbol == ",");
    CHECK(out.entries[3].symbol == "k");
    CHECK(out.entries[4].symbol == ".");
  }
  SUBCASE("interior SIL passes through") {
    AlignmentTier t;
    t.intervals.push_back({0.0, 0.1, "a"});
    t.intervals.push_back({0.1, 0.2, "SIL"});
    t.intervals.push_back({0.2, 0.3, "k"});
    const auto out = export_durations(t, 0.010, 30);
    CHECK(out.entries[1].symbol == "SIL");
  }
  SUBCASE("budget below the phone count is rejected") {
    AlignmentTier t;
    t.intervals.push_back({0.0, 0.1, "a"});
    t.intervals.push_back({0.1, 0.2, "b"});
    CHECK_THROWS_WITH_AS((void)export_durations(t, 0.010, 1),
                         doctest::Contains("frame budget too small"), Error);
  }
  SUBCASE("empty tier takes only an empty budget") {
    CHECK(export_durations(AlignmentTier{}, 0.010, 0).entries.empty());
    CHECK_THROWS_AS((void)export_durations(AlignmentTier{}, 0.010, 5), Error);
  }
  SUBCASE("frame counts always sum to the budget exactly") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> dur(0.005, 0.4);
    for (int trial = 0; trial < 300; ++trial) {
      AlignmentTier t;
      double at = 0.0;
      const int n = 1 + static_cast<int>(rng() % 12);
      for (int i = 0; i < n; ++i) {
        const double d = dur(rng);
        t.intervals.push_back({at, at + d, "x"});
        at += d;
      }
      const double hop = 0.005 + 0.02 * (static_cast<double>(rng() % 100) / 100.0);
      const auto budget =
          static_cast<std::int64_t>(n + static_cast<std::int64_t>(rng() % 200));
      const auto out = export_durations(t, hop, budget);
      std::int64_t sum = 0;
      for (const auto& e : out.entries) {
        CHECK(e.frames >= 0);
        sum += e.frames;
      }
      CHECK(sum == budget);
    }
  }
}

TEST_CASE("duration line format") {
  AlignmentTier t;
  t.intervals.push_back({0.0, 0.1, "SIL"});
  t.intervals.push_back({0.1, 0.25, "a"});
  t.intervals.push_back({0.25, 0.4, "SIL"});
  const auto targets = export_durations(t, 0.010, 40);
  const std::string line = format_duration_line("utt01", targets);
  CHECK(line == "utt01|$:10 a:15 .:15");
  const auto [id, parsed] = parse_duration_line(line, 0.010);
  CHECK(id == "utt01");
  REQUIRE(parsed.entries.size() == 3);
  CHECK(parsed.entries[0].symbol == "$");
  CHECK(parsed.entries[1].frames == 15);
  CHECK(parsed.total_frames == 40);
  CHECK_THROWS_AS((void)parse_duration_line("no-bar-here", 0.01), Error);
  CHECK_THROWS_AS((void)parse_duration_line("utt|a:x", 0.01), Error);
}
