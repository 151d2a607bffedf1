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
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "salign/error.hpp"

// Alignment tiers and their on-disk label format, the phone class table,
// and rule-based syllabification.
//
// Label format: one interval per line, `start end symbol`, single spaces,
// UTF-8 symbols, LF line endings.  htk_100ns uses unsigned integer ticks of
// 100 ns; seconds uses fixed 7-decimal notation.

namespace salign {

constexpr double kContiguityTolS = 1e-9;

struct LabeledInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string symbol;

  double duration_s() const { return end_s - start_s; }
};

enum class TierLevel { phone, syllable };

struct AlignmentTier {
  std::vector<LabeledInterval> intervals;
  TierLevel level = TierLevel::phone;

  bool empty() const { return intervals.empty(); }
  std::size_t size() const { return intervals.size(); }
  double start_s() const { return intervals.empty() ? 0.0 : intervals.front().start_s; }
  double end_s() const { return intervals.empty() ? 0.0 : intervals.back().end_s; }

  /// Checks ordering, positive durations, contiguity and non-empty symbols.
  void validate() const {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const auto& iv = intervals[i];
      if (iv.symbol.empty()) throw_error("interval ", i, " has an empty symbol");
      if (!(iv.start_s < iv.end_s))
        throw_error("interval ", i, " ('", iv.symbol, "') has non-positive duration [",
                    iv.start_s, ", ", iv.end_s, ")");
      if (i > 0) {
        const double gap = iv.start_s - intervals[i - 1].end_s;
        if (std::abs(gap) > kContiguityTolS)
          throw_error("intervals ", i - 1, " and ", i, " are not contiguous (",
                      gap > 0 ? "gap" : "overlap", " of ", std::abs(gap), " s)");
      }
    }
  }

  std::vector<std::string> symbols() const {
    std::vector<std::string> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) out.push_back(iv.symbol);
    return out;
  }
};

enum class TimeUnit { htk_100ns, seconds };

inline TimeUnit time_unit_from_name(const std::string& s) {
  if (s == "htk_100ns") return TimeUnit::htk_100ns;
  if (s == "seconds") return TimeUnit::seconds;
  throw_error("unknown time unit '", s, "' (expected htk_100ns or seconds)");
}

inline const char* time_unit_name(TimeUnit u) {
  return u == TimeUnit::htk_100ns ? "htk_100ns" : "seconds";
}

/// Parses `start end symbol` lines into a contiguity-checked tier.
inline AlignmentTier parse_label_file(const std::string& text, TimeUnit unit,
                                      TierLevel level = TierLevel::phone) {
  AlignmentTier tier;
  tier.level = level;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string start_tok, end_tok, symbol, extra;
    if (!(ls >> start_tok >> end_tok >> symbol))
      throw_error("unparsable label line ", line_no, ": '", line, "'");
    if (ls >> extra)
      throw_error("trailing field on label line ", line_no, ": '", extra, "'");
    double start_s = 0.0, end_s = 0.0;
    try {
      if (unit == TimeUnit::htk_100ns) {
        if (start_tok.find_first_not_of("0123456789") != std::string::npos ||
            end_tok.find_first_not_of("0123456789") != std::string::npos)
          throw std::invalid_argument("non-integer tick");
        start_s = static_cast<double>(std::stoull(start_tok)) / 1e7;
        end_s = static_cast<double>(std::stoull(end_tok)) / 1e7;
      } else {
        std::size_t used = 0;
        start_s = std::stod(start_tok, &used);
        if (used != start_tok.size()) throw std::invalid_argument("bad number");
        end_s = std::stod(end_tok, &used);
        if (used != end_tok.size()) throw std::invalid_argument("bad number");
      }
    } catch (const std::exception&) {
      throw_error("bad time field on label line ", line_no, ": '", line, "'");
    }
    if (!(start_s < end_s))
      throw_error("non-positive interval on line ", line_no, ": [", start_s, ", ", end_s, ")");
    if (!tier.intervals.empty()) {
      const double prev_end = tier.intervals.back().end_s;
      if (start_s < prev_end - kContiguityTolS)
        throw_error("overlap at line ", line_no, ": starts at ", start_s,
                    " before previous end ", prev_end);
      if (start_s > prev_end + kContiguityTolS)
        throw_error("gap at line ", line_no, ": starts at ", start_s, " after previous end ",
                    prev_end);
    }
    tier.intervals.push_back({start_s, end_s, symbol});
  }
  return tier;
}

inline std::string write_label_file(const AlignmentTier& tier, TimeUnit unit) {
  std::string out;
  char buf[64];
  for (const auto& iv : tier.intervals) {
    if (unit == TimeUnit::htk_100ns) {
      const auto s = static_cast<unsigned long long>(std::llround(iv.start_s * 1e7));
      const auto e = static_cast<unsigned long long>(std::llround(iv.end_s * 1e7));
      std::snprintf(buf, sizeof buf, "%llu %llu ", s, e);
    } else {
      std::snprintf(buf, sizeof buf, "%.7f %.7f ", iv.start_s, iv.end_s);
    }
    out += buf;
    out += iv.symbol;
    out += '\n';
  }
  return out;
}

enum class PhoneClass {
  vowel,
  stop,
  fricative,
  affricate,
  nasal,
  semivowel,
  trill,
  lateral,
  silence,
  short_pause
};

inline const char* phone_class_name(PhoneClass c) {
  switch (c) {
    case PhoneClass::vowel: return "vowel";
    case PhoneClass::stop: return "stop";
    case PhoneClass::fricative: return "fricative";
    case PhoneClass::affricate: return "affricate";
    case PhoneClass::nasal: return "nasal";
    case PhoneClass::semivowel: return "semivowel";
    case PhoneClass::trill: return "trill";
    case PhoneClass::lateral: return "lateral";
    case PhoneClass::silence: return "silence";
    case PhoneClass::short_pause: return "short_pause";
  }
  return "?";
}

inline PhoneClass phone_class_from_name(const std::string& s) {
  static const std::unordered_map<std::string, PhoneClass> map = {
      {"vowel", PhoneClass::vowel},         {"stop", PhoneClass::stop},
      {"fricative", PhoneClass::fricative}, {"affricate", PhoneClass::affricate},
      {"nasal", PhoneClass::nasal},         {"semivowel", PhoneClass::semivowel},
      {"trill", PhoneClass::trill},         {"lateral", PhoneClass::lateral},
      {"silence", PhoneClass::silence},     {"short_pause", PhoneClass::short_pause}};
  auto it = map.find(s);
  if (it == map.end()) throw_error("unknown phone class '", s, "'");
  return it->second;
}

inline bool is_pause_class(PhoneClass c) {
  return c == PhoneClass::silence || c == PhoneClass::short_pause;
}

/// symbol -> articulatory class.  "SIL" and "sp" are always present.
class PhoneClassTable {
 public:
  PhoneClassTable() {
    map_["SIL"] = PhoneClass::silence;
    map_["sp"] = PhoneClass::short_pause;
  }

  /// Parses whitespace-separated `symbol class` lines; '#' starts a comment.
  static PhoneClassTable parse(const std::string& text) {
    PhoneClassTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string symbol, cls_name, extra;
      if (!(ls >> symbol)) continue;  // blank/comment line
      if (!(ls >> cls_name))
        throw_error("phone class table line ", line_no, ": missing class for '", symbol, "'");
      if (ls >> extra)
        throw_error("phone class table line ", line_no, ": trailing field '", extra, "'");
      const PhoneClass cls = phone_class_from_name(cls_name);
      table.insert(symbol, cls, line_no);
    }
    return table;
  }

  void insert(const std::string& symbol, PhoneClass cls, std::size_t line_no = 0) {
    auto it = map_.find(symbol);
    if (it != map_.end() && it->second != cls) {
      if (line_no > 0)
        throw_error("phone class table line ", line_no, ": '", symbol, "' remapped from ",
                    phone_class_name(it->second), " to ", phone_class_name(cls));
      throw_error("'", symbol, "' already mapped to ", phone_class_name(it->second));
    }
    map_[symbol] = cls;
  }

  bool contains(const std::string& symbol) const { return map_.count(symbol) > 0; }

  PhoneClass classify(const std::string& symbol) const {
    auto it = map_.find(symbol);
    if (it == map_.end()) throw_error("unknown phone '", symbol, "'");
    return it->second;
  }

  std::size_t size() const { return map_.size(); }
  const std::unordered_map<std::string, PhoneClass>& entries() const { return map_; }

 private:
  std::unordered_map<std::string, PhoneClass> map_;
};

inline PhoneClass classify(const std::string& symbol, const PhoneClassTable& table) {
  return table.classify(symbol);
}

struct Syllable {
  std::size_t lo = 0;       // first phone index (inclusive)
  std::size_t hi = 0;       // one past last phone index
  std::size_t nucleus = 0;  // vowel index; == lo for vowel-less pseudo-syllables
};

// Syllabification rule set.  onset_attach is the only implemented variant;
// the enum records the choice so language-specific rules can slot in.
enum class SyllabifyRule { onset_attach };

inline SyllabifyRule syllabify_rule_from_name(const std::string& s) {
  if (s == "onset_attach") return SyllabifyRule::onset_attach;
  throw_error("unknown syllabify rule '", s, "' (only onset_attach is implemented)");
}

inline const char* syllabify_rule_name(SyllabifyRule) { return "onset_attach"; }

// Onset-attachment syllabification: pauses split the tier into speech
// chunks; every vowel in a chunk is one nucleus; consonants before the first
// vowel join the first syllable, each intervocalic consonant run joins the
// following syllable, trailing consonants join the last syllable.  A chunk
// with no vowel becomes a single pseudo-syllable (nucleus == lo).
inline std::vector<Syllable> syllabify(const AlignmentTier& phone_tier,
                                       const PhoneClassTable& table,
                                       SyllabifyRule rule = SyllabifyRule::onset_attach) {
  (void)rule;  // one variant so far
  const std::size_t n = phone_tier.size();
  std::vector<PhoneClass> cls(n);
  for (std::size_t i = 0; i < n; ++i) cls[i] = table.classify(phone_tier.intervals[i].symbol);

  std::vector<Syllable> out;
  std::size_t i = 0;
  while (i < n) {
    if (is_pause_class(cls[i])) {
      ++i;
      continue;
    }
    std::size_t chunk_lo = i;
    while (i < n && !is_pause_class(cls[i])) ++i;
    const std::size_t chunk_hi = i;

    std::vector<std::size_t> vowels;
    for (std::size_t k = chunk_lo; k < chunk_hi; ++k)
      if (cls[k] == PhoneClass::vowel) vowels.push_back(k);

    if (vowels.empty()) {
      out.push_back({chunk_lo, chunk_hi, chunk_lo});
      continue;
    }
    for (std::size_t v = 0; v < vowels.size(); ++v) {
      Syllable s;
      s.lo = (v == 0) ? chunk_lo : vowels[v - 1] + 1;
      s.hi = (v + 1 == vowels.size()) ? chunk_hi : vowels[v] + 1;
      s.nucleus = vowels[v];
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace salign
