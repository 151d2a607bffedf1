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

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "salign/align.hpp"
#include "salign/error.hpp"
#include "salign/hybrid.hpp"
#include "salign/wav.hpp"

// Corpus manifest (one JSON object per line, stream-parseable), the flat
// key = value tool configuration, and corpus validation.

namespace salign {

struct ManifestEntry {
  std::string utt_id;
  std::string wav_path;
  std::string lab_path;
  std::optional<std::string> transcript;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  static CorpusManifest parse(const std::string& text) {
    CorpusManifest m;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw_error("manifest line ", line_no, ": ", e.what());
      }
      if (!j.is_object()) throw_error("manifest line ", line_no, ": not a JSON object");
      ManifestEntry e;
      try {
        e.utt_id = j.at("utt_id").get<std::string>();
        e.wav_path = j.at("wav_path").get<std::string>();
        e.lab_path = j.at("lab_path").get<std::string>();
        if (j.contains("transcript")) e.transcript = j["transcript"].get<std::string>();
      } catch (const nlohmann::json::exception& e2) {
        throw_error("manifest line ", line_no, ": ", e2.what());
      }
      if (e.utt_id.empty()) throw_error("manifest line ", line_no, ": empty utt_id");
      if (!seen.insert(e.utt_id).second)
        throw_error("manifest line ", line_no, ": duplicate utt_id '", e.utt_id, "'");
      m.entries.push_back(std::move(e));
    }
    return m;
  }

  static CorpusManifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io_error("cannot open manifest '", path, "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  std::string serialize() const {
    std::string out;
    for (const auto& e : entries) {
      nlohmann::json j;
      j["utt_id"] = e.utt_id;
      j["wav_path"] = e.wav_path;
      j["lab_path"] = e.lab_path;
      if (e.transcript) j["transcript"] = *e.transcript;
      out += j.dump();
      out += '\n';
    }
    return out;
  }
};

/// Flat `key = value` configuration; lines starting with '#' are comments.
/// Unknown keys are rejected.
struct ToolConfig {
  HybridConfig hybrid;
  std::size_t n_mels = 40;
  std::size_t n_ceps = 24;
  std::string phone_class_table_path = "data/phone_classes.txt";
  TimeUnit time_unit = TimeUnit::htk_100ns;
  int target_sample_rate = 0;  // 0 = keep header rate
  std::string frame_count_mode = "snip";
  SyllabifyRule syllabify_rule = SyllabifyRule::onset_attach;

  static ToolConfig defaults() { return ToolConfig{}; }

  static ToolConfig parse(const std::string& text) {
    ToolConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        std::istringstream probe(line);
        std::string tok;
        if (probe >> tok) throw_error("config line ", line_no, ": expected key = value");
        continue;
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (key.empty() || val.empty())
        throw_error("config line ", line_no, ": expected key = value");
      try {
        c.set(key, val);
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        throw_error("config line ", line_no, ": bad value '", val, "' for key '", key, "'");
      }
    }
    return c;
  }

  static ToolConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io_error("cannot open config '", path, "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  void set(const std::string& key, const std::string& val) {
    if (key == "frame_len_s") hybrid.frame_spec.frame_len_s = std::stod(val);
    else if (key == "hop_s") hybrid.frame_spec.hop_s = std::stod(val);
    else if (key == "window") hybrid.frame_spec.window = window_from_name(val);
    else if (key == "n_fft") hybrid.n_fft = std::stoul(val);
    else if (key == "n_mels") n_mels = std::stoul(val);
    else if (key == "n_ceps") n_ceps = std::stoul(val);
    else if (key == "gd.wsf") hybrid.gd.wsf = std::stod(val);
    else if (key == "gd.min_peak_prominence") hybrid.gd.min_peak_prominence = std::stod(val);
    else if (key == "gd.energy_smoothing_frames") hybrid.gd.energy_smoothing_frames = std::stoi(val);
    else if (key == "gd.denom_floor") hybrid.gd.denom_floor = std::stod(val);
    else if (key == "sbsf.high_band_low_hz") hybrid.sbsf.high_band.low_hz = std::stod(val);
    else if (key == "sbsf.high_band_high_hz") hybrid.sbsf.high_band.high_hz = std::stod(val);
    else if (key == "sbsf.low_band_low_hz") hybrid.sbsf.low_band.low_hz = std::stod(val);
    else if (key == "sbsf.low_band_high_hz") hybrid.sbsf.low_band.high_hz = std::stod(val);
    else if (key == "sbsf.search_window_s") hybrid.sbsf.search_window_s = std::stod(val);
    else if (key == "sbsf.flux_floor") hybrid.sbsf.flux_floor = std::stod(val);
    else if (key == "max_snap_shift_s") hybrid.max_snap_shift_s = std::stod(val);
    else if (key == "min_phone_dur_frames") hybrid.min_phone_dur_frames = std::stoi(val);
    else if (key == "phone_class_table") phone_class_table_path = val;
    else if (key == "time_unit") time_unit = time_unit_from_name(val);
    else if (key == "target_sample_rate") target_sample_rate = std::stoi(val);
    else if (key == "frame_count_mode") {
      if (val != "snip") throw_error("frame_count_mode '", val, "' not supported (only 'snip')");
      frame_count_mode = val;
    } else if (key == "syllabify_rule") {
      syllabify_rule = syllabify_rule_from_name(val);
      hybrid.syllabify_rule = syllabify_rule;
    } else {
      throw_error("unknown config key '", key, "'");
    }
  }

  std::string dump() const {
    std::ostringstream o;
    o << "# salign configuration (defaults shown by `salign config --dump-defaults`)\n";
    o << "frame_len_s = " << hybrid.frame_spec.frame_len_s << "\n";
    o << "hop_s = " << hybrid.frame_spec.hop_s << "\n";
    o << "window = " << window_name(hybrid.frame_spec.window) << "\n";
    o << "n_fft = " << hybrid.n_fft << "\n";
    o << "n_mels = " << n_mels << "\n";
    o << "n_ceps = " << n_ceps << "\n";
    o << "gd.wsf = " << hybrid.gd.wsf << "\n";
    o << "gd.min_peak_prominence = " << hybrid.gd.min_peak_prominence << "\n";
    o << "gd.energy_smoothing_frames = " << hybrid.gd.energy_smoothing_frames << "\n";
    o << "gd.denom_floor = " << hybrid.gd.denom_floor << "\n";
    o << "sbsf.high_band_low_hz = " << hybrid.sbsf.high_band.low_hz << "\n";
    o << "sbsf.high_band_high_hz = " << hybrid.sbsf.high_band.high_hz << "\n";
    o << "sbsf.low_band_low_hz = " << hybrid.sbsf.low_band.low_hz << "\n";
    o << "sbsf.low_band_high_hz = " << hybrid.sbsf.low_band.high_hz << "\n";
    o << "sbsf.search_window_s = " << hybrid.sbsf.search_window_s << "\n";
    o << "sbsf.flux_floor = " << hybrid.sbsf.flux_floor << "\n";
    o << "max_snap_shift_s = " << hybrid.max_snap_shift_s << "\n";
    o << "min_phone_dur_frames = " << hybrid.min_phone_dur_frames << "\n";
    o << "phone_class_table = " << phone_class_table_path << "\n";
    o << "time_unit = " << time_unit_name(time_unit) << "\n";
    o << "target_sample_rate = " << target_sample_rate << "\n";
    o << "frame_count_mode = " << frame_count_mode << "\n";
    o << "syllabify_rule = " << syllabify_rule_name(syllabify_rule) << "\n";
    return o.str();
  }
};

inline PhoneClassTable load_phone_class_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io_error("cannot open phone class table '", path, "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return PhoneClassTable::parse(ss.str());
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io_error("cannot open '", path, "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ValidationFailure {
  std::string utt_id;
  std::string reason;
};

struct ValidationReport {
  std::size_t n_checked = 0;
  std::vector<ValidationFailure> failures;

  bool ok() const { return failures.empty(); }
};

/// Per-utterance checks: files readable, labels parse and are contiguous,
/// symbols covered by the table, tier end within one frame of the audio end.
inline ValidationReport validate_corpus(const CorpusManifest& manifest,
                                        const PhoneClassTable& table, const ToolConfig& cfg) {
  ValidationReport report;
  for (const auto& e : manifest.entries) {
    ++report.n_checked;
    Waveform w;
    try {
      w = load_wav(e.wav_path, cfg.target_sample_rate);
    } catch (const Error& err) {
      report.failures.push_back({e.utt_id, err.what()});
      continue;
    }
    AlignmentTier tier;
    try {
      tier = parse_label_file(read_text_file(e.lab_path), cfg.time_unit);
      tier.validate();
    } catch (const Error& err) {
      report.failures.push_back({e.utt_id, err.what()});
      continue;
    }
    bool symbol_ok = true;
    for (const auto& iv : tier.intervals) {
      if (!table.contains(iv.symbol)) {
        report.failures.push_back({e.utt_id, "unknown phone '" + iv.symbol + "'"});
        symbol_ok = false;
        break;
      }
    }
    if (!symbol_ok) continue;
    const double limit = w.duration_s() + cfg.hybrid.frame_spec.frame_len_s;
    if (tier.end_s() > limit) {
      report.failures.push_back(
          {e.utt_id, detail::concat("tier ends at ", tier.end_s(), " s but audio lasts ",
                                    w.duration_s(), " s")});
      continue;
    }
    // duration export needs at least one frame slot per interval
    const auto frames = cfg.hybrid.frame_spec.frame_count(w.samples.size(), w.sample_rate);
    if (frames < tier.size()) {
      report.failures.push_back(
          {e.utt_id, detail::concat("frame budget too small: ", frames, " frames for ",
                                    tier.size(), " phones")});
    }
  }
  return report;
}

}  // namespace salign
