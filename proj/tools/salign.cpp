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

// salign: refine phone-level forced alignments with group-delay and
// sub-band spectral-flux cues, export duration targets, and evaluate
// alignments objectively.
//
// Exit codes: 0 success, 1 validation/eval mismatch, 2 usage error,
// 3 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "salign/salign.hpp"

namespace fs = std::filesystem;
using namespace salign;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string table_path;
  std::string time_unit;
};

ToolConfig load_config(const CommonOpts& opts) {
  ToolConfig cfg = opts.config_path.empty() ? ToolConfig::defaults()
                                            : ToolConfig::load(opts.config_path);
  if (!opts.time_unit.empty()) cfg.time_unit = time_unit_from_name(opts.time_unit);
  return cfg;
}

PhoneClassTable load_table(const CommonOpts& opts, const ToolConfig& cfg) {
  const std::string path =
      !opts.table_path.empty() ? opts.table_path : cfg.phone_class_table_path;
  if (path.empty())
    throw_error("no phone class table given (use --table or phone_class_table in the config)");
  return load_phone_class_table(path);
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io_error("cannot create '", path, "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_io_error("failed writing '", path, "'");
}

AlignmentTier load_tier(const std::string& path, TimeUnit unit) {
  AlignmentTier t = parse_label_file(read_text_file(path), unit);
  t.validate();
  return t;
}

int cmd_validate(const CommonOpts& common, const std::string& manifest_path) {
  const ToolConfig cfg = load_config(common);
  const PhoneClassTable table = load_table(common, cfg);
  const CorpusManifest manifest = CorpusManifest::load(manifest_path);
  const ValidationReport report = validate_corpus(manifest, table, cfg);
  for (const auto& f : report.failures)
    std::cout << "FAIL " << f.utt_id << ": " << f.reason << "\n";
  std::cout << report.n_checked - report.failures.size() << "/" << report.n_checked
            << " utterances valid\n";
  return report.ok() ? 0 : 1;
}

int cmd_refine(const CommonOpts& common, const std::string& manifest_path,
               const std::string& out_dir, unsigned workers) {
  const ToolConfig cfg = load_config(common);
  const PhoneClassTable table = load_table(common, cfg);
  const CorpusManifest manifest = CorpusManifest::load(manifest_path);
  const ValidationReport report = validate_corpus(manifest, table, cfg);
  if (!report.ok()) {
    for (const auto& f : report.failures)
      std::cerr << "FAIL " << f.utt_id << ": " << f.reason << "\n";
    std::cerr << "corpus failed validation; not refining\n";
    return 1;
  }
  const RunSummary summary = run_refine(manifest, table, cfg, workers, out_dir);
  std::cout << summary.n_ok << " refined, " << summary.n_failed << " failed, "
            << summary.wall_ms << " ms\n";
  for (const auto& r : summary.results)
    if (!r.ok) std::cerr << "FAIL " << r.utt_id << ": " << r.error << "\n";
  return summary.n_failed == 0 ? 0 : 1;
}

int cmd_gd(const CommonOpts& common, const std::string& wav_path, const std::string& out) {
  const ToolConfig cfg = load_config(common);
  const Waveform w = load_wav(wav_path, cfg.target_sample_rate);
  const FrameContour energy = short_term_energy(w, cfg.hybrid.frame_spec);
  const FrameContour tau = min_phase_group_delay(energy, cfg.hybrid.gd);
  const GdBoundaries bounds = detect_syllable_boundaries(tau, cfg.hybrid.gd);
  std::string csv = "frame,time_s,tau\n";
  char buf[96];
  for (std::size_t m = 0; m < tau.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.9g\n", m, tau.frame_time_s(m), tau.values[m]);
    csv += buf;
  }
  for (double b : bounds.boundary_times_s) {
    std::snprintf(buf, sizeof buf, "# boundary,%.6f\n", b);
    csv += buf;
  }
  write_output(out, csv);
  return 0;
}

int cmd_sbsf(const CommonOpts& common, const std::string& wav_path, const std::string& band_name,
             const std::string& out) {
  const ToolConfig cfg = load_config(common);
  const Waveform w = load_wav(wav_path, cfg.target_sample_rate);
  const BandSpec& band =
      band_name == "low" ? cfg.hybrid.sbsf.low_band : cfg.hybrid.sbsf.high_band;
  const FrameContour flux = subband_spectral_flux(w, sbsf_frame_spec(cfg.hybrid.frame_spec),
                                                  cfg.hybrid.n_fft, band);
  char buf[96];
  std::snprintf(buf, sizeof buf, "# band %s: %.0f-%.0f Hz\n", band.name.c_str(), band.low_hz,
                band.high_hz);
  std::string csv = buf;
  csv += "frame,time_s,flux\n";
  for (std::size_t m = 0; m < flux.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.9g\n", m, flux.frame_time_s(m), flux.values[m]);
    csv += buf;
  }
  write_output(out, csv);
  return 0;
}

int cmd_export_durations(const CommonOpts& common, const std::string& lab_path,
                         const std::string& wav_path, long long total_frames,
                         std::string utt_id, const std::string& out) {
  const ToolConfig cfg = load_config(common);
  const AlignmentTier tier = load_tier(lab_path, cfg.time_unit);
  if (total_frames < 0) {
    if (wav_path.empty())
      throw_error("need --wav or --total-frames to size the frame grid");
    const Waveform w = load_wav(wav_path, cfg.target_sample_rate);
    total_frames = static_cast<long long>(
        cfg.hybrid.frame_spec.frame_count(w.samples.size(), w.sample_rate));
  }
  if (utt_id.empty()) utt_id = fs::path(lab_path).stem().string();
  const DurationTargets targets =
      export_durations(tier, cfg.hybrid.frame_spec.hop_s, total_frames);
  write_output(out, format_duration_line(utt_id, targets) + "\n");
  return 0;
}

int cmd_eval_boundaries(const CommonOpts& common, const std::string& manifest_path,
                        const std::string& hyp_dir, const std::string& hyp2_dir,
                        const std::string& csv_path, const std::string& json_path,
                        std::uint64_t seed) {
  const ToolConfig cfg = load_config(common);
  const CorpusManifest manifest = CorpusManifest::load(manifest_path);
  std::string csv = "utt_id,mean_abs_ms,median_abs_ms,n_boundaries\n";
  std::vector<double> means1, means2;
  double pooled_sum = 0.0;
  std::int64_t pooled_n = 0;
  std::map<double, double> pooled_within;
  for (const auto& e : manifest.entries) {
    const AlignmentTier ref = load_tier(e.lab_path, cfg.time_unit);
    const AlignmentTier hyp =
        load_tier((fs::path(hyp_dir) / (e.utt_id + ".lab")).string(), cfg.time_unit);
    const BoundaryDiffReport rep = boundary_diff(ref, hyp);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%lld\n", e.utt_id.c_str(), rep.mean_abs_ms,
                  rep.median_abs_ms, static_cast<long long>(rep.n_boundaries));
    csv += buf;
    means1.push_back(rep.mean_abs_ms);
    pooled_sum += rep.mean_abs_ms * static_cast<double>(rep.n_boundaries);
    pooled_n += rep.n_boundaries;
    for (const auto& [tol, frac] : rep.pct_within)
      pooled_within[tol] += frac * static_cast<double>(rep.n_boundaries);
    if (!hyp2_dir.empty()) {
      const AlignmentTier hyp2 =
          load_tier((fs::path(hyp2_dir) / (e.utt_id + ".lab")).string(), cfg.time_unit);
      means2.push_back(boundary_diff(ref, hyp2).mean_abs_ms);
    }
  }
  nlohmann::json j;
  j["n_utts"] = manifest.entries.size();
  j["pooled_mean_abs_ms"] = pooled_n ? pooled_sum / static_cast<double>(pooled_n) : 0.0;
  j["n_boundaries"] = pooled_n;
  for (auto& [tol, acc] : pooled_within)
    j["pct_within"][std::to_string(static_cast<int>(tol)) + "ms"] =
        pooled_n ? acc / static_cast<double>(pooled_n) : 0.0;
  if (!means2.empty()) {
    j["permutation_test"]["p_value"] = paired_permutation_test(means1, means2, 10000, seed);
    j["permutation_test"]["n_resamples"] = 10000;
    j["permutation_test"]["seed"] = seed;
  }
  write_output(csv_path, csv);
  write_output(json_path, j.dump(2) + "\n");
  return 0;
}

int cmd_eval_mcd(const CommonOpts& common, const std::string& manifest_path,
                 const std::string& syn_dir, const std::string& syn2_dir,
                 const std::string& csv_path, const std::string& json_path,
                 std::uint64_t seed) {
  const ToolConfig cfg = load_config(common);
  const CorpusManifest manifest = CorpusManifest::load(manifest_path);
  std::string csv = "utt_id,mcd_db\n";
  std::vector<double> scores1, scores2;
  auto cepstra_of = [&](const std::string& path) {
    const Waveform w = load_wav(path, cfg.target_sample_rate);
    return mel_cepstra(w, cfg.hybrid.frame_spec, cfg.hybrid.n_fft, cfg.n_mels, cfg.n_ceps);
  };
  for (const auto& e : manifest.entries) {
    const CepstraSequence ref = cepstra_of(e.wav_path);
    const CepstraSequence syn = cepstra_of((fs::path(syn_dir) / (e.utt_id + ".wav")).string());
    const McdResult r = mcd(ref, syn);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s,%.4f\n", e.utt_id.c_str(), r.mcd_db);
    csv += buf;
    scores1.push_back(r.mcd_db);
    if (!syn2_dir.empty()) {
      const CepstraSequence syn2 =
          cepstra_of((fs::path(syn2_dir) / (e.utt_id + ".wav")).string());
      scores2.push_back(mcd(ref, syn2).mcd_db);
    }
  }
  double mean = 0.0;
  for (double s : scores1) mean += s;
  if (!scores1.empty()) mean /= static_cast<double>(scores1.size());
  nlohmann::json j;
  j["n_utts"] = scores1.size();
  j["mean_mcd_db"] = mean;
  if (!scores2.empty()) {
    j["permutation_test"]["p_value"] = paired_permutation_test(scores1, scores2, 10000, seed);
    j["permutation_test"]["n_resamples"] = 10000;
    j["permutation_test"]["seed"] = seed;
  }
  write_output(csv_path, csv);
  write_output(json_path, j.dump(2) + "\n");
  return 0;
}

int cmd_viz(const CommonOpts& common, const std::string& wav_path,
            const std::vector<std::string>& lab_paths, const std::string& out) {
  const ToolConfig cfg = load_config(common);
  const Waveform w = load_wav(wav_path, cfg.target_sample_rate);
  std::vector<NamedTier> tiers;
  for (const auto& p : lab_paths)
    tiers.push_back({fs::path(p).stem().string(), load_tier(p, cfg.time_unit)});
  const std::string svg =
      render_alignment_svg(w, tiers, cfg.hybrid.frame_spec, cfg.hybrid.n_fft);
  write_output(out, svg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signal-processing aided refinement of phone-level forced alignments"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  CommonOpts common;
  app.add_option("--config", common.config_path, "configuration file (key = value)");
  app.add_option("--table", common.table_path, "phone class table (symbol class per line)");
  app.add_option("--time-unit", common.time_unit, "label time unit: htk_100ns or seconds");

  std::string manifest_path, out_dir, wav_path, lab_path, band = "high";
  std::string hyp_dir, hyp2_dir, syn_dir, syn2_dir, csv_path, json_path, out_path, utt_id;
  std::vector<std::string> lab_paths;
  unsigned workers = 1;
  long long total_frames = -1;
  std::uint64_t seed = 0;
  bool dump_defaults = false;

  auto* validate = app.add_subcommand("validate", "check a corpus manifest");
  validate->add_option("--manifest", manifest_path, "JSON-lines corpus manifest")->required();

  auto* refine = app.add_subcommand("refine", "refine alignments for a whole corpus");
  refine->add_option("--manifest", manifest_path, "JSON-lines corpus manifest")->required();
  refine->add_option("--out-dir", out_dir, "output directory")->required();
  refine->add_option("--workers", workers, "worker thread count");

  auto* gd = app.add_subcommand("gd", "dump the group-delay contour and boundaries as CSV");
  gd->add_option("--wav", wav_path, "input wav")->required();
  gd->add_option("--out", out_path, "output CSV ('-' = stdout)");

  auto* sbsf = app.add_subcommand("sbsf", "dump sub-band spectral flux as CSV");
  sbsf->add_option("--wav", wav_path, "input wav")->required();
  sbsf->add_option("--band", band, "band: high or low")
      ->check(CLI::IsMember({"high", "low"}));
  sbsf->add_option("--out", out_path, "output CSV ('-' = stdout)");

  auto* exportd = app.add_subcommand("export-durations", "emit duration targets for one label file");
  exportd->add_option("--lab", lab_path, "label file")->required();
  exportd->add_option("--wav", wav_path, "wav used to size the frame grid");
  exportd->add_option("--total-frames", total_frames, "frame budget override");
  exportd->add_option("--utt-id", utt_id, "utterance id (default: label file stem)");
  exportd->add_option("--out", out_path, "output file ('-' = stdout)");

  auto* evalb = app.add_subcommand("eval-boundaries", "boundary statistics vs reference labels");
  evalb->add_option("--manifest", manifest_path, "manifest providing reference labels")->required();
  evalb->add_option("--hyp-dir", hyp_dir, "directory of <utt_id>.lab hypotheses")->required();
  evalb->add_option("--hyp2-dir", hyp2_dir, "second hypothesis set for a paired permutation test");
  evalb->add_option("--csv", csv_path, "per-utterance CSV ('-' = stdout)");
  evalb->add_option("--json", json_path, "summary JSON ('-' = stdout)");
  evalb->add_option("--seed", seed, "permutation test seed");

  auto* evalm = app.add_subcommand("eval-mcd", "mel-cepstral distortion vs reference audio");
  evalm->add_option("--manifest", manifest_path, "manifest providing reference wavs")->required();
  evalm->add_option("--syn-dir", syn_dir, "directory of <utt_id>.wav synthesised audio")->required();
  evalm->add_option("--syn2-dir", syn2_dir, "second synthesis set for a paired permutation test");
  evalm->add_option("--csv", csv_path, "per-utterance CSV ('-' = stdout)");
  evalm->add_option("--json", json_path, "summary JSON ('-' = stdout)");
  evalm->add_option("--seed", seed, "permutation test seed");

  auto* viz = app.add_subcommand("viz", "render tiers + spectrogram + waveform as SVG");
  viz->add_option("--wav", wav_path, "input wav")->required();
  viz->add_option("--lab", lab_paths, "label file (repeatable)")->required();
  viz->add_option("--out", out_path, "output SVG ('-' = stdout)");

  auto* config = app.add_subcommand("config", "configuration helpers");
  config->add_flag("--dump-defaults", dump_defaults, "print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(common, manifest_path);
    if (refine->parsed()) return cmd_refine(common, manifest_path, out_dir, workers);
    if (gd->parsed()) return cmd_gd(common, wav_path, out_path);
    if (sbsf->parsed()) return cmd_sbsf(common, wav_path, band, out_path);
    if (exportd->parsed())
      return cmd_export_durations(common, lab_path, wav_path, total_frames, utt_id, out_path);
    if (evalb->parsed())
      return cmd_eval_boundaries(common, manifest_path, hyp_dir, hyp2_dir, csv_path, json_path,
                                 seed);
    if (evalm->parsed())
      return cmd_eval_mcd(common, manifest_path, syn_dir, syn2_dir, csv_path, json_path, seed);
    if (viz->parsed()) return cmd_viz(common, wav_path, lab_paths, out_path);
    if (config->parsed()) {
      if (dump_defaults) std::cout << ToolConfig::defaults().dump();
      return 0;
    }
  } catch (const IoError& e) {
    std::cerr << "salign: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "salign: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
