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

// End-to-end checks of the salign binary: subcommands, exit codes, and the
// on-disk formats they produce.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "salign/salign.hpp"
#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

#ifndef SALIGN_CLI_PATH
#error "SALIGN_CLI_PATH must point at the salign binary"
#endif

using namespace salign;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SALIGN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string table_text() {
  const auto table = fixtures::table();
  std::string text;
  for (const auto& [sym, cls] : table.entries())
    text += sym + " " + std::string(phone_class_name(cls)) + "\n";
  return text;
}

struct CliCorpus {
  testutil::TempDir dir{"cli"};
  std::string manifest_path;
  std::string table_path;

  explicit CliCorpus(int n_utts) {
    CorpusManifest m;
    for (int u = 0; u < n_utts; ++u) {
      auto utt = fixtures::make_utterance(6100 + u);
      const std::string id = "utt" + std::to_string(u);
      save_wav(dir.file(id + ".wav"), utt.audio);
      dir.write(id + ".lab", write_label_file(utt.initial, TimeUnit::htk_100ns));
      m.entries.push_back({id, dir.file(id + ".wav"), dir.file(id + ".lab"), std::nullopt});
    }
    dir.write("manifest.jsonl", m.serialize());
    dir.write("phones.txt", table_text());
    manifest_path = dir.file("manifest.jsonl");
    table_path = dir.file("phones.txt");
  }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("refine") == 2);  // missing required options
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("config --dump-defaults") {
  CHECK(run_cli("config --dump-defaults") == 0);
}

TEST_CASE("missing input files exit with 3") {
  CHECK(run_cli("gd --wav /nonexistent/x.wav --out -") == 3);
  CHECK(run_cli("validate --manifest /nonexistent/m.jsonl --table /nonexistent/t.txt") == 3);
}

TEST_CASE("validate") {
  CliCorpus corpus(2);
  CHECK(run_cli("validate --manifest " + corpus.manifest_path + " --table " +
                corpus.table_path) == 0);
  corpus.dir.write("bad.lab", "0 1000000 zz\n");
  CorpusManifest m = CorpusManifest::load(corpus.manifest_path);
  m.entries[0].lab_path = corpus.dir.file("bad.lab");
  corpus.dir.write("manifest_bad.jsonl", m.serialize());
  CHECK(run_cli("validate --manifest " + corpus.dir.file("manifest_bad.jsonl") + " --table " +
                corpus.table_path) == 1);
}

TEST_CASE("refine writes labels, durations and a summary") {
  CliCorpus corpus(2);
  const std::string out = corpus.dir.file("out");
  CHECK(run_cli("refine --manifest " + corpus.manifest_path + " --table " + corpus.table_path +
                " --out-dir " + out + " --workers 2") == 0);
  CHECK(fs::exists(out + "/labs/utt0.lab"));
  CHECK(fs::exists(out + "/labs/utt1.lab"));
  CHECK(fs::exists(out + "/durations.txt"));
  CHECK(fs::exists(out + "/summary.json"));
  // refined labels still parse and keep the symbol sequence
  const auto refined =
      parse_label_file(testutil::slurp(out + "/labs/utt0.lab"), TimeUnit::htk_100ns);
  const auto initial =
      parse_label_file(testutil::slurp(corpus.dir.file("utt0.lab")), TimeUnit::htk_100ns);
  REQUIRE(refined.size() == initial.size());
  for (std::size_t i = 0; i < refined.size(); ++i)
    CHECK(refined.intervals[i].symbol == initial.intervals[i].symbol);
}

TEST_CASE("gd and sbsf dump csv") {
  CliCorpus corpus(1);
  const std::string gd_csv = corpus.dir.file("gd.csv");
  CHECK(run_cli("gd --wav " + corpus.dir.file("utt0.wav") + " --out " + gd_csv) == 0);
  const auto gd_text = testutil::slurp(gd_csv);
  CHECK(gd_text.find("frame,time_s,tau") != std::string::npos);
  CHECK(gd_text.find("# boundary,") != std::string::npos);

  const std::string flux_csv = corpus.dir.file("flux.csv");
  CHECK(run_cli("sbsf --wav " + corpus.dir.file("utt0.wav") + " --band high --out " +
                flux_csv) == 0);
  const auto flux_text = testutil::slurp(flux_csv);
  CHECK(flux_text.find("# band high: 4000-8000 Hz") != std::string::npos);
  CHECK(flux_text.find("frame,time_s,flux") != std::string::npos);
  CHECK(run_cli("sbsf --wav " + corpus.dir.file("utt0.wav") + " --band sideways") == 2);
}

TEST_CASE("export-durations emits one parseable line") {
  CliCorpus corpus(1);
  const std::string out = corpus.dir.file("dur.txt");
  CHECK(run_cli("export-durations --lab " + corpus.dir.file("utt0.lab") + " --wav " +
                corpus.dir.file("utt0.wav") + " --out " + out) == 0);
  const auto [id, targets] = parse_duration_line(
      testutil::slurp(out).substr(0, testutil::slurp(out).find('\n')));
  CHECK(id == "utt0");
  CHECK(targets.total_frames > 0);
}

TEST_CASE("eval-boundaries compares hypothesis directories") {
  CliCorpus corpus(2);
  const std::string out = corpus.dir.file("ref_out");
  REQUIRE(run_cli("refine --manifest " + corpus.manifest_path + " --table " +
                  corpus.table_path + " --out-dir " + out) == 0);
  const std::string csv = corpus.dir.file("eval.csv");
  const std::string json = corpus.dir.file("eval.json");
  CHECK(run_cli("eval-boundaries --manifest " + corpus.manifest_path + " --hyp-dir " + out +
                "/labs --csv " + csv + " --json " + json) == 0);
  CHECK(testutil::slurp(csv).find("utt_id,mean_abs_ms") != std::string::npos);
  CHECK(testutil::slurp(json).find("pooled_mean_abs_ms") != std::string::npos);
}

TEST_CASE("eval-mcd scores synthesis directories") {
  CliCorpus corpus(2);
  // "synthesised" audio = the references themselves: MCD must be 0
  const std::string syn = corpus.dir.file("syn");
  fs::create_directories(syn);
  for (int u = 0; u < 2; ++u)
    fs::copy_file(corpus.dir.file("utt" + std::to_string(u) + ".wav"),
                  syn + "/utt" + std::to_string(u) + ".wav");
  const std::string csv = corpus.dir.file("mcd.csv");
  const std::string json = corpus.dir.file("mcd.json");
  CHECK(run_cli("eval-mcd --manifest " + corpus.manifest_path + " --syn-dir " + syn +
                " --syn2-dir " + syn + " --csv " + csv + " --json " + json + " --seed 7") == 0);
  CHECK(testutil::slurp(csv).find("utt_id,mcd_db") != std::string::npos);
  const auto j = testutil::slurp(json);
  CHECK(j.find("mean_mcd_db") != std::string::npos);
  CHECK(j.find("p_value") != std::string::npos);
  CHECK(testutil::slurp(csv).find("utt0,0.0000") != std::string::npos);
}

TEST_CASE("viz writes an svg") {
  CliCorpus corpus(1);
  const std::string out = corpus.dir.file("plot.svg");
  CHECK(run_cli("viz --wav " + corpus.dir.file("utt0.wav") + " --lab " +
                corpus.dir.file("utt0.lab") + " --out " + out) == 0);
  const auto svg = testutil::slurp(out);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("class=\"spectrogram\"") != std::string::npos);
}
