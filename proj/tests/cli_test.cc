// Copyright 2026 The speechqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "speechqc/activity.h"
#include "speechqc/harness.h"
#include "speechqc/io_util.h"
#include "speechqc/separator.h"
#include "speechqc/synth.h"
#include "speechqc/wav.h"
#include "test_util.h"

namespace speechqc {
namespace {

using Json = nlohmann::json;
using testing::ReadText;
using testing::TempDir;

struct Result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

Result RunTool(const TempDir& dir, const std::vector<std::string>& args) {
  std::string cmd = ShellQuote(SPEECHQC_BINARY);
  for (const std::string& a : args) cmd += " " + ShellQuote(a);
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  cmd += " >" + ShellQuote(out.string()) + " 2>" + ShellQuote(err.string());
  const int status = std::system(cmd.c_str());
  Result r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadText(out);
  r.err = ReadText(err);
  return r;
}

// One synthetic pair mixed at `sbld`, written as WAVs plus a sidecar.
class CliTest : public ::testing::Test {
 protected:
  std::string Write(double sbld, std::uint64_t seed = 4, double seconds = 20.0) {
    const SyntheticPair p = SynthesizePair(seconds, seed);
    const MixedProgram m =
        MixAtSbld(p.speech, p.background, {sbld, AlignPolicy::kPad, 1}, &p.activity);
    const std::string tag = "p" + std::to_string(counter_++);
    WriteWav(dir_ / (tag + "_mix.wav"), *m.stems.mix, SampleFormat::kFloat32);
    WriteWav(dir_ / (tag + "_speech.wav"), *m.stems.speech, SampleFormat::kFloat32);
    WriteWav(dir_ / (tag + "_background.wav"), *m.stems.background,
             SampleFormat::kFloat32);
    SaveActivity(dir_ / (tag + "_activity.csv"), p.activity);
    return (dir_ / tag).string();
  }
  std::vector<std::string> Stems(const std::string& p) {
    return {"--mix", p + "_mix.wav", "--speech", p + "_speech.wav",
            "--activity", p + "_activity.csv"};
  }
  Result Analyze(std::vector<std::string> inputs, const std::string& out,
                 std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"analyze"};
    args.insert(args.end(), inputs.begin(), inputs.end());
    args.insert(args.end(), {"--out", (dir_ / out).string()});
    args.insert(args.end(), extra.begin(), extra.end());
    return RunTool(dir_, args);
  }
  Json Report(const std::string& out) {
    return Json::parse(ReadText(dir_ / out / "report.json"));
  }
  std::string File(const std::string& out, const std::string& name) {
    return ReadText(dir_ / out / name);
  }

  TempDir dir_;
  int counter_ = 0;
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(RunTool(dir_, {}).exit_code, 1);
  EXPECT_EQ(RunTool(dir_, {"analyze", "--out", (dir_ / "o").string()}).exit_code, 1);
  EXPECT_EQ(RunTool(dir_, {"analyze", "--mix", "/nonexistent.wav"}).exit_code, 1);
  EXPECT_EQ(RunTool(dir_, {"frobnicate"}).exit_code, 1);
  const Result r = RunTool(dir_, {"analyze", "--mix", "x.wav", "--rules", "nope"});
  EXPECT_EQ(r.exit_code, 1);
}

TEST_F(CliTest, SpeechOnlyPasses) {
  const SyntheticPair p = SynthesizePair(20.0, 5);
  const AudioBuffer speech = ApplyGainDb(p.speech, -23.0 - *IntegratedLoudness(p.speech).value);
  WriteWav(dir_ / "speech.wav", speech, SampleFormat::kPcm24);
  const Result r = Analyze({"--speech", (dir_ / "speech.wav").string()}, "out");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const Json j = Report("out");
  EXPECT_NEAR(j["measures"]["program_loudness"]["value"].get<double>(), -23.0, 0.1);
  EXPECT_EQ(j["measures"]["critical_percentage"]["value"].get<double>(), 0.0);
  EXPECT_TRUE(j["qc"]["passed"].get<bool>());
  EXPECT_NE(r.out.find("qc result: pass"), std::string::npos);
}

TEST_F(CliTest, LowSbldMixViolatesPaperDefaults) {
  const std::string p = Write(-5.0);
  const Result r = Analyze(Stems(p), "out", {"--reproducible"});
  EXPECT_EQ(r.exit_code, 2) << r.err;
  const Json j = Report("out");
  EXPECT_NEAR(j["measures"]["sbld_integrated"]["value"].get<double>(), -5.0, 0.2);
  ASSERT_EQ(j["qc"]["findings"].size(), 2u);
  EXPECT_EQ(j["qc"]["findings"][0]["rule"], "min_sbld");
  EXPECT_EQ(j["qc"]["findings"][0]["outcome"], "fail");
  EXPECT_EQ(j["qc"]["findings"][1]["rule"], "max_critical_percentage");
  EXPECT_EQ(j["qc"]["findings"][1]["outcome"], "fail");
  EXPECT_EQ(j["activity"]["source"], "external");
  const std::string timelines = File("out", "timelines.csv");
  EXPECT_EQ(timelines.substr(0, timelines.find('\n')),
            "t,momentary,short_term,sld,local_sbld,active,critical");
  EXPECT_NE(File("out", "critical.csv").find("low_sbld"), std::string::npos);
  const Json manifest = Json::parse(File("out", "manifest.json"));
  EXPECT_EQ(manifest["inputs"]["mix"], p + "_mix.wav");
  EXPECT_TRUE(manifest["separator"].is_null());
}

TEST_F(CliTest, EbuCinemaFailsOnLdr) {
  const std::string p = Write(-10.0 * std::log10(std::pow(10.0, 0.6) - 1.0));
  const Result r = Analyze(Stems(p), "out", {"--rules", "ebu-cinema"});
  EXPECT_EQ(r.exit_code, 2) << r.err;
  const Json j = Report("out");
  EXPECT_EQ(j["qc"]["findings"][0]["rule"], "max_ldr");
  EXPECT_EQ(j["qc"]["findings"][0]["outcome"], "fail");
  EXPECT_NEAR(j["measures"]["ldr"]["value"].get<double>(), 6.0, 1.0);
}

TEST_F(CliTest, ReproducibleRunsAreByteIdentical) {
  const std::string p = Write(2.0);
  Analyze(Stems(p), "a", {"--reproducible"});
  Analyze(Stems(p), "b", {"--reproducible"});
  for (const char* f : {"report.json", "timelines.csv", "critical.csv"}) {
    EXPECT_EQ(File("a", f), File("b", f)) << f;
  }
  EXPECT_FALSE(Report("a").contains("generated_at"));
  Analyze(Stems(p), "c");
  EXPECT_TRUE(Report("c").contains("generated_at"));
}

TEST_F(CliTest, OracleSeparatorMatchesProductionStems) {
  const std::string p = Write(3.0);
  const std::vector<std::string> full = {"--mix", p + "_mix.wav", "--speech",
                                         p + "_speech.wav", "--background",
                                         p + "_background.wav"};
  Analyze(full, "stems", {"--reproducible"});
  std::vector<std::string> oracle = full;
  oracle.insert(oracle.end(), {"--separator-cmd", "oracle"});
  const Result r = Analyze(oracle, "oracle", {"--reproducible"});
  ASSERT_NE(r.exit_code, 1) << r.err;
  for (const char* f : {"report.json", "timelines.csv", "critical.csv"}) {
    EXPECT_EQ(File("stems", f), File("oracle", f)) << f;
  }
}

TEST_F(CliTest, CommandSeparatorAndFailureFallback) {
  const std::string p = Write(3.0);
  const Result ok = Analyze({"--mix", p + "_mix.wav", "--separator-cmd",
                             "cp {input} {output_speech}"},
                            "sep");
  EXPECT_EQ(ok.exit_code, 0) << ok.err;
  const Json j = Report("sep");
  EXPECT_NEAR(j["measures"]["ldr"]["value"].get<double>(), 0.0, 0.05);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "sep" / "speech_estimate.wav"));

  const Result bad = Analyze({"--mix", p + "_mix.wav", "--separator-cmd",
                              "false {input} {output_speech}"},
                             "bad");
  EXPECT_NE(bad.exit_code, 1) << bad.err;
  EXPECT_NE(bad.err.find("warning"), std::string::npos);
  const Json b = Report("bad");
  EXPECT_EQ(b["measures"]["speech_loudness"]["status"], "unavailable");
  EXPECT_TRUE(b["measures"]["program_loudness"]["value"].is_number());
  EXPECT_FALSE(b["warnings"].empty());
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  const std::string p = Write(2.0);
  WriteFileAtomic(dir_ / "cfg.toml",
                  std::string_view("[analyze]\nrules = \"dpp\"\nhop = 0.2\n"));
  std::vector<std::string> args = {"--config", (dir_ / "cfg.toml").string(), "analyze"};
  for (const auto& s : Stems(p)) args.push_back(s);
  args.insert(args.end(), {"--out", (dir_ / "cfg").string(), "--hop", "0.5"});
  const Result r = RunTool(dir_, args);
  ASSERT_NE(r.exit_code, 1) << r.err;
  const Json j = Report("cfg");
  EXPECT_EQ(j["qc"]["rule_set"], "dpp");
  EXPECT_EQ(j["config"]["short_term_hop_s"], 0.5);

  WriteFileAtomic(dir_ / "bad.toml", std::string_view("[analyze]\nbogus = 1\n"));
  EXPECT_EQ(RunTool(dir_, {"--config", (dir_ / "bad.toml").string(), "analyze",
                       "--mix", p + "_mix.wav"})
                .exit_code,
            1);
}

TEST_F(CliTest, RulesFileErrorsNameTheLine) {
  const std::string p = Write(2.0);
  WriteFileAtomic(dir_ / "house.rules", std::string_view("max_ldr = 4\nmin_sbld 3\n"));
  const Result r = Analyze(Stems(p), "o", {"--rules", (dir_ / "house.rules").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, CorruptWavReportsOffset) {
  const std::string p = Write(2.0);
  auto bytes = ReadFileBytes(p + "_mix.wav");
  bytes.resize(bytes.size() / 2);
  WriteFileAtomic(dir_ / "cut.wav", bytes);
  const Result r = Analyze({"--mix", (dir_ / "cut.wav").string()}, "o");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("byte offset"), std::string::npos) << r.err;
}

TEST_F(CliTest, CorpusCommandsAreDeterministicAcrossJobs) {
  const std::string corpus = (dir_ / "corpus").string();
  ASSERT_EQ(RunTool(dir_, {"generate", "--out", corpus, "--count", "3", "--duration", "8"})
                .exit_code,
            0);
  for (const char* jobs : {"1", "4"}) {
    const std::string out = (dir_ / (std::string("sim") + jobs)).string();
    const Result r = RunTool(dir_, {"simulate", "--corpus", corpus, "--grid", "0,10,20",
                                "--jobs", jobs, "--out", out, "--reproducible"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const std::string eout = (dir_ / (std::string("eval") + jobs)).string();
    const Result e = RunTool(dir_, {"evaluate", "--corpus", corpus, "--separator-cmd",
                                "oracle", "--conditions", "0,10", "--jobs", jobs,
                                "--out", eout, "--reproducible"});
    ASSERT_EQ(e.exit_code, 0) << e.err;
  }
  for (const char* f : {"gated_bias.csv", "ldr_sbld.csv"}) {
    EXPECT_EQ(File("sim1", f), File("sim4", f)) << f;
  }
  EXPECT_EQ(File("eval1", "mae.json"), File("eval4", "mae.json"));
  EXPECT_EQ(File("eval1", "mae.csv"), File("eval4", "mae.csv"));
  const Json mae = Json::parse(File("eval1", "mae.json"));
  for (const Json& c : mae["conditions"]) {
    EXPECT_EQ(c["integrated_sl"]["mae_lu"], 0.0);
  }
}

TEST_F(CliTest, MixCommandHitsTarget) {
  const SyntheticPair p = SynthesizePair(15.0, 8);
  WriteWav(dir_ / "s.wav", p.speech, SampleFormat::kFloat32);
  WriteWav(dir_ / "b.wav", p.background, SampleFormat::kFloat32);
  SaveActivity(dir_ / "a.csv", p.activity);
  const std::string out = (dir_ / "mixed").string();
  ASSERT_EQ(RunTool(dir_, {"mix", "--speech", (dir_ / "s.wav").string(), "--background",
                       (dir_ / "b.wav").string(), "--activity", (dir_ / "a.csv").string(),
                       "--sbld", "7", "--out", out})
                .exit_code,
            0);
  const Result r = Analyze({"--mix", out + "/mix.wav", "--speech", out + "/speech.wav",
                            "--activity", out + "/activity.csv"},
                           "check");
  EXPECT_NEAR(Report("check")["measures"]["sbld_integrated"]["value"].get<double>(), 7.0,
              0.1);
}

}  // namespace
}  // namespace speechqc
