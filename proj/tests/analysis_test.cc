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

#include <cmath>

#include "gtest/gtest.h"
#include "json.hpp"
#include "speechqc/analysis.h"
#include "speechqc/error.h"
#include "speechqc/harness.h"
#include "speechqc/io_util.h"
#include "speechqc/qc_rules.h"
#include "speechqc/report.h"
#include "speechqc/synth.h"
#include "test_util.h"

namespace speechqc {
namespace {

using Json = nlohmann::json;

struct Program {
  SyntheticPair pair;
  MixedProgram mixed;
};

Program MakeProgram(double sbld, double seconds = 30.0, std::uint64_t seed = 4) {
  Program p{SynthesizePair(seconds, seed), {}};
  p.mixed = MixAtSbld(p.pair.speech, p.pair.background, {sbld, AlignPolicy::kPad, 1},
                      &p.pair.activity);
  return p;
}

std::string ReportOf(const Analysis& a, const std::string& rules = "paper-defaults") {
  const AnalysisConfig c;
  return ReportJson(a, EvaluateRules(LoadRules(rules), a), c,
                    {DefaultLayout(a.num_channels), {}, std::nullopt});
}

TEST(AnalysisTest, StreamingMatchesWholeBuffer) {
  const Program p = MakeProgram(6.0);
  const AnalysisConfig c;
  const StemSet& s = p.mixed.stems;
  ProgramAnalyzer analyzer(48000, s.mix->layout(), c, true);
  for (std::size_t at = 0; at < s.mix->num_frames(); at += 30011) {
    const std::size_t n = std::min<std::size_t>(30011, s.mix->num_frames() - at);
    const AudioBuffer m = s.mix->Slice(at, n), sp = s.speech->Slice(at, n),
                      bg = s.background->Slice(at, n);
    analyzer.Process(m, &sp, &bg);
  }
  const Analysis streamed = Analyze(analyzer.Finish(), &p.pair.activity, c);
  const Analysis whole = AnalyzeStems(s, &p.pair.activity, c);
  EXPECT_EQ(ReportOf(streamed), ReportOf(whole));
  EXPECT_EQ(TimelinesCsv(streamed), TimelinesCsv(whole));
}

TEST(AnalysisTest, HarnessMixReportsTargetSbld) {
  const Program p = MakeProgram(4.0);
  const Analysis a = AnalyzeStems(p.mixed.stems, &p.pair.activity, {});
  EXPECT_NEAR(*a.macro.sbld_integrated.value, 4.0, 0.2);
  EXPECT_EQ(a.activity.source, ActivitySource::kOracle);
  EXPECT_NEAR(*a.macro.ldr.value,
              *a.macro.program_loudness.value - *a.macro.speech_loudness.value, 1e-12);
}

TEST(AnalysisTest, SpeechOnlyProgram) {
  const SyntheticPair pair = SynthesizePair(20.0, 2);
  StemSet s;
  s.mix = pair.speech;
  s.speech = pair.speech;
  s.background = AudioBuffer(48000, pair.speech.layout(), pair.speech.num_frames());
  const Analysis a = AnalyzeStems(s, nullptr, {});
  EXPECT_NEAR(*a.macro.ldr.value, 0.0, 0.05);
  EXPECT_NEAR(*a.macro.speech_gated_loudness.value, *a.macro.speech_loudness.value, 0.1);
  EXPECT_EQ(*a.macro.program_loudness.value, *a.macro.speech_loudness.value);
  EXPECT_EQ(*a.macro.critical_percentage.value, 0.0);
  EXPECT_EQ(a.macro.sbld_integrated.status, Status::kCapped);
}

TEST(AnalysisTest, MixOnlyMarksSpeechMeasuresUnavailable) {
  const Program p = MakeProgram(4.0, 10.0);
  StemSet s;
  s.mix = p.mixed.stems.mix;
  const Analysis a = AnalyzeStems(s, nullptr, {});
  EXPECT_TRUE(a.macro.program_loudness.ok());
  EXPECT_TRUE(a.macro.true_peak.ok());
  EXPECT_TRUE(a.macro.program_lra.ok());
  EXPECT_EQ(a.macro.speech_loudness.status, Status::kUnavailable);
  EXPECT_EQ(a.macro.ldr.status, Status::kUnavailable);
  EXPECT_EQ(a.macro.critical_percentage.status, Status::kUnavailable);
  EXPECT_FALSE(a.micro.has_value());
  // Speech-gated loudness works with a sidecar alone.
  const Analysis gated = AnalyzeStems(s, &p.pair.activity, {});
  EXPECT_TRUE(gated.macro.speech_gated_loudness.ok());
}

TEST(AnalysisTest, ShortProgramDegradesPerField) {
  StemSet s;
  s.speech = testing::WhiteNoise(48000, 0.2, 2.0, 2, 1);
  s.background = testing::WhiteNoise(48000, 0.05, 2.0, 2, 2);
  const Analysis a = AnalyzeStems(s, nullptr, {});
  EXPECT_TRUE(a.macro.program_loudness.ok());
  EXPECT_TRUE(a.macro.speech_loudness.ok());
  EXPECT_EQ(a.macro.max_short_term.status, Status::kTooShort);
  EXPECT_EQ(a.macro.critical_percentage.status, Status::kTooShort);
}

TEST(AnalysisTest, NeedsEnoughInputs) {
  StemSet s;
  s.speech = AudioBuffer(48000, DefaultLayout(2), 48000);
  EXPECT_THROW(AnalyzeStems(s, nullptr, {}), Error);
}

TEST(QcRulesTest, Presets) {
  EXPECT_EQ(*Preset("dpp").min_sbld_lu, 4.0);
  EXPECT_EQ(*Preset("ebu-cinema").max_ldr_lu, 5.0);
  EXPECT_EQ(*Preset("paper-defaults").min_sbld_lu, 4.0);
  EXPECT_EQ(Preset("paper-defaults").sld_threshold_lu, -10.0);
  EXPECT_EQ(Preset("paper-defaults").sbld_threshold_lu, 0.0);
  EXPECT_EQ(*Preset("ebu-r128").target_program_loudness_lufs, -23.0);
  EXPECT_FALSE(Preset("dpp").max_ldr_lu.has_value());
  EXPECT_THROW(Preset("strict"), Error);
  for (const std::string& name : PresetNames()) EXPECT_TRUE(IsPreset(name));
}

TEST(QcRulesTest, ParseLayersOverBase) {
  const QcRuleSet r = ParseRules(
      "# house rules\npreset = dpp\nmax_ldr = 6  # tighter\nmin_sbld = none\n"
      "sld_threshold = -8\nname = house\n",
      Preset("paper-defaults"));
  EXPECT_EQ(r.name, "house");
  EXPECT_FALSE(r.min_sbld_lu.has_value());
  EXPECT_EQ(*r.max_ldr_lu, 6.0);
  EXPECT_FALSE(r.max_critical_percentage.has_value());  // reset by preset
  EXPECT_EQ(r.sld_threshold_lu, -8.0);
}

TEST(QcRulesTest, ParseErrorsCarryLines) {
  const std::pair<const char*, int> cases[] = {
      {"min_sbld = 4\npreset = dpp\n", 2},
      {"\n\nmax_ldr 5\n", 3},
      {"bogus = 1\n", 1},
      {"max_ldr = five\n", 1},
      {"sld_threshold = none\n", 1},
      {"preset = nope\n", 1}};
  for (const auto& [text, line] : cases) {
    try {
      ParseRules(text, Preset("dpp"));
      FAIL() << text;
    } catch (const LineError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
  EXPECT_THROW(ParseRules("program_loudness_tolerance = -1\n", Preset("dpp")), Error);
}

TEST(QcRulesTest, LoadRulesFromFile) {
  testing::TempDir dir;
  WriteFileAtomic(dir / "strict.rules", std::string_view("max_ldr = 3\n"));
  const QcRuleSet r = LoadRules((dir / "strict.rules").string());
  EXPECT_EQ(r.name, "strict");
  EXPECT_EQ(*r.max_ldr_lu, 3.0);
  EXPECT_EQ(*r.min_sbld_lu, 4.0);  // from paper-defaults
  EXPECT_THROW(LoadRules((dir / "missing.rules").string()), Error);
}

TEST(QcRulesTest, LowSbldMixFailsPaperDefaults) {
  const Program p = MakeProgram(-5.0);
  const Analysis a = AnalyzeStems(p.mixed.stems, &p.pair.activity, {});
  const QcFindings f = EvaluateRules(Preset("paper-defaults"), a);
  ASSERT_EQ(f.findings.size(), 2u);
  EXPECT_EQ(f.findings[0].rule, "min_sbld");
  EXPECT_EQ(f.findings[0].outcome, Outcome::kFail);
  EXPECT_FALSE(f.findings[0].intervals.empty());
  EXPECT_EQ(f.findings[1].rule, "max_critical_percentage");
  EXPECT_EQ(f.findings[1].outcome, Outcome::kFail);
  EXPECT_EQ(f.findings[1].intervals.size(), a.critical.intervals.size());
  EXPECT_FALSE(f.passed());
  EXPECT_EQ(f.failures(), 2u);
}

TEST(QcRulesTest, EbuCinemaFlagsHighLdr) {
  // LDR about 6 LU: 10 log10(1 + 10^(-x/10)) = 6 at x = -4.74.
  const double sbld = -10.0 * std::log10(std::pow(10.0, 0.6) - 1.0);
  const Program p = MakeProgram(sbld);
  const Analysis a = AnalyzeStems(p.mixed.stems, &p.pair.activity, {});
  EXPECT_NEAR(*a.macro.ldr.value, 6.0, 1.0);
  const QcFindings f = EvaluateRules(Preset("ebu-cinema"), a);
  ASSERT_EQ(f.findings.size(), 1u);
  EXPECT_EQ(f.findings[0].rule, "max_ldr");
  EXPECT_EQ(f.findings[0].outcome, Outcome::kFail);
}

TEST(QcRulesTest, CleanMixPassesAndMissingIsNotEvaluated) {
  const Program p = MakeProgram(15.0);
  const Analysis a = AnalyzeStems(p.mixed.stems, &p.pair.activity, {});
  EXPECT_TRUE(EvaluateRules(Preset("paper-defaults"), a).passed());
  StemSet mix_only;
  mix_only.mix = p.mixed.stems.mix;
  const QcFindings f =
      EvaluateRules(Preset("paper-defaults"), AnalyzeStems(mix_only, nullptr, {}));
  for (const QcFinding& finding : f.findings) {
    EXPECT_EQ(finding.outcome, Outcome::kNotEvaluated);
  }
  EXPECT_TRUE(f.passed());
}

TEST(QcRulesTest, TargetLoudnessTolerance) {
  const Program p = MakeProgram(10.0, 12.0);
  const Analysis a = AnalyzeStems(p.mixed.stems, &p.pair.activity, {});
  QcRuleSet r = Preset("ebu-r128");
  r.max_true_peak_dbtp.reset();
  r.target_program_loudness_lufs = *a.macro.program_loudness.value + 0.9;
  EXPECT_TRUE(EvaluateRules(r, a).passed());
  r.target_program_loudness_lufs = *a.macro.program_loudness.value - 1.1;
  const QcFindings f = EvaluateRules(r, a);
  EXPECT_FALSE(f.passed());
  EXPECT_EQ(*f.findings[0].tolerance, 1.0);
}

TEST(ReportTest, JsonShapeAndNulls) {
  const Program p = MakeProgram(-5.0, 12.0);
  StemSet mix_only;
  mix_only.mix = p.mixed.stems.mix;
  const Analysis a = AnalyzeStems(mix_only, nullptr, {});
  const Json j = Json::parse(ReportOf(a));
  EXPECT_EQ(j["schema_version"], "1.0.0");
  EXPECT_FALSE(j.contains("generated_at"));
  EXPECT_TRUE(j["measures"]["speech_loudness"]["value"].is_null());
  EXPECT_EQ(j["measures"]["speech_loudness"]["status"], "unavailable");
  EXPECT_EQ(j["measures"]["program_loudness"]["unit"], "LUFS");
  EXPECT_TRUE(j["activity"]["source"].is_null());
  EXPECT_EQ(j["program"]["layout"], Json::array({"L", "R"}));
  EXPECT_FALSE(j["program"]["stems"].get<bool>());
}

TEST(ReportTest, TimesAndValuesAreRounded) {
  const Program p = MakeProgram(-5.0, 12.0);
  const Analysis a = AnalyzeStems(p.mixed.stems, &p.pair.activity, {});
  const std::string text = ReportOf(a);
  const Json j = Json::parse(text);
  for (const Json& iv : j["critical_intervals"]) {
    const double s = iv["start_s"];
    EXPECT_NEAR(s * 1000.0, std::round(s * 1000.0), 1e-6);
  }
  EXPECT_EQ(text.find("-0.0,"), std::string::npos);
  EXPECT_EQ(text.find("NaN"), std::string::npos);
  EXPECT_EQ(text.find("Infinity"), std::string::npos);
  ReportContext ctx{DefaultLayout(2), {"w1"}, "2026-01-01T00:00:00Z"};
  const Json stamped = Json::parse(
      ReportJson(a, EvaluateRules(Preset("dpp"), a), {}, ctx));
  EXPECT_EQ(stamped["generated_at"], "2026-01-01T00:00:00Z");
  EXPECT_EQ(stamped["warnings"], Json::array({"w1"}));
}

TEST(ReportTest, TimelinesCsv) {
  const Program p = MakeProgram(-5.0, 12.0);
  const Analysis a = AnalyzeStems(p.mixed.stems, &p.pair.activity, {});
  const std::string csv = TimelinesCsv(a);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,momentary,short_term,sld,local_sbld,active,critical");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
  }
  EXPECT_EQ(rows, a.grid.size);
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 6), "1.500,");
  EXPECT_EQ(CriticalCsv(a).substr(0, 32), "start_s,end_s,duration_s,reason\n");
}

TEST(ReportTest, FormatFixed) {
  EXPECT_EQ(FormatFixed(1.23456, 3), "1.235");
  EXPECT_EQ(FormatFixed(-0.0001, 3), "0.000");
  EXPECT_EQ(FormatFixed(kSilence, 3), "");
  EXPECT_EQ(FormatFixed(NAN, 3), "");
  EXPECT_EQ(Iso8601Now().size(), 20u);
}

TEST(ReportTest, CurveAndMaeTables) {
  Curve c;
  c.points.push_back({0.0, 3.1, 0.2, 3.0103, 20, 0});
  EXPECT_EQ(CurveCsv(c),
            "sbld_lu,mean_lu,std_lu,prediction_lu,pairs,failed\n"
            "0.000,3.1000,0.2000,3.0103,20,0\n");
  MaeReport r;
  r.separator = "oracle";
  ConditionMae m;
  m.label = "speech_only";
  m.integrated_sl = {0.0, 0.0, 3};
  r.conditions.push_back(m);
  const std::string csv = MaeCsv(r);
  EXPECT_NE(csv.find("speech_only,,integrated_sl,0.0000,0.0000,3\n"), std::string::npos);
  EXPECT_NE(csv.find("speech_only,,integrated_sbld,,,0\n"), std::string::npos);
  const Json j = Json::parse(MaeJson(r, std::nullopt));
  EXPECT_TRUE(j["conditions"][0]["integrated_sbld"]["mae_lu"].is_null());
}

}  // namespace
}  // namespace speechqc
