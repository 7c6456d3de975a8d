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

#include "speechqc/report.h"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "json.hpp"

namespace speechqc {

namespace {

using Json = nlohmann::ordered_json;

// Values are rounded so reports stay readable and stable.
constexpr int kValueDecimals = 4;
constexpr int kTimeDecimals = 3;

double Round(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(v * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

Json Number(std::optional<double> v, int decimals = kValueDecimals) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return Round(*v, decimals);
}

Json MeasureJson(const Measurement& m, const char* unit) {
  Json j;
  j["value"] = Number(m.value);
  j["unit"] = unit;
  j["status"] = std::string(StatusName(m.status));
  return j;
}

Json IntervalJson(double start, double end) {
  Json j;
  j["start_s"] = Round(start, kTimeDecimals);
  j["end_s"] = Round(end, kTimeDecimals);
  return j;
}

Json MaeStatJson(const MaeStat& s) {
  Json j;
  j["mae_lu"] = Number(s.mae);
  j["std_lu"] = Number(s.stddev);
  j["count"] = s.count;
  return j;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string FormatFixed(double value, int decimals) {
  if (!std::isfinite(value)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, Round(value, decimals));
  return buf;
}

std::string Iso8601Now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string ReportJson(const Analysis& analysis, const QcFindings& findings,
                       const AnalysisConfig& config,
                       const ReportContext& context) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  if (context.generated_at) j["generated_at"] = *context.generated_at;
  j["tool"] = {{"name", "speechqc"}, {"version", kToolVersion}};

  Json layout = Json::array();
  for (ChannelRole r : context.layout) {
    layout.push_back(std::string(ChannelRoleName(r)));
  }
  j["program"] = {{"duration_s", Round(analysis.duration_s, kTimeDecimals)},
                  {"sample_rate", analysis.sample_rate},
                  {"channels", analysis.num_channels},
                  {"layout", layout},
                  {"stems", analysis.micro.has_value()}};

  j["config"] = {
      {"short_term_hop_s", config.meter.short_term_hop_s},
      {"lra_hop_s", config.lra_hop_s},
      {"sld_threshold_lu", config.speech.sld_threshold_lu},
      {"sbld_threshold_lu", config.speech.sbld_threshold_lu},
      {"speech_gating", std::string(GatingModeName(config.speech.speech_gating))},
      {"background_gating",
       std::string(GatingModeName(config.speech.background_gating))}};

  const MacroReport& m = analysis.macro;
  Json measures;
  measures["program_loudness"] = MeasureJson(m.program_loudness, "LUFS");
  measures["program_lra"] = MeasureJson(m.program_lra, "LU");
  measures["max_momentary"] = MeasureJson(m.max_momentary, "LUFS");
  measures["max_short_term"] = MeasureJson(m.max_short_term, "LUFS");
  measures["sample_peak"] = MeasureJson(m.sample_peak, "dBFS");
  measures["true_peak"] = MeasureJson(m.true_peak, "dBTP");
  measures["speech_gated_loudness"] =
      MeasureJson(m.speech_gated_loudness, "LUFS");
  measures["speech_gated_lra"] = MeasureJson(m.speech_gated_lra, "LU");
  measures["speech_loudness"] = MeasureJson(m.speech_loudness, "LUFS");
  measures["speech_lra"] = MeasureJson(m.speech_lra, "LU");
  measures["ldr"] = MeasureJson(m.ldr, "LU");
  measures["sbld_integrated"] = MeasureJson(m.sbld_integrated, "LU");
  measures["critical_percentage"] = MeasureJson(m.critical_percentage, "%");
  j["measures"] = measures;

  Json activity;
  activity["source"] =
      analysis.has_activity
          ? Json(std::string(ActivitySourceName(analysis.activity.source)))
          : Json(nullptr);
  activity["coverage_s"] = Round(analysis.activity.coverage_s, kTimeDecimals);
  Json intervals = Json::array();
  for (const Interval& i : analysis.activity.intervals) {
    intervals.push_back(IntervalJson(i.start_s, i.end_s));
  }
  activity["intervals"] = intervals;
  j["activity"] = activity;

  Json critical = Json::array();
  for (const CriticalInterval& c : analysis.critical.intervals) {
    Json ci = IntervalJson(c.start_s, c.end_s);
    ci["reason"] = std::string(CriticalReasonName(c.reason));
    critical.push_back(ci);
  }
  j["critical_intervals"] = critical;

  Json qc;
  qc["rule_set"] = findings.rule_set;
  qc["passed"] = findings.passed();
  Json list = Json::array();
  for (const QcFinding& f : findings.findings) {
    Json fj;
    fj["rule"] = f.rule;
    fj["outcome"] = std::string(OutcomeName(f.outcome));
    fj["measured"] = MeasureJson(f.measured, f.unit.c_str());
    fj["comparison"] = std::string(ComparisonName(f.comparison));
    fj["bound"] = Round(f.bound, kValueDecimals);
    fj["tolerance"] = Number(f.tolerance);
    Json iv = Json::array();
    for (const Interval& i : f.intervals) {
      iv.push_back(IntervalJson(i.start_s, i.end_s));
    }
    fj["intervals"] = iv;
    list.push_back(fj);
  }
  qc["findings"] = list;
  j["qc"] = qc;
  j["warnings"] = context.warnings;
  return Dump(j);
}

std::string TimelinesCsv(const Analysis& analysis) {
  std::string out = "t,momentary,short_term,sld,local_sbld,active,critical\n";
  const MicroTimelines* micro =
      analysis.micro ? &*analysis.micro : nullptr;
  const bool have_critical =
      analysis.critical.mask.size() == analysis.grid.size && micro != nullptr;
  for (std::size_t k = 0; k < analysis.grid.size; ++k) {
    out += FormatFixed(analysis.grid.center(k), kTimeDecimals);
    out += ',';
    out += FormatFixed(analysis.momentary[k], 3);
    out += ',';
    out += FormatFixed(analysis.short_term[k], 3);
    out += ',';
    if (micro != nullptr && k < micro->sld.size()) {
      out += FormatFixed(micro->sld[k], 3);
    }
    out += ',';
    if (micro != nullptr && micro->local_sbld[k]) {
      out += FormatFixed(*micro->local_sbld[k], 3);
    }
    out += ',';
    if (analysis.has_activity) out += analysis.activity.mask[k] ? '1' : '0';
    out += ',';
    if (have_critical) out += analysis.critical.mask[k] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string CriticalCsv(const Analysis& analysis) {
  std::string out = "start_s,end_s,duration_s,reason\n";
  for (const CriticalInterval& c : analysis.critical.intervals) {
    out += FormatFixed(c.start_s, kTimeDecimals) + ',' +
           FormatFixed(c.end_s, kTimeDecimals) + ',' +
           FormatFixed(c.end_s - c.start_s, kTimeDecimals) + ',' +
           std::string(CriticalReasonName(c.reason)) + '\n';
  }
  return out;
}

std::string ManifestJson(const Manifest& manifest) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  if (manifest.generated_at) j["generated_at"] = *manifest.generated_at;
  Json inputs = Json::object();
  for (const auto& [role, path] : manifest.inputs) inputs[role] = path;
  j["inputs"] = inputs;
  j["separator"] = manifest.separator ? Json(*manifest.separator) : Json();
  j["speech_stem_path"] =
      manifest.speech_stem_path ? Json(*manifest.speech_stem_path) : Json();
  j["rules"] = manifest.rules;
  j["outputs"] = manifest.outputs;
  return Dump(j);
}

std::string CurveCsv(const Curve& curve) {
  std::string out = "sbld_lu,mean_lu,std_lu,prediction_lu,pairs,failed\n";
  for (const CurvePoint& p : curve.points) {
    out += FormatFixed(p.sbld_lu, 3) + ',' + FormatFixed(p.mean, 4) + ',' +
           FormatFixed(p.stddev, 4) + ',' + FormatFixed(p.prediction, 4) +
           ',' + std::to_string(p.pairs) + ',' + std::to_string(p.failed) +
           '\n';
  }
  return out;
}

std::string MaeCsv(const MaeReport& report) {
  std::string out = "condition,sbld_lu,metric,mae_lu,std_lu,count\n";
  for (const ConditionMae& c : report.conditions) {
    const std::string sbld = c.sbld_lu ? FormatFixed(*c.sbld_lu, 3) : "";
    const std::pair<const char*, const MaeStat*> rows[] = {
        {"integrated_sl", &c.integrated_sl},
        {"integrated_sbld", &c.integrated_sbld},
        {"short_term_sl", &c.short_term_sl},
        {"short_term_sbld", &c.short_term_sbld}};
    for (const auto& [metric, s] : rows) {
      out += c.label + ',' + sbld + ',' + metric + ',' +
             (s->mae ? FormatFixed(*s->mae, 4) : "") + ',' +
             (s->stddev ? FormatFixed(*s->stddev, 4) : "") + ',' +
             std::to_string(s->count) + '\n';
    }
  }
  return out;
}

std::string MaeJson(const MaeReport& report,
                    const std::optional<std::string>& generated_at) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  if (generated_at) j["generated_at"] = *generated_at;
  j["separator"] = report.separator;
  Json conditions = Json::array();
  for (const ConditionMae& c : report.conditions) {
    Json cj;
    cj["label"] = c.label;
    cj["sbld_lu"] = Number(c.sbld_lu);
    cj["pairs_ok"] = c.pairs_ok;
    cj["pairs_failed"] = c.pairs_failed;
    cj["integrated_sl"] = MaeStatJson(c.integrated_sl);
    cj["integrated_sbld"] = MaeStatJson(c.integrated_sbld);
    cj["short_term_sl"] = MaeStatJson(c.short_term_sl);
    cj["short_term_sbld"] = MaeStatJson(c.short_term_sbld);
    conditions.push_back(cj);
  }
  j["conditions"] = conditions;
  Json failures = Json::array();
  for (const PairFailure& f : report.failures) {
    failures.push_back(
        {{"pair", f.pair_id}, {"condition", f.condition}, {"message", f.message}});
  }
  j["failures"] = failures;
  return Dump(j);
}

}  // namespace speechqc
