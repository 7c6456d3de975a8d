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

#ifndef SPEECHQC_REPORT_H_
#define SPEECHQC_REPORT_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "speechqc/analysis.h"
#include "speechqc/audio_buffer.h"
#include "speechqc/harness.h"
#include "speechqc/qc_rules.h"
#include "speechqc/speech_measures.h"

namespace speechqc {

inline constexpr const char* kReportSchemaVersion = "1.0.0";
inline constexpr const char* kToolVersion = "0.1.0";

struct ReportContext {
  std::vector<ChannelRole> layout;
  std::vector<std::string> warnings;
  // Omitted from the output when unset.
  std::optional<std::string> generated_at;
};

// report.json: program info, macro measures, activity, critical passages,
// QC findings and warnings. Missing measures serialize as null plus status.
std::string ReportJson(const Analysis& analysis, const QcFindings& findings,
                       const AnalysisConfig& config,
                       const ReportContext& context);

// t,momentary,short_term,sld,local_sbld,active,critical; one row per hop.
// Empty fields for unmeasurable values.
std::string TimelinesCsv(const Analysis& analysis);

// start_s,end_s,duration_s,reason
std::string CriticalCsv(const Analysis& analysis);

// Provenance kept out of report.json so reports compare byte for byte
// regardless of where the stems came from.
struct Manifest {
  std::map<std::string, std::string> inputs;  // role -> path
  std::optional<std::string> separator;
  std::optional<std::string> speech_stem_path;
  std::string rules;
  std::vector<std::string> outputs;
  std::optional<std::string> generated_at;
};
std::string ManifestJson(const Manifest& manifest);

// sbld_lu,mean_lu,std_lu,prediction_lu,pairs,failed
std::string CurveCsv(const Curve& curve);
// condition,sbld_lu,metric,mae_lu,std_lu,count
std::string MaeCsv(const MaeReport& report);
std::string MaeJson(const MaeReport& report,
                    const std::optional<std::string>& generated_at);

// UTC, seconds resolution.
std::string Iso8601Now();

// Fixed-point with `decimals` places; "" for non-finite values.
std::string FormatFixed(double value, int decimals);

}  // namespace speechqc

#endif  // SPEECHQC_REPORT_H_
