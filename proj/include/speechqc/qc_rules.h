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

#ifndef SPEECHQC_QC_RULES_H_
#define SPEECHQC_QC_RULES_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speechqc/analysis.h"
#include "speechqc/measurement.h"
#include "speechqc/speech_measures.h"

namespace speechqc {

// Unset bounds disable their rule.
struct QcRuleSet {
  std::string name;
  std::optional<double> min_sbld_lu;
  std::optional<double> max_ldr_lu;
  std::optional<double> max_critical_percentage;
  std::optional<double> target_program_loudness_lufs;
  double program_loudness_tolerance_lu = 1.0;
  std::optional<double> max_true_peak_dbtp;
  // Critical-passage detection.
  double sld_threshold_lu = -10.0;
  double sbld_threshold_lu = 0.0;

  // Throws kValidation on non-finite bounds or a negative tolerance.
  void Validate() const;
};

inline constexpr std::string_view kDefaultPreset = "paper-defaults";

std::vector<std::string> PresetNames();
// Throws kUsage for unknown names.
QcRuleSet Preset(std::string_view name);
bool IsPreset(std::string_view name);

// key = value lines layered over `base`. "preset = <name>" resets to that
// preset and must come before other keys; "none" clears a bound.
QcRuleSet ParseRules(std::string_view text, const QcRuleSet& base);

// A preset name or a rules file path.
QcRuleSet LoadRules(const std::string& preset_or_path);

enum class Outcome { kPass, kFail, kNotEvaluated };
std::string_view OutcomeName(Outcome outcome);

enum class Comparison { kMin, kMax, kTarget };
std::string_view ComparisonName(Comparison comparison);

struct QcFinding {
  std::string rule;  // e.g. "min_sbld"
  Outcome outcome = Outcome::kNotEvaluated;
  Measurement measured;
  std::string unit;
  Comparison comparison = Comparison::kMin;
  double bound = 0.0;
  std::optional<double> tolerance;
  std::vector<Interval> intervals;  // offending passages, when localized
};

struct QcFindings {
  std::string rule_set;
  std::vector<QcFinding> findings;

  bool passed() const;
  std::size_t failures() const;
};

// One finding per enabled rule, in a fixed order.
QcFindings EvaluateRules(const QcRuleSet& rules, const Analysis& analysis);

// Runs of active hops whose local SBLD is below `bound`.
std::vector<Interval> LowSbldPassages(const Analysis& analysis, double bound);

}  // namespace speechqc

#endif  // SPEECHQC_QC_RULES_H_
