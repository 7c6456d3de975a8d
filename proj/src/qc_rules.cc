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

#include "speechqc/qc_rules.h"

#include <charconv>
#include <cmath>
#include <map>

#include "speechqc/error.h"
#include "speechqc/io_util.h"

namespace speechqc {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> ParseBound(std::string_view value, int line) {
  if (value == "none") return std::nullopt;
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    throw LineError("expected a number or 'none', got '" +
                        std::string(value) + "'",
                    line);
  }
  return out;
}

double ParseNumber(std::string_view value, int line) {
  const auto v = ParseBound(value, line);
  if (!v) throw LineError("'none' is not allowed here", line);
  return *v;
}

QcFinding Check(const char* rule, const Measurement& m, const char* unit,
                Comparison comparison, double bound,
                std::optional<double> tolerance = std::nullopt) {
  QcFinding f;
  f.rule = rule;
  f.measured = m;
  f.unit = unit;
  f.comparison = comparison;
  f.bound = bound;
  f.tolerance = tolerance;
  if (!m.has_value()) {
    f.outcome = Outcome::kNotEvaluated;
    return f;
  }
  const double v = *m.value;
  bool ok = false;
  switch (comparison) {
    case Comparison::kMin:
      ok = v >= bound;
      break;
    case Comparison::kMax:
      ok = v <= bound;
      break;
    case Comparison::kTarget:
      ok = std::fabs(v - bound) <= tolerance.value_or(0.0);
      break;
  }
  f.outcome = ok ? Outcome::kPass : Outcome::kFail;
  return f;
}

}  // namespace

void QcRuleSet::Validate() const {
  for (const auto& b : {min_sbld_lu, max_ldr_lu, max_critical_percentage,
                        target_program_loudness_lufs, max_true_peak_dbtp}) {
    if (b && !std::isfinite(*b)) {
      throw Error(ErrorCode::kValidation, "rule bounds must be finite");
    }
  }
  if (!(program_loudness_tolerance_lu >= 0) ||
      !std::isfinite(program_loudness_tolerance_lu)) {
    throw Error(ErrorCode::kValidation,
                "program loudness tolerance must be non-negative");
  }
  if (!std::isfinite(sld_threshold_lu) || !std::isfinite(sbld_threshold_lu)) {
    throw Error(ErrorCode::kValidation, "critical thresholds must be finite");
  }
}

std::vector<std::string> PresetNames() {
  return {"paper-defaults", "dpp", "ebu-cinema", "ebu-r128"};
}

bool IsPreset(std::string_view name) {
  for (const auto& n : PresetNames()) {
    if (n == name) return true;
  }
  return false;
}

QcRuleSet Preset(std::string_view name) {
  QcRuleSet r;
  r.name = std::string(name);
  if (name == "paper-defaults") {
    r.min_sbld_lu = 4.0;
    r.max_critical_percentage = 10.0;
  } else if (name == "dpp") {
    r.min_sbld_lu = 4.0;
  } else if (name == "ebu-cinema") {
    r.max_ldr_lu = 5.0;
  } else if (name == "ebu-r128") {
    r.target_program_loudness_lufs = -23.0;
    r.program_loudness_tolerance_lu = 1.0;
    r.max_true_peak_dbtp = -1.0;
  } else {
    throw Error(ErrorCode::kUsage,
                "unknown rules preset '" + std::string(name) + "'");
  }
  return r;
}

QcRuleSet ParseRules(std::string_view text, const QcRuleSet& base) {
  QcRuleSet r = base;
  bool seen_key = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw LineError("expected key = value", line_no);
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (key == "preset") {
      if (seen_key) {
        throw LineError("preset must come before other keys", line_no);
      }
      if (!IsPreset(value)) {
        throw LineError("unknown preset '" + std::string(value) + "'",
                        line_no);
      }
      r = Preset(value);
    } else if (key == "name") {
      r.name = std::string(value);
    } else if (key == "min_sbld") {
      r.min_sbld_lu = ParseBound(value, line_no);
    } else if (key == "max_ldr") {
      r.max_ldr_lu = ParseBound(value, line_no);
    } else if (key == "max_critical_percentage") {
      r.max_critical_percentage = ParseBound(value, line_no);
    } else if (key == "target_program_loudness") {
      r.target_program_loudness_lufs = ParseBound(value, line_no);
    } else if (key == "program_loudness_tolerance") {
      r.program_loudness_tolerance_lu = ParseNumber(value, line_no);
    } else if (key == "max_true_peak") {
      r.max_true_peak_dbtp = ParseBound(value, line_no);
    } else if (key == "sld_threshold") {
      r.sld_threshold_lu = ParseNumber(value, line_no);
    } else if (key == "sbld_threshold") {
      r.sbld_threshold_lu = ParseNumber(value, line_no);
    } else {
      throw LineError("unknown key '" + std::string(key) + "'", line_no);
    }
    seen_key = true;
  }
  r.Validate();
  return r;
}

QcRuleSet LoadRules(const std::string& preset_or_path) {
  if (IsPreset(preset_or_path)) return Preset(preset_or_path);
  QcRuleSet base = Preset(kDefaultPreset);
  base.name = std::filesystem::path(preset_or_path).stem().string();
  return ParseRules(ReadFileText(preset_or_path), base);
}

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kPass:
      return "pass";
    case Outcome::kFail:
      return "fail";
    case Outcome::kNotEvaluated:
      return "not_evaluated";
  }
  return "not_evaluated";
}

std::string_view ComparisonName(Comparison comparison) {
  switch (comparison) {
    case Comparison::kMin:
      return "min";
    case Comparison::kMax:
      return "max";
    case Comparison::kTarget:
      return "target";
  }
  return "min";
}

bool QcFindings::passed() const { return failures() == 0; }

std::size_t QcFindings::failures() const {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.outcome == Outcome::kFail;
  return n;
}

std::vector<Interval> LowSbldPassages(const Analysis& analysis, double bound) {
  std::vector<Interval> out;
  if (!analysis.micro) return out;
  const MicroGrid& g = analysis.grid;
  const auto& local = analysis.micro->local_sbld;
  for (std::size_t k = 0; k < local.size(); ++k) {
    const bool low = analysis.activity.mask[k] && local[k] && *local[k] < bound;
    if (!low) continue;
    const double start = g.center(k) - g.hop_s / 2;
    const double end = g.center(k) + g.hop_s / 2;
    if (!out.empty() && std::fabs(out.back().end_s - start) < 1e-9) {
      out.back().end_s = end;
    } else {
      out.push_back({start, end});
    }
  }
  return out;
}

QcFindings EvaluateRules(const QcRuleSet& rules, const Analysis& analysis) {
  rules.Validate();
  const MacroReport& m = analysis.macro;
  QcFindings out;
  out.rule_set = rules.name;
  if (rules.min_sbld_lu) {
    QcFinding f = Check("min_sbld", m.sbld_integrated, "LU", Comparison::kMin,
                        *rules.min_sbld_lu);
    f.intervals = LowSbldPassages(analysis, *rules.min_sbld_lu);
    out.findings.push_back(std::move(f));
  }
  if (rules.max_ldr_lu) {
    out.findings.push_back(
        Check("max_ldr", m.ldr, "LU", Comparison::kMax, *rules.max_ldr_lu));
  }
  if (rules.max_critical_percentage) {
    QcFinding f = Check("max_critical_percentage", m.critical_percentage, "%",
                        Comparison::kMax, *rules.max_critical_percentage);
    for (const auto& c : analysis.critical.intervals) {
      f.intervals.push_back({c.start_s, c.end_s});
    }
    out.findings.push_back(std::move(f));
  }
  if (rules.target_program_loudness_lufs) {
    out.findings.push_back(Check("target_program_loudness", m.program_loudness,
                                 "LUFS", Comparison::kTarget,
                                 *rules.target_program_loudness_lufs,
                                 rules.program_loudness_tolerance_lu));
  }
  if (rules.max_true_peak_dbtp) {
    out.findings.push_back(Check("max_true_peak", m.true_peak, "dBTP",
                                 Comparison::kMax, *rules.max_true_peak_dbtp));
  }
  return out;
}

}  // namespace speechqc
