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

#ifndef SPEECHQC_HARNESS_H_
#define SPEECHQC_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "speechqc/activity.h"
#include "speechqc/analysis.h"
#include "speechqc/audio_buffer.h"
#include "speechqc/separator.h"
#include "speechqc/speech_measures.h"
#include "speechqc/stems.h"

namespace speechqc {

// How a background of the wrong length is fitted to the speech stem.
enum class AlignPolicy {
  kPad,   // truncate or zero-pad from the start
  kLoop,  // seeded start offset, looped when too short
};

std::string_view AlignPolicyName(AlignPolicy policy);
AlignPolicy ParseAlignPolicy(std::string_view name);

struct MixSpec {
  double target_sbld_lu = 0.0;
  AlignPolicy align = AlignPolicy::kLoop;
  std::uint64_t seed = 0;
};

struct StemPair {
  std::string id;
  AudioBuffer speech;
  AudioBuffer background;
  std::optional<ActivitySidecar> activity;  // oracle, when known
};

struct MixedProgram {
  StemSet stems;  // complete
  double background_gain_db = 0.0;
  double measured_sbld_lu = 0.0;
};

// Fits `background` to the length and layout of `speech`. Mono backgrounds
// are upmixed; other layout or rate differences throw kAlignment.
AudioBuffer AlignBackground(const AudioBuffer& background,
                            const AudioBuffer& speech, AlignPolicy policy,
                            std::uint64_t seed);

// Scales the background so the integrated SBLD of the result equals the
// target, then sums. Activity comes from `activity` or, without it, from
// the speech stem alone. Throws kSilentStem if either stem is silent over
// the active region.
MixedProgram MixAtSbld(const AudioBuffer& speech, const AudioBuffer& background,
                       const MixSpec& spec,
                       const ActivitySidecar* activity = nullptr,
                       const AnalysisConfig& config = {});

struct HarnessOptions {
  AnalysisConfig analysis;
  int jobs = 1;
  AlignPolicy align = AlignPolicy::kLoop;
  std::uint64_t seed = 1;
  double program_target_lufs = -23.0;
  double min_success_fraction = 0.8;
};

struct PairFailure {
  std::string pair_id;
  std::string condition;
  std::string message;
};

struct CurvePoint {
  double sbld_lu = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  // Uncorrelated-energy prediction 10 log10(1 + 10^(-SBLD/10)).
  double prediction = 0.0;
  std::size_t pairs = 0;
  std::size_t failed = 0;
};

struct Curve {
  std::string quantity;  // "gated_bias" or "ldr"
  std::vector<CurvePoint> points;
  std::vector<PairFailure> failures;
};

double UncorrelatedSumPrediction(double sbld_lu);

// Speech-gated loudness minus SL per grid point, programs normalized to the
// target loudness, activity from the pair's oracle sidecar.
Curve GatedBiasCurve(const std::vector<StemPair>& corpus,
                     const std::vector<double>& sbld_grid,
                     const HarnessOptions& options);

// Program loudness minus SL per grid point.
Curve LdrSbldCurve(const std::vector<StemPair>& corpus,
                   const std::vector<double>& sbld_grid,
                   const HarnessOptions& options);

struct MaeStat {
  std::optional<double> mae;  // nullopt without samples
  std::optional<double> stddev;
  std::size_t count = 0;
};

struct ConditionMae {
  std::string label;  // "sbld_<x>", "speech_only" or "overall"
  std::optional<double> sbld_lu;
  MaeStat integrated_sl;
  MaeStat integrated_sbld;
  MaeStat short_term_sl;
  MaeStat short_term_sbld;
  std::size_t pairs_ok = 0;
  std::size_t pairs_failed = 0;
};

struct MaeReport {
  std::string separator;
  std::vector<ConditionMae> conditions;  // grid order, speech_only, overall
  std::vector<PairFailure> failures;
};

// Mixes every pair at every condition (plus speech only), separates the mix
// and compares estimated against ground-truth measures. Both sides use the
// same pipeline with activity derived from their own speech stems, so
// perfect separation yields exactly zero error.
MaeReport EvaluateSeparator(const std::vector<StemPair>& corpus,
                            const Separator& separator,
                            const std::vector<double>& sbld_conditions,
                            const HarnessOptions& options);

// Runs fn(0..n-1) on up to `jobs` threads. fn must not throw.
void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)>& fn);

// Reads <root>/pairs/<id>/{speech.wav, background.wav, activity.csv}; the
// "pairs" level is optional. Pairs are sorted by id.
std::vector<StemPair> LoadCorpus(const std::filesystem::path& root,
                                 Diagnostics* diag = nullptr);
void WriteCorpus(const std::filesystem::path& root,
                 const std::vector<StemPair>& corpus);

// Synthetic speech-like/background pairs with oracle activity.
std::vector<StemPair> GenerateCorpus(std::size_t count, double duration_s,
                                     std::uint64_t seed,
                                     int sample_rate = 48000);

// AnalyzeStems without peak metering; peaks come back as kUnavailable.
Analysis AnalyzeForHarness(const StemSet& stems,
                           const ActivitySidecar* sidecar,
                           const AnalysisConfig& config);

}  // namespace speechqc

#endif  // SPEECHQC_HARNESS_H_
