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

#ifndef SPEECHQC_SPEECH_MEASURES_H_
#define SPEECHQC_SPEECH_MEASURES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "speechqc/activity.h"
#include "speechqc/audio_buffer.h"
#include "speechqc/loudness_range.h"
#include "speechqc/measurement.h"
#include "speechqc/meter.h"

namespace speechqc {

enum class GatingMode { kStandard, kUngated };

std::string_view GatingModeName(GatingMode mode);

struct SpeechConfig {
  double aux_window_s = 1.0;
  double activation_threshold_lufs = -65.0;
  double sbld_floor_lu = -10.0;
  double sld_threshold_lu = -10.0;
  double sbld_threshold_lu = 0.0;
  double sbld_cap_lu = 30.0;
  GatingMode speech_gating = GatingMode::kStandard;
  GatingMode background_gating = GatingMode::kUngated;
};

// Everything the analysis pipeline needs. The microscopic hop is
// meter.short_term_hop_s; `lra_hop_s` is the short-term hop fed to LRA.
struct AnalysisConfig {
  MeterConfig meter;
  SpeechConfig speech;
  LraConfig lra;
  double lra_hop_s = 1.0;

  void Validate() const;
  // Frame quantum that makes every window, hop and offset exact.
  std::size_t Quantum(int sample_rate) const;
};

// Hop-aligned time base of the microscopic measures: the centers of the
// short-term blocks, t_k = short_term_window / 2 + k * hop. Hop k stands for
// the span [t_k - hop / 2, t_k + hop / 2).
struct MicroGrid {
  double first_center_s = 0.0;
  double hop_s = 0.1;
  std::size_t size = 0;

  double center(std::size_t k) const {
    return first_center_s + static_cast<double>(k) * hop_s;
  }
  static MicroGrid For(const EnergySeries& series, const AnalysisConfig& c);
};

struct SpeechActivity {
  MicroGrid grid;
  std::vector<bool> mask;
  std::vector<Interval> intervals;  // merged runs of active hops
  double coverage_s = 0.0;
  ActivitySource source = ActivitySource::kDerived;

  bool empty() const { return coverage_s <= 0.0; }
};

// Builds intervals and coverage from a hop mask.
SpeechActivity ActivityFromMask(const MicroGrid& grid, std::vector<bool> mask,
                                ActivitySource source);

// Quantizes continuous intervals onto the grid: hop k is active when its
// center lies inside an interval.
SpeechActivity ActivityFromSidecar(const ActivitySidecar& sidecar,
                                   const MicroGrid& grid);

struct MicroTimelines {
  MicroGrid grid;
  std::vector<double> speech_short_term;      // LUFS
  std::vector<double> background_short_term;  // LUFS
  std::vector<double> aux_speech_loudness;    // LUFS, aux window per hop
  // Short-term speech loudness minus integrated SL; empty when SL is not
  // measurable, kSilence where the speech block is silent.
  std::vector<double> sld;
  // Short-term speech minus short-term background, clamped to +-cap;
  // nullopt on inactive hops.
  std::vector<std::optional<double>> local_sbld;
};

enum class CriticalReason : std::uint8_t { kLowSld, kLowSbld, kBoth };

std::string_view CriticalReasonName(CriticalReason reason);

struct CriticalInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  CriticalReason reason = CriticalReason::kLowSbld;
};

struct CriticalPassages {
  std::vector<CriticalInterval> intervals;
  Measurement percentage;  // kNoSpeech without active time
  std::vector<bool> mask;  // per hop
};

// Energy-series level operations. The analysis pipeline uses these so that
// one metering pass serves every measure.

std::vector<double> AuxSpeechLoudness(const EnergySeries& speech,
                                      const MicroGrid& grid,
                                      const AnalysisConfig& config);

std::vector<double> ShortTermOnGrid(const EnergySeries& series,
                                    const MicroGrid& grid,
                                    const AnalysisConfig& config);

// Speech minus background short-term loudness, clamped to +-cap. A silent
// background gives +cap; silent speech with audible background gives -cap;
// both silent gives nullopt.
std::vector<std::optional<double>> RawLocalSbld(
    const std::vector<double>& speech_short_term,
    const std::vector<double>& background_short_term, double cap);

// Active where the aux speech loudness reaches the activation threshold
// and, when supplied, local SBLD is at least the floor.
SpeechActivity DetectActivityFromSeries(
    const EnergySeries& speech, const AnalysisConfig& config,
    const std::vector<std::optional<double>>* local_sbld = nullptr);

// Indicator over gating-block (or any block) centers.
std::vector<bool> CentersInActivity(const std::vector<double>& centers_s,
                                    const SpeechActivity& activity);

Measurement SpeechGatedLoudnessFromSeries(const EnergySeries& mix,
                                          const SpeechActivity& activity,
                                          const AnalysisConfig& config);

LraResult SpeechGatedLraFromSeries(const EnergySeries& mix,
                                   const SpeechActivity& activity,
                                   const AnalysisConfig& config);

// Integrated loudness of the speech stem under config.speech.speech_gating.
Measurement SpeechLoudnessFromSeries(const EnergySeries& speech,
                                     const AnalysisConfig& config);

LraResult LraFromSeries(const EnergySeries& series,
                        const AnalysisConfig& config);

Measurement SbldIntegratedFromSeries(const EnergySeries& speech,
                                     const EnergySeries& background,
                                     const SpeechActivity& activity,
                                     const AnalysisConfig& config);

MicroTimelines MicroTimelinesFromSeries(const EnergySeries& speech,
                                        const EnergySeries& background,
                                        const Measurement& speech_loudness,
                                        const SpeechActivity& activity,
                                        const AnalysisConfig& config);

// Buffer-level operations.

SpeechActivity DetectActivity(
    const AudioBuffer& speech, const AnalysisConfig& config = {},
    const std::vector<std::optional<double>>* local_sbld = nullptr);

Measurement SpeechGatedLoudness(const AudioBuffer& mix,
                                const SpeechActivity& activity,
                                const AnalysisConfig& config = {});

Measurement SpeechLoudness(const AudioBuffer& speech,
                           const AnalysisConfig& config = {});

LraResult SpeechLra(const AudioBuffer& speech,
                    const AnalysisConfig& config = {});

// program - speech loudness; any non-ok input yields a non-ok result.
Measurement Ldr(const Measurement& program_loudness,
                const Measurement& speech_loudness);

Measurement SbldIntegrated(const AudioBuffer& speech,
                           const AudioBuffer& background,
                           const SpeechActivity& activity,
                           const AnalysisConfig& config = {});

// When `activity` is null it is detected from the stems (aux threshold and
// SBLD floor). Throws kProgramTooShort below one short-term window.
MicroTimelines ComputeMicroTimelines(const AudioBuffer& speech,
                                     const AudioBuffer& background,
                                     const AnalysisConfig& config = {},
                                     const SpeechActivity* activity = nullptr);

// A hop is critical when active and its SLD or local SBLD lies below the
// respective threshold. Runs of critical hops become intervals tagged with
// the union of reasons seen in the run.
CriticalPassages FindCriticalPassages(const MicroTimelines& micro,
                                      const SpeechActivity& activity,
                                      double sld_threshold_lu = -10.0,
                                      double sbld_threshold_lu = 0.0);

}  // namespace speechqc

#endif  // SPEECHQC_SPEECH_MEASURES_H_
