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

#ifndef SPEECHQC_ANALYSIS_H_
#define SPEECHQC_ANALYSIS_H_

#include <optional>
#include <vector>

#include "speechqc/activity.h"
#include "speechqc/audio_buffer.h"
#include "speechqc/diagnostics.h"
#include "speechqc/measurement.h"
#include "speechqc/meter.h"
#include "speechqc/speech_measures.h"
#include "speechqc/stems.h"

namespace speechqc {

// Program-level and speech-level summary measures for one program.
struct MacroReport {
  Measurement program_loudness;       // LUFS
  Measurement program_lra;            // LU
  Measurement max_momentary;          // LUFS
  Measurement max_short_term;         // LUFS
  Measurement sample_peak;            // dBFS
  Measurement true_peak;              // dBTP
  Measurement speech_gated_loudness;  // LUFS
  Measurement speech_gated_lra;       // LU
  Measurement speech_loudness;        // LUFS, "SL"
  Measurement speech_lra;             // LU
  Measurement ldr;                    // LU, program - SL
  Measurement sbld_integrated;        // LU
  Measurement critical_percentage;    // %
};

// Metered form of a program: the only state kept while streaming.
struct ProgramEnergies {
  int sample_rate = 0;
  std::size_t num_channels = 0;
  EnergySeries mix;
  std::optional<EnergySeries> speech;
  std::optional<EnergySeries> background;
  PeakReport mix_peaks;
};

struct Analysis {
  double duration_s = 0.0;
  int sample_rate = 0;
  std::size_t num_channels = 0;
  MacroReport macro;
  MicroGrid grid;
  std::vector<double> momentary;   // mix, centered on grid hops
  std::vector<double> short_term;  // mix, on grid hops
  bool has_activity = false;
  SpeechActivity activity;
  std::optional<MicroTimelines> micro;
  CriticalPassages critical;
};

// Streaming front end: meters the mix and, optionally, the speech and
// background stems chunk by chunk. Memory is independent of program length
// apart from one double per metering quantum and signal.
class ProgramAnalyzer {
 public:
  ProgramAnalyzer(int sample_rate, const std::vector<ChannelRole>& layout,
                  const AnalysisConfig& config, bool with_stems);

  // Chunks must share length; speech and background are required exactly
  // when the analyzer was built with_stems.
  void Process(const AudioBuffer& mix, const AudioBuffer* speech = nullptr,
               const AudioBuffer* background = nullptr);

  ProgramEnergies Finish();

 private:
  int sample_rate_;
  std::size_t num_channels_;
  LoudnessMeter mix_;
  std::optional<LoudnessMeter> speech_;
  std::optional<LoudnessMeter> background_;
};

// Computes every measure from metered energies. Activity comes from
// `sidecar` when given (quantized to the hop grid), else is detected from
// the speech stem. Sub-measure failures become per-field statuses.
Analysis Analyze(const ProgramEnergies& energies,
                 const ActivitySidecar* sidecar, const AnalysisConfig& config);

// Buffer front end: completes the stem set (deriving a missing stem), meters
// it and analyzes. A set holding only a mix yields program measures with
// speech measures marked unavailable.
Analysis AnalyzeStems(const StemSet& stems, const ActivitySidecar* sidecar,
                      const AnalysisConfig& config,
                      Diagnostics* diag = nullptr);

}  // namespace speechqc

#endif  // SPEECHQC_ANALYSIS_H_
