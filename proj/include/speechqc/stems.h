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

#ifndef SPEECHQC_STEMS_H_
#define SPEECHQC_STEMS_H_

#include <optional>

#include "speechqc/audio_buffer.h"
#include "speechqc/diagnostics.h"

namespace speechqc {

struct StemSet {
  std::optional<AudioBuffer> mix;
  std::optional<AudioBuffer> speech;
  std::optional<AudioBuffer> background;

  int present_count() const {
    return static_cast<int>(mix.has_value()) +
           static_cast<int>(speech.has_value()) +
           static_cast<int>(background.has_value());
  }
  bool complete() const { return present_count() == 3; }
};

// Returns mix - speech. Throws kAlignment unless rate, layout and length
// match.
AudioBuffer DeriveBackground(const AudioBuffer& mix, const AudioBuffer& speech);

// Brings every present stem to the reference length (the mix when present,
// otherwise the speech stem). Longer stems are truncated and shorter ones
// zero padded, each with a warning. Sample rate or layout mismatches throw
// kAlignment.
StemSet AlignStems(StemSet stems, Diagnostics* diag = nullptr);

// Fills in the missing stem from the other two (mix = speech + background,
// background = mix - speech, speech = mix - background). Requires at least
// two aligned stems. With all three present, warns when the residual
// max |mix - speech - background| exceeds `residual_tolerance`.
StemSet CompleteStems(StemSet stems, double residual_tolerance = 1e-3,
                      Diagnostics* diag = nullptr);

// Largest sample-wise |mix - speech - background|.
double MixResidual(const AudioBuffer& mix, const AudioBuffer& speech,
                   const AudioBuffer& background);

}  // namespace speechqc

#endif  // SPEECHQC_STEMS_H_
