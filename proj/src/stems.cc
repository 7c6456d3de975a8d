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

#include "speechqc/stems.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "speechqc/error.h"

namespace speechqc {

AudioBuffer DeriveBackground(const AudioBuffer& mix,
                             const AudioBuffer& speech) {
  return Subtract(mix, speech);
}

StemSet AlignStems(StemSet stems, Diagnostics* diag) {
  const AudioBuffer* reference = stems.mix ? &*stems.mix
                                 : stems.speech ? &*stems.speech
                                                : nullptr;
  if (reference == nullptr) return stems;
  const std::size_t frames = reference->num_frames();
  auto align = [&](std::optional<AudioBuffer>& stem, const char* name) {
    if (!stem || &*stem == reference) return;
    if (stem->sample_rate() != reference->sample_rate()) {
      throw Error(ErrorCode::kAlignment,
                  std::string(name) + " stem sample rate " +
                      std::to_string(stem->sample_rate()) +
                      " Hz differs from " +
                      std::to_string(reference->sample_rate()) + " Hz");
    }
    if (stem->layout() != reference->layout()) {
      throw Error(ErrorCode::kAlignment,
                  std::string(name) + " stem channel layout differs");
    }
    if (stem->num_frames() > frames) {
      Warn(diag, std::string(name) + " stem truncated from " +
                     std::to_string(stem->num_frames()) + " to " +
                     std::to_string(frames) + " frames");
      stem->Resize(frames);
    } else if (stem->num_frames() < frames) {
      Warn(diag, std::string(name) + " stem zero-padded from " +
                     std::to_string(stem->num_frames()) + " to " +
                     std::to_string(frames) + " frames");
      stem->Resize(frames);
    }
  };
  align(stems.speech, "speech");
  align(stems.background, "background");
  return stems;
}

double MixResidual(const AudioBuffer& mix, const AudioBuffer& speech,
                   const AudioBuffer& background) {
  double worst = 0.0;
  for (std::size_t c = 0; c < mix.num_channels(); ++c) {
    const auto m = mix.channel(c);
    const auto s = speech.channel(c);
    const auto b = background.channel(c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      worst = std::max(worst, std::fabs(static_cast<double>(m[i]) - s[i] - b[i]));
    }
  }
  return worst;
}

StemSet CompleteStems(StemSet stems, double residual_tolerance,
                      Diagnostics* diag) {
  if (stems.present_count() < 2) {
    throw Error(ErrorCode::kUsage,
                "need at least two of mix, speech and background");
  }
  stems = AlignStems(std::move(stems), diag);
  if (!stems.mix) {
    stems.mix = Add(*stems.speech, *stems.background);
  } else if (!stems.background) {
    stems.background = DeriveBackground(*stems.mix, *stems.speech);
  } else if (!stems.speech) {
    stems.speech = Subtract(*stems.mix, *stems.background);
  } else {
    const double residual =
        MixResidual(*stems.mix, *stems.speech, *stems.background);
    if (residual > residual_tolerance) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "mix differs from speech + background by up to %.3g "
                    "(tolerance %.3g)",
                    residual, residual_tolerance);
      Warn(diag, buf);
    }
  }
  return stems;
}

}  // namespace speechqc
