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

#ifndef SPEECHQC_RESAMPLER_H_
#define SPEECHQC_RESAMPLER_H_

#include <cstddef>

#include "speechqc/audio_buffer.h"

namespace speechqc {

// Number of output frames produced for `input_frames` at `from_rate`:
// ceil(input_frames * to_rate / from_rate).
std::size_t ResampledLength(std::size_t input_frames, int from_rate,
                            int to_rate);

// Band-limited rational resampling with a Kaiser-windowed sinc kernel
// (beta 10, 32 zero crossings per side at the narrower Nyquist, cutoff at
// 95% of it). Stopband attenuation is roughly 100 dB. Intended for
// occasional conversion of non-48 kHz inputs, not for mastering.
AudioBuffer Resample(const AudioBuffer& input, int to_rate);

}  // namespace speechqc

#endif  // SPEECHQC_RESAMPLER_H_
