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

#ifndef SPEECHQC_TRUE_PEAK_H_
#define SPEECHQC_TRUE_PEAK_H_

#include <array>
#include <vector>

namespace speechqc {

// Oversampling factor used for true-peak estimation: 4x below 96 kHz, 2x
// below 192 kHz, none above.
int TruePeakOversampling(int sample_rate);

// Streaming inter-sample peak detector for one channel. Each input sample
// is interpolated at `factor` sub-sample positions with a 12-tap-per-phase
// Hann-windowed sinc (49-tap prototype at 4x). Integer positions reproduce
// the input exactly, so the result never falls below the sample peak.
class TruePeakDetector {
 public:
  static constexpr int kTapsPerPhase = 12;

  explicit TruePeakDetector(int factor);

  void Process(float x);

  // Peak magnitude including the not-yet-interpolated tail.
  double Peak() const;

 private:
  int factor_;
  std::vector<std::array<double, kTapsPerPhase>> phases_;
  // Doubled ring buffer: history_[pos_ .. pos_ + kTapsPerPhase) is contiguous.
  std::array<double, 2 * kTapsPerPhase> history_{};
  int pos_ = 0;
  double peak_ = 0.0;
};

}  // namespace speechqc

#endif  // SPEECHQC_TRUE_PEAK_H_
