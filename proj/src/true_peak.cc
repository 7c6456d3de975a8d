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

#include "speechqc/true_peak.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace speechqc {

namespace {

constexpr double kHalfWidth = TruePeakDetector::kTapsPerPhase / 2.0;

double InterpolationKernel(double x) {
  if (std::fabs(x) >= kHalfWidth) return 0.0;
  const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * x / kHalfWidth));
  const double sinc =
      x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
  return sinc * window;
}

}  // namespace

int TruePeakOversampling(int sample_rate) {
  if (sample_rate < 96000) return 4;
  if (sample_rate < 192000) return 2;
  return 1;
}

TruePeakDetector::TruePeakDetector(int factor) : factor_(factor) {
  // Phase p evaluates the signal at (center + p / factor), where the center
  // sample sits at history index kTapsPerPhase / 2 - 1.
  for (int p = 1; p < factor_; ++p) {
    std::array<double, kTapsPerPhase> taps{};
    const double frac = static_cast<double>(p) / factor_;
    for (int j = 0; j < kTapsPerPhase; ++j) {
      const int offset = j - (kTapsPerPhase / 2 - 1);
      taps[j] = InterpolationKernel(frac - offset);
    }
    phases_.push_back(taps);
  }
}

void TruePeakDetector::Process(float x) {
  const double v = x;
  peak_ = std::max(peak_, std::fabs(v));
  history_[pos_] = v;
  history_[pos_ + kTapsPerPhase] = v;
  pos_ = (pos_ + 1) % kTapsPerPhase;
  const double* window = &history_[pos_];
  for (const auto& taps : phases_) {
    double acc = 0.0;
    for (int j = 0; j < kTapsPerPhase; ++j) acc += taps[j] * window[j];
    peak_ = std::max(peak_, std::fabs(acc));
  }
}

double TruePeakDetector::Peak() const {
  TruePeakDetector flushed = *this;
  for (int i = 0; i < kTapsPerPhase / 2; ++i) flushed.Process(0.0f);
  return flushed.peak_;
}

}  // namespace speechqc
