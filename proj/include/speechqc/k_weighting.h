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

#ifndef SPEECHQC_K_WEIGHTING_H_
#define SPEECHQC_K_WEIGHTING_H_

#include <array>
#include <span>
#include <vector>

#include "speechqc/audio_buffer.h"

namespace speechqc {

// Normalized biquad: y = b0 x + b1 x1 + b2 x2 - a1 y1 - a2 y2.
struct BiquadCoefficients {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

// The two K-weighting stages: high-shelf pre-filter and RLB high-pass.
struct KWeightingCoefficients {
  BiquadCoefficients shelf;
  BiquadCoefficients highpass;
};

// Published coefficients at 48 kHz; bilinear-transform designs from the
// analog prototype at any other rate.
KWeightingCoefficients KWeightingFor(int sample_rate);

// Streaming single-channel K-weighting filter with zero initial state.
class KWeightingFilter {
 public:
  explicit KWeightingFilter(const KWeightingCoefficients& coeffs)
      : coeffs_(coeffs) {}

  double Process(double x) {
    // Direct form I, two cascaded sections.
    const BiquadCoefficients& s = coeffs_.shelf;
    const double y1 = s.b0 * x + s.b1 * shelf_x_[0] + s.b2 * shelf_x_[1] -
                      s.a1 * shelf_y_[0] - s.a2 * shelf_y_[1];
    shelf_x_[1] = shelf_x_[0];
    shelf_x_[0] = x;
    shelf_y_[1] = shelf_y_[0];
    shelf_y_[0] = y1;

    const BiquadCoefficients& h = coeffs_.highpass;
    const double y2 = h.b0 * y1 + h.b1 * hp_x_[0] + h.b2 * hp_x_[1] -
                      h.a1 * hp_y_[0] - h.a2 * hp_y_[1];
    hp_x_[1] = hp_x_[0];
    hp_x_[0] = y1;
    hp_y_[1] = hp_y_[0];
    hp_y_[0] = y2;
    return y2;
  }

  void Reset() {
    shelf_x_ = {};
    shelf_y_ = {};
    hp_x_ = {};
    hp_y_ = {};
  }

 private:
  KWeightingCoefficients coeffs_;
  std::array<double, 2> shelf_x_{};
  std::array<double, 2> shelf_y_{};
  std::array<double, 2> hp_x_{};
  std::array<double, 2> hp_y_{};
};

// K-weights every channel with fresh filter state.
AudioBuffer KWeight(const AudioBuffer& buffer);

}  // namespace speechqc

#endif  // SPEECHQC_K_WEIGHTING_H_
