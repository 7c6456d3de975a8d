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

#include "speechqc/k_weighting.h"

#include <cmath>
#include <numbers>

namespace speechqc {

namespace {

constexpr KWeightingCoefficients kKWeighting48000 = {
    {1.53512485958697, -2.69169618940638, 1.19839281085285,
     -1.69065929318241, 0.73248077421585},
    {1.0, -2.0, 1.0, -1.99004745483398, 0.99007225036621},
};

// Analog prototype of the pre-filter (high shelf) and RLB high-pass.
constexpr double kShelfFrequency = 1681.974450955533;
constexpr double kShelfGainDb = 3.999843853973347;
constexpr double kShelfQ = 0.7071752369554196;
constexpr double kShelfBandExponent = 0.4996667741545416;
constexpr double kHighpassFrequency = 38.13547087602444;
constexpr double kHighpassQ = 0.5003270373238773;

}  // namespace

KWeightingCoefficients KWeightingFor(int sample_rate) {
  if (sample_rate == 48000) return kKWeighting48000;

  KWeightingCoefficients c;
  const double fs = sample_rate;
  {
    const double k = std::tan(std::numbers::pi * kShelfFrequency / fs);
    const double vh = std::pow(10.0, kShelfGainDb / 20.0);
    const double vb = std::pow(vh, kShelfBandExponent);
    const double a0 = 1.0 + k / kShelfQ + k * k;
    c.shelf.b0 = (vh + vb * k / kShelfQ + k * k) / a0;
    c.shelf.b1 = 2.0 * (k * k - vh) / a0;
    c.shelf.b2 = (vh - vb * k / kShelfQ + k * k) / a0;
    c.shelf.a1 = 2.0 * (k * k - 1.0) / a0;
    c.shelf.a2 = (1.0 - k / kShelfQ + k * k) / a0;
  }
  {
    const double k = std::tan(std::numbers::pi * kHighpassFrequency / fs);
    const double a0 = 1.0 + k / kHighpassQ + k * k;
    c.highpass.b0 = 1.0;
    c.highpass.b1 = -2.0;
    c.highpass.b2 = 1.0;
    c.highpass.a1 = 2.0 * (k * k - 1.0) / a0;
    c.highpass.a2 = (1.0 - k / kHighpassQ + k * k) / a0;
  }
  return c;
}

AudioBuffer KWeight(const AudioBuffer& buffer) {
  const KWeightingCoefficients coeffs = KWeightingFor(buffer.sample_rate());
  AudioBuffer out = buffer;
  for (std::size_t c = 0; c < out.num_channels(); ++c) {
    KWeightingFilter filter(coeffs);
    for (float& x : out.mutable_channel(c)) {
      x = static_cast<float>(filter.Process(x));
    }
  }
  return out;
}

}  // namespace speechqc
