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

#ifndef SPEECHQC_LOUDNESS_RANGE_H_
#define SPEECHQC_LOUDNESS_RANGE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "speechqc/measurement.h"
#include "speechqc/meter.h"

namespace speechqc {

struct LraConfig {
  double absolute_gate_lufs = -70.0;
  double relative_gate_lu = -20.0;
  double low_percentile = 10.0;
  double high_percentile = 95.0;
};

struct LraResult {
  Measurement lra;  // kBelowGate when no block survives gating
  double low_percentile_loudness = kSilence;
  double high_percentile_loudness = kSilence;
  std::size_t gated_block_count = 0;
};

// Percentile (0..100) of `sorted` by linear interpolation between order
// statistics at rank p/100 * (n - 1).
double InterpolatedPercentile(std::span<const double> sorted, double percent);

// Loudness range over short-term blocks: absolute gate, relative gate below
// the energy mean of the absolute-gated blocks, then the spread between the
// low and high percentiles of the surviving block loudness values.
// `include` optionally restricts the blocks considered.
LraResult LoudnessRange(std::span<const double> block_loudness,
                        const LraConfig& config = {},
                        const std::vector<bool>* include = nullptr);

inline LraResult LoudnessRange(const LoudnessTimeline& timeline,
                               const LraConfig& config = {}) {
  return LoudnessRange(timeline.values, config);
}

}  // namespace speechqc

#endif  // SPEECHQC_LOUDNESS_RANGE_H_
