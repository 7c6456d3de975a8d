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

#include "speechqc/loudness_range.h"

#include <algorithm>
#include <cmath>

namespace speechqc {

double InterpolatedPercentile(std::span<const double> sorted, double percent) {
  if (sorted.empty()) return kSilence;
  const double rank = percent / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(rank));
  const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lower);
  return sorted[lower] + frac * (sorted[upper] - sorted[lower]);
}

LraResult LoudnessRange(std::span<const double> block_loudness,
                        const LraConfig& config,
                        const std::vector<bool>* include) {
  LraResult result;
  std::vector<double> kept;
  double energy = 0.0;
  for (std::size_t i = 0; i < block_loudness.size(); ++i) {
    if (include != nullptr && !(*include)[i]) continue;
    const double l = block_loudness[i];
    if (l > config.absolute_gate_lufs) {
      kept.push_back(l);
      energy += LoudnessToEnergy(l);
    }
  }
  if (kept.empty()) {
    result.lra = Measurement::Missing(Status::kBelowGate);
    return result;
  }
  const double relative_gate =
      EnergyToLoudness(energy / static_cast<double>(kept.size())) +
      config.relative_gate_lu;
  std::erase_if(kept, [&](double l) { return !(l > relative_gate); });
  if (kept.empty()) {
    result.lra = Measurement::Missing(Status::kBelowGate);
    return result;
  }
  std::sort(kept.begin(), kept.end());
  result.gated_block_count = kept.size();
  result.low_percentile_loudness =
      InterpolatedPercentile(kept, config.low_percentile);
  result.high_percentile_loudness =
      InterpolatedPercentile(kept, config.high_percentile);
  result.lra = Measurement::Ok(result.high_percentile_loudness -
                               result.low_percentile_loudness);
  return result;
}

}  // namespace speechqc
