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

#include "speechqc/speech_measures.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "speechqc/error.h"

namespace speechqc {

std::string_view GatingModeName(GatingMode mode) {
  return mode == GatingMode::kStandard ? "standard" : "ungated";
}

std::string_view CriticalReasonName(CriticalReason reason) {
  switch (reason) {
    case CriticalReason::kLowSld:
      return "low_sld";
    case CriticalReason::kLowSbld:
      return "low_sbld";
    case CriticalReason::kBoth:
      return "both";
  }
  return "unknown";
}

void AnalysisConfig::Validate() const {
  meter.Validate();
  if (!(speech.aux_window_s > 0) ||
      speech.aux_window_s > meter.short_term_window_s) {
    throw Error(ErrorCode::kValidation,
                "aux window must be positive and no longer than the "
                "short-term window");
  }
  if (!(lra_hop_s > 0) || lra_hop_s > meter.short_term_window_s) {
    throw Error(ErrorCode::kValidation,
                "LRA hop must be positive and no longer than the short-term "
                "window");
  }
  if (!(speech.sbld_cap_lu > 0)) {
    throw Error(ErrorCode::kValidation, "SBLD cap must be positive");
  }
}

std::size_t AnalysisConfig::Quantum(int sample_rate) const {
  const double durations[] = {
      meter.momentary_window_s,
      meter.momentary_hop_s,
      meter.short_term_window_s,
      meter.short_term_hop_s,
      speech.aux_window_s,
      lra_hop_s,
  };
  std::vector<double> all(std::begin(durations), std::end(durations));
  // Offsets that center aux and momentary windows on short-term centers.
  const double aux_offset =
      (meter.short_term_window_s - speech.aux_window_s) / 2.0;
  const double momentary_offset =
      (meter.short_term_window_s - meter.momentary_window_s) / 2.0;
  if (aux_offset > 0) all.push_back(aux_offset);
  if (momentary_offset > 0) all.push_back(momentary_offset);
  return QuantumFrames(sample_rate, all);
}

MicroGrid MicroGrid::For(const EnergySeries& series, const AnalysisConfig& c) {
  MicroGrid grid;
  grid.hop_s = c.meter.short_term_hop_s;
  grid.first_center_s = c.meter.short_term_window_s / 2.0;
  grid.size = series.CountBlocks(0, series.Frames(c.meter.short_term_window_s),
                                 series.Frames(c.meter.short_term_hop_s));
  return grid;
}

SpeechActivity ActivityFromMask(const MicroGrid& grid, std::vector<bool> mask,
                                ActivitySource source) {
  SpeechActivity activity;
  activity.grid = grid;
  activity.source = source;
  const double half = grid.hop_s / 2.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    ++active;
    const double start = grid.center(k) - half;
    const double end = grid.center(k) + half;
    if (k > 0 && mask[k - 1] && !activity.intervals.empty()) {
      activity.intervals.back().end_s = end;
    } else {
      activity.intervals.push_back({start, end});
    }
  }
  activity.coverage_s = static_cast<double>(active) * grid.hop_s;
  activity.mask = std::move(mask);
  return activity;
}

SpeechActivity ActivityFromSidecar(const ActivitySidecar& sidecar,
                                   const MicroGrid& grid) {
  std::vector<bool> mask(grid.size, false);
  for (std::size_t k = 0; k < grid.size; ++k) {
    mask[k] = IntervalsContain(sidecar.intervals, grid.center(k));
  }
  return ActivityFromMask(grid, std::move(mask), sidecar.source);
}

std::vector<double> AuxSpeechLoudness(const EnergySeries& speech,
                                      const MicroGrid& grid,
                                      const AnalysisConfig& config) {
  const std::size_t window = speech.Frames(config.speech.aux_window_s);
  const std::size_t hop = speech.Frames(grid.hop_s);
  const double offset_s =
      (config.meter.short_term_window_s - config.speech.aux_window_s) / 2.0;
  const std::size_t offset = offset_s > 0 ? speech.Frames(offset_s) : 0;
  std::vector<double> out(grid.size);
  for (std::size_t k = 0; k < grid.size; ++k) {
    out[k] = EnergyToLoudness(speech.WindowMeanSquare(offset + k * hop, window));
  }
  return out;
}

std::vector<double> ShortTermOnGrid(const EnergySeries& series,
                                    const MicroGrid& grid,
                                    const AnalysisConfig& config) {
  const std::size_t window = series.Frames(config.meter.short_term_window_s);
  const std::size_t hop = series.Frames(grid.hop_s);
  std::vector<double> out(grid.size);
  for (std::size_t k = 0; k < grid.size; ++k) {
    out[k] = EnergyToLoudness(series.WindowMeanSquare(k * hop, window));
  }
  return out;
}

std::vector<std::optional<double>> RawLocalSbld(
    const std::vector<double>& speech_short_term,
    const std::vector<double>& background_short_term, double cap) {
  const std::size_t n =
      std::min(speech_short_term.size(), background_short_term.size());
  std::vector<std::optional<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = speech_short_term[k];
    const double b = background_short_term[k];
    const bool s_silent = std::isinf(s);
    const bool b_silent = std::isinf(b);
    if (s_silent && b_silent) continue;
    if (b_silent) {
      out[k] = cap;
    } else if (s_silent) {
      out[k] = -cap;
    } else {
      out[k] = std::clamp(s - b, -cap, cap);
    }
  }
  return out;
}

SpeechActivity DetectActivityFromSeries(
    const EnergySeries& speech, const AnalysisConfig& config,
    const std::vector<std::optional<double>>* local_sbld) {
  const MicroGrid grid = MicroGrid::For(speech, config);
  const std::vector<double> aux = AuxSpeechLoudness(speech, grid, config);
  std::vector<bool> mask(grid.size, false);
  for (std::size_t k = 0; k < grid.size; ++k) {
    bool active = aux[k] >= config.speech.activation_threshold_lufs;
    if (active && local_sbld != nullptr) {
      const std::optional<double>& v = (*local_sbld)[k];
      active = v.has_value() && *v >= config.speech.sbld_floor_lu;
    }
    mask[k] = active;
  }
  return ActivityFromMask(grid, std::move(mask), ActivitySource::kDerived);
}

std::vector<bool> CentersInActivity(const std::vector<double>& centers_s,
                                    const SpeechActivity& activity) {
  std::vector<bool> include(centers_s.size(), false);
  for (std::size_t i = 0; i < centers_s.size(); ++i) {
    include[i] = IntervalsContain(activity.intervals, centers_s[i]);
  }
  return include;
}

namespace {

bool AnySelected(const std::vector<bool>& include) {
  return std::find(include.begin(), include.end(), true) != include.end();
}

// Energy mean over selected blocks; kBelowGate for zero energy.
Measurement UngatedLoudness(const std::vector<double>& mean_squares,
                            const std::vector<bool>* include) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < mean_squares.size(); ++i) {
    if (include != nullptr && !(*include)[i]) continue;
    sum += mean_squares[i];
    ++count;
  }
  if (count == 0 || !(sum > 0.0)) {
    return Measurement::Missing(Status::kBelowGate);
  }
  return Measurement::Ok(EnergyToLoudness(sum / static_cast<double>(count)));
}

Measurement LoudnessOverBlocks(const std::vector<double>& mean_squares,
                               const std::vector<bool>* include,
                               GatingMode mode, const MeterConfig& meter) {
  if (mode == GatingMode::kUngated) {
    return UngatedLoudness(mean_squares, include);
  }
  return GatedLoudness(mean_squares, meter.absolute_gate_lufs,
                       meter.relative_gate_lu, include);
}

}  // namespace

Measurement SpeechGatedLoudnessFromSeries(const EnergySeries& mix,
                                          const SpeechActivity& activity,
                                          const AnalysisConfig& config) {
  if (activity.empty()) return Measurement::Missing(Status::kNoSpeech);
  const GatingBlocks blocks = GatingBlocksOf(mix, config.meter);
  const std::vector<bool> include =
      CentersInActivity(blocks.centers_s, activity);
  if (!AnySelected(include)) return Measurement::Missing(Status::kNoSpeech);
  return GatedLoudness(blocks.mean_squares, config.meter.absolute_gate_lufs,
                       config.meter.relative_gate_lu, &include);
}

LraResult SpeechGatedLraFromSeries(const EnergySeries& mix,
                                   const SpeechActivity& activity,
                                   const AnalysisConfig& config) {
  LraResult result;
  if (activity.empty()) {
    result.lra = Measurement::Missing(Status::kNoSpeech);
    return result;
  }
  const LoudnessTimeline st = BlockTimeline(
      mix, config.meter.short_term_window_s, config.lra_hop_s);
  const std::vector<bool> include = CentersInActivity(st.times, activity);
  if (!AnySelected(include)) {
    result.lra = Measurement::Missing(Status::kNoSpeech);
    return result;
  }
  return LoudnessRange(st.values, config.lra, &include);
}

Measurement SpeechLoudnessFromSeries(const EnergySeries& speech,
                                     const AnalysisConfig& config) {
  const GatingBlocks blocks = GatingBlocksOf(speech, config.meter);
  if (blocks.mean_squares.empty()) {
    return Measurement::Missing(Status::kTooShort);
  }
  return LoudnessOverBlocks(blocks.mean_squares, nullptr,
                            config.speech.speech_gating, config.meter);
}

LraResult LraFromSeries(const EnergySeries& series,
                        const AnalysisConfig& config) {
  const LoudnessTimeline st = BlockTimeline(
      series, config.meter.short_term_window_s, config.lra_hop_s);
  if (st.size() == 0) {
    LraResult result;
    result.lra = Measurement::Missing(Status::kTooShort);
    return result;
  }
  return LoudnessRange(st.values, config.lra);
}

Measurement SbldIntegratedFromSeries(const EnergySeries& speech,
                                     const EnergySeries& background,
                                     const SpeechActivity& activity,
                                     const AnalysisConfig& config) {
  if (activity.empty()) return Measurement::Missing(Status::kNoSpeech);
  const GatingBlocks s_blocks = GatingBlocksOf(speech, config.meter);
  const GatingBlocks b_blocks = GatingBlocksOf(background, config.meter);
  const std::vector<bool> include =
      CentersInActivity(s_blocks.centers_s, activity);
  if (!AnySelected(include)) return Measurement::Missing(Status::kNoSpeech);

  const Measurement speech_loudness = LoudnessOverBlocks(
      s_blocks.mean_squares, &include, config.speech.speech_gating,
      config.meter);
  if (!speech_loudness.ok()) return speech_loudness;
  const Measurement background_loudness = LoudnessOverBlocks(
      b_blocks.mean_squares, &include, config.speech.background_gating,
      config.meter);
  const double cap = config.speech.sbld_cap_lu;
  if (!background_loudness.ok()) return Measurement::Capped(cap);
  const double sbld = *speech_loudness.value - *background_loudness.value;
  if (sbld > cap) return Measurement::Capped(cap);
  if (sbld < -cap) return Measurement::Capped(-cap);
  return Measurement::Ok(sbld);
}

MicroTimelines MicroTimelinesFromSeries(const EnergySeries& speech,
                                        const EnergySeries& background,
                                        const Measurement& speech_loudness,
                                        const SpeechActivity& activity,
                                        const AnalysisConfig& config) {
  MicroTimelines micro;
  micro.grid = MicroGrid::For(speech, config);
  micro.speech_short_term = ShortTermOnGrid(speech, micro.grid, config);
  micro.background_short_term = ShortTermOnGrid(background, micro.grid, config);
  micro.aux_speech_loudness = AuxSpeechLoudness(speech, micro.grid, config);
  if (speech_loudness.ok()) {
    micro.sld.resize(micro.grid.size);
    for (std::size_t k = 0; k < micro.grid.size; ++k) {
      micro.sld[k] = micro.speech_short_term[k] - *speech_loudness.value;
    }
  }
  micro.local_sbld =
      RawLocalSbld(micro.speech_short_term, micro.background_short_term,
                   config.speech.sbld_cap_lu);
  for (std::size_t k = 0; k < micro.grid.size; ++k) {
    if (k >= activity.mask.size() || !activity.mask[k]) {
      micro.local_sbld[k].reset();
    }
  }
  return micro;
}

namespace {

std::vector<double> Weights(const AudioBuffer& buffer,
                            const AnalysisConfig& config) {
  return config.meter.WeightsFor(buffer.layout());
}

EnergySeries MeterBuffer(const AudioBuffer& buffer,
                         const AnalysisConfig& config) {
  config.Validate();
  LoudnessMeter meter(buffer.sample_rate(), Weights(buffer, config),
                      config.Quantum(buffer.sample_rate()));
  meter.Process(buffer);
  return meter.TakeEnergies();
}

void RequireShape(const AudioBuffer& a, const AudioBuffer& b) {
  if (!a.SameShape(b)) {
    throw Error(ErrorCode::kAlignment,
                "stems differ in sample rate, layout or length");
  }
}

}  // namespace

SpeechActivity DetectActivity(
    const AudioBuffer& speech, const AnalysisConfig& config,
    const std::vector<std::optional<double>>* local_sbld) {
  return DetectActivityFromSeries(MeterBuffer(speech, config), config,
                                  local_sbld);
}

Measurement SpeechGatedLoudness(const AudioBuffer& mix,
                                const SpeechActivity& activity,
                                const AnalysisConfig& config) {
  return SpeechGatedLoudnessFromSeries(MeterBuffer(mix, config), activity,
                                       config);
}

Measurement SpeechLoudness(const AudioBuffer& speech,
                           const AnalysisConfig& config) {
  return SpeechLoudnessFromSeries(MeterBuffer(speech, config), config);
}

LraResult SpeechLra(const AudioBuffer& speech, const AnalysisConfig& config) {
  return LraFromSeries(MeterBuffer(speech, config), config);
}

Measurement Ldr(const Measurement& program_loudness,
                const Measurement& speech_loudness) {
  return Difference(program_loudness, speech_loudness);
}

Measurement SbldIntegrated(const AudioBuffer& speech,
                           const AudioBuffer& background,
                           const SpeechActivity& activity,
                           const AnalysisConfig& config) {
  RequireShape(speech, background);
  return SbldIntegratedFromSeries(MeterBuffer(speech, config),
                                  MeterBuffer(background, config), activity,
                                  config);
}

MicroTimelines ComputeMicroTimelines(const AudioBuffer& speech,
                                     const AudioBuffer& background,
                                     const AnalysisConfig& config,
                                     const SpeechActivity* activity) {
  RequireShape(speech, background);
  if (speech.duration_s() + 1e-9 < config.meter.short_term_window_s) {
    throw Error(ErrorCode::kProgramTooShort,
                "program too short for short-term measures: " +
                    std::to_string(speech.duration_s()) + " s");
  }
  const EnergySeries s = MeterBuffer(speech, config);
  const EnergySeries b = MeterBuffer(background, config);
  const Measurement sl = SpeechLoudnessFromSeries(s, config);
  if (activity != nullptr) {
    return MicroTimelinesFromSeries(s, b, sl, *activity, config);
  }
  const MicroGrid grid = MicroGrid::For(s, config);
  const auto raw = RawLocalSbld(ShortTermOnGrid(s, grid, config),
                                ShortTermOnGrid(b, grid, config),
                                config.speech.sbld_cap_lu);
  const SpeechActivity detected = DetectActivityFromSeries(s, config, &raw);
  return MicroTimelinesFromSeries(s, b, sl, detected, config);
}

CriticalPassages FindCriticalPassages(const MicroTimelines& micro,
                                      const SpeechActivity& activity,
                                      double sld_threshold_lu,
                                      double sbld_threshold_lu) {
  CriticalPassages out;
  const std::size_t n = micro.grid.size;
  out.mask.assign(n, false);
  std::size_t active = 0;
  std::size_t critical = 0;
  const double half = micro.grid.hop_s / 2.0;
  bool in_run = false;
  for (std::size_t k = 0; k < n; ++k) {
    const bool is_active = k < activity.mask.size() && activity.mask[k];
    bool low_sld = false;
    bool low_sbld = false;
    if (is_active) {
      ++active;
      low_sld = !micro.sld.empty() && micro.sld[k] < sld_threshold_lu;
      low_sbld = micro.local_sbld[k].has_value() &&
                 *micro.local_sbld[k] < sbld_threshold_lu;
    }
    if (!(low_sld || low_sbld)) {
      in_run = false;
      continue;
    }
    ++critical;
    out.mask[k] = true;
    const CriticalReason reason = low_sld && low_sbld ? CriticalReason::kBoth
                                  : low_sld          ? CriticalReason::kLowSld
                                                     : CriticalReason::kLowSbld;
    const double start = micro.grid.center(k) - half;
    const double end = micro.grid.center(k) + half;
    if (in_run) {
      CriticalInterval& last = out.intervals.back();
      last.end_s = end;
      if (last.reason != reason) last.reason = CriticalReason::kBoth;
    } else {
      out.intervals.push_back({start, end, reason});
      in_run = true;
    }
  }
  out.percentage =
      active == 0 ? Measurement::Missing(Status::kNoSpeech)
                  : Measurement::Ok(100.0 * static_cast<double>(critical) /
                                    static_cast<double>(active));
  return out;
}

}  // namespace speechqc
