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

#include "speechqc/analysis.h"

#include <cmath>
#include <utility>

#include "speechqc/error.h"

namespace speechqc {

namespace {

Measurement FromLoudness(double lufs, Status if_missing) {
  if (std::isinf(lufs) || std::isnan(lufs)) {
    return Measurement::Missing(if_missing);
  }
  return Measurement::Ok(lufs);
}

Measurement MaxOf(const std::vector<double>& values) {
  if (values.empty()) return Measurement::Missing(Status::kTooShort);
  double best = kSilence;
  for (double v : values) best = std::max(best, v);
  return FromLoudness(best, Status::kBelowGate);
}

std::vector<double> CenteredMomentary(const EnergySeries& mix,
                                      const MicroGrid& grid,
                                      const AnalysisConfig& config) {
  std::vector<double> out(grid.size);
  if (grid.size == 0) return out;
  const std::size_t window = mix.Frames(config.meter.momentary_window_s);
  const std::size_t hop = mix.Frames(grid.hop_s);
  const double offset_s =
      (config.meter.short_term_window_s - config.meter.momentary_window_s) /
      2.0;
  const std::size_t offset = offset_s > 0 ? mix.Frames(offset_s) : 0;
  for (std::size_t k = 0; k < grid.size; ++k) {
    out[k] = EnergyToLoudness(mix.WindowMeanSquare(offset + k * hop, window));
  }
  return out;
}

}  // namespace

ProgramAnalyzer::ProgramAnalyzer(int sample_rate,
                                 const std::vector<ChannelRole>& layout,
                                 const AnalysisConfig& config, bool with_stems)
    : sample_rate_(sample_rate),
      num_channels_(layout.size()),
      mix_(sample_rate, config.meter.WeightsFor(layout),
           config.Quantum(sample_rate), /*measure_peaks=*/true) {
  config.Validate();
  if (with_stems) {
    speech_.emplace(sample_rate, config.meter.WeightsFor(layout),
                    config.Quantum(sample_rate));
    background_.emplace(sample_rate, config.meter.WeightsFor(layout),
                        config.Quantum(sample_rate));
  }
}

void ProgramAnalyzer::Process(const AudioBuffer& mix,
                              const AudioBuffer* speech,
                              const AudioBuffer* background) {
  const bool with_stems = speech_.has_value();
  if (with_stems != (speech != nullptr) ||
      with_stems != (background != nullptr)) {
    throw Error(ErrorCode::kUsage,
                "stem chunks must be supplied exactly when the analyzer "
                "meters stems");
  }
  if (with_stems && (!mix.SameShape(*speech) || !mix.SameShape(*background))) {
    throw Error(ErrorCode::kAlignment, "stem chunks differ in shape");
  }
  mix_.Process(mix);
  if (with_stems) {
    speech_->Process(*speech);
    background_->Process(*background);
  }
}

ProgramEnergies ProgramAnalyzer::Finish() {
  ProgramEnergies out;
  out.sample_rate = sample_rate_;
  out.num_channels = num_channels_;
  out.mix_peaks = mix_.peaks();
  out.mix = mix_.TakeEnergies();
  if (speech_) {
    out.speech = speech_->TakeEnergies();
    out.background = background_->TakeEnergies();
  }
  return out;
}

Analysis Analyze(const ProgramEnergies& energies,
                 const ActivitySidecar* sidecar,
                 const AnalysisConfig& config) {
  config.Validate();
  Analysis a;
  a.sample_rate = energies.sample_rate;
  a.num_channels = energies.num_channels;
  a.duration_s = energies.mix.duration_s();
  MacroReport& m = a.macro;
  const EnergySeries& mix = energies.mix;

  m.program_loudness = IntegratedFromSeries(mix, config.meter);
  m.program_lra = LraFromSeries(mix, config).lra;
  m.max_momentary = MaxOf(BlockTimeline(mix, config.meter.momentary_window_s,
                                        config.meter.momentary_hop_s)
                              .values);
  m.max_short_term = MaxOf(BlockTimeline(mix, config.meter.short_term_window_s,
                                         config.meter.short_term_hop_s)
                               .values);
  m.sample_peak =
      FromLoudness(energies.mix_peaks.sample_peak_dbfs, Status::kBelowGate);
  m.true_peak =
      FromLoudness(energies.mix_peaks.true_peak_dbtp, Status::kBelowGate);

  a.grid = MicroGrid::For(mix, config);
  a.momentary = CenteredMomentary(mix, a.grid, config);
  a.short_term = ShortTermOnGrid(mix, a.grid, config);

  const bool have_stems =
      energies.speech.has_value() && energies.background.has_value();
  std::vector<std::optional<double>> raw_local_sbld;
  if (have_stems) {
    raw_local_sbld = RawLocalSbld(
        ShortTermOnGrid(*energies.speech, a.grid, config),
        ShortTermOnGrid(*energies.background, a.grid, config),
        config.speech.sbld_cap_lu);
  }
  if (sidecar != nullptr) {
    a.activity = ActivityFromSidecar(*sidecar, a.grid);
    a.has_activity = true;
  } else if (have_stems) {
    a.activity =
        DetectActivityFromSeries(*energies.speech, config, &raw_local_sbld);
    a.has_activity = true;
  } else {
    a.activity = ActivityFromMask(a.grid, std::vector<bool>(a.grid.size),
                                  ActivitySource::kDerived);
  }

  // Without a grid there is no activity to gate on.
  const Status no_activity =
      a.grid.size == 0 ? Status::kTooShort
      : a.has_activity ? Status::kNoSpeech
                       : Status::kUnavailable;
  if (a.has_activity && a.grid.size > 0) {
    m.speech_gated_loudness =
        SpeechGatedLoudnessFromSeries(mix, a.activity, config);
    m.speech_gated_lra = SpeechGatedLraFromSeries(mix, a.activity, config).lra;
  } else {
    m.speech_gated_loudness = Measurement::Missing(no_activity);
    m.speech_gated_lra = Measurement::Missing(no_activity);
  }

  if (!have_stems) {
    m.speech_loudness = Measurement::Missing(Status::kUnavailable);
    m.speech_lra = Measurement::Missing(Status::kUnavailable);
    m.ldr = Measurement::Missing(Status::kUnavailable);
    m.sbld_integrated = Measurement::Missing(Status::kUnavailable);
    m.critical_percentage = Measurement::Missing(Status::kUnavailable);
    a.critical.percentage = m.critical_percentage;
    a.critical.mask.assign(a.grid.size, false);
    return a;
  }

  const EnergySeries& speech = *energies.speech;
  const EnergySeries& background = *energies.background;
  m.speech_loudness = SpeechLoudnessFromSeries(speech, config);
  m.speech_lra = LraFromSeries(speech, config).lra;
  m.ldr = Ldr(m.program_loudness, m.speech_loudness);
  if (a.grid.size > 0) {
    m.sbld_integrated =
        SbldIntegratedFromSeries(speech, background, a.activity, config);
    a.micro = MicroTimelinesFromSeries(speech, background, m.speech_loudness,
                                       a.activity, config);
    a.critical = FindCriticalPassages(*a.micro, a.activity,
                                      config.speech.sld_threshold_lu,
                                      config.speech.sbld_threshold_lu);
    m.critical_percentage = a.critical.percentage;
  } else {
    m.sbld_integrated = Measurement::Missing(Status::kTooShort);
    m.critical_percentage = Measurement::Missing(Status::kTooShort);
    a.critical.percentage = m.critical_percentage;
  }
  return a;
}

Analysis AnalyzeStems(const StemSet& stems, const ActivitySidecar* sidecar,
                      const AnalysisConfig& config, Diagnostics* diag) {
  StemSet full;
  if (stems.present_count() >= 2) {
    full = CompleteStems(stems, 1e-3, diag);
  } else if (stems.mix) {
    full.mix = stems.mix;
  } else {
    throw Error(ErrorCode::kUsage, "no mix and fewer than two stems");
  }
  const AudioBuffer& mix = *full.mix;
  const bool with_stems = full.speech.has_value();
  ProgramAnalyzer analyzer(mix.sample_rate(), mix.layout(), config,
                           with_stems);
  analyzer.Process(mix, with_stems ? &*full.speech : nullptr,
                   with_stems ? &*full.background : nullptr);
  if (sidecar != nullptr) {
    const ActivitySidecar clipped =
        ClipToDuration(*sidecar, mix.duration_s(), diag);
    return Analyze(analyzer.Finish(), &clipped, config);
  }
  return Analyze(analyzer.Finish(), nullptr, config);
}

}  // namespace speechqc
