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

#include "speechqc/meter.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "speechqc/error.h"

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

namespace speechqc {

namespace {

// Flushes denormals while filtering; decaying IIR state otherwise drops into
// the denormal range during silence.
class ScopedFlushDenormals {
 public:
  ScopedFlushDenormals() {
#if defined(__SSE2__)
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040);  // FTZ | DAZ
#endif
  }
  ~ScopedFlushDenormals() {
#if defined(__SSE2__)
    _mm_setcsr(saved_);
#endif
  }
  ScopedFlushDenormals(const ScopedFlushDenormals&) = delete;
  ScopedFlushDenormals& operator=(const ScopedFlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

std::size_t RoundFrames(int sample_rate, double seconds) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

}  // namespace

double EnergyToLoudness(double mean_square) {
  if (!(mean_square > 0.0)) return kSilence;
  return kLoudnessOffset + 10.0 * std::log10(mean_square);
}

double LoudnessToEnergy(double lufs) {
  if (std::isinf(lufs) && lufs < 0) return 0.0;
  return std::pow(10.0, (lufs - kLoudnessOffset) / 10.0);
}

void MeterConfig::Validate() const {
  auto check = [](bool ok, const char* message) {
    if (!ok) throw Error(ErrorCode::kValidation, message);
  };
  check(momentary_window_s > 0 && short_term_window_s > 0,
        "meter windows must be positive");
  check(momentary_hop_s > 0 && short_term_hop_s > 0,
        "meter hops must be positive");
  check(momentary_hop_s <= momentary_window_s &&
            short_term_hop_s <= short_term_window_s,
        "meter hop must not exceed its window");
  check(absolute_gate_lufs < 0, "absolute gate must be negative");
}

std::vector<double> MeterConfig::WeightsFor(
    const std::vector<ChannelRole>& layout) const {
  if (channel_weights.empty()) return ChannelWeights(layout);
  if (channel_weights.size() != layout.size()) {
    throw Error(ErrorCode::kValidation,
                "channel weight count does not match channel count");
  }
  return channel_weights;
}

std::string_view SignalRoleName(SignalRole role) {
  switch (role) {
    case SignalRole::kMix:
      return "mix";
    case SignalRole::kSpeech:
      return "speech";
    case SignalRole::kBackground:
      return "background";
  }
  return "unknown";
}

double LoudnessTimeline::Max() const {
  double best = kSilence;
  for (double v : values) best = std::max(best, v);
  return best;
}

std::size_t EnergySeries::Frames(double seconds) const {
  const std::size_t frames = RoundFrames(sample_rate_, seconds);
  if (quantum_frames_ == 0 || frames % quantum_frames_ != 0) {
    throw Error(ErrorCode::kValidation,
                "duration " + std::to_string(seconds) +
                    " s is not a multiple of the metering quantum");
  }
  return frames;
}

double EnergySeries::WindowMeanSquare(std::size_t start_frame,
                                      std::size_t window_frames) const {
  const std::size_t first = start_frame / quantum_frames_;
  const std::size_t count = window_frames / quantum_frames_;
  double sum = 0.0;
  for (std::size_t q = first; q < first + count; ++q) sum += sums_[q];
  return sum / static_cast<double>(window_frames);
}

std::size_t EnergySeries::CountBlocks(std::size_t start_frame,
                                      std::size_t window_frames,
                                      std::size_t hop_frames) const {
  const std::size_t available = sums_.size() * quantum_frames_;
  if (available < start_frame + window_frames) return 0;
  return (available - start_frame - window_frames) / hop_frames + 1;
}

std::size_t QuantumFrames(int sample_rate, std::span<const double> durations_s) {
  std::size_t quantum = 0;
  for (double d : durations_s) {
    const std::size_t frames = RoundFrames(sample_rate, d);
    if (frames == 0) {
      throw Error(ErrorCode::kValidation,
                  "duration " + std::to_string(d) +
                      " s is shorter than one sample");
    }
    quantum = std::gcd(quantum, frames);
  }
  return quantum;
}

std::size_t QuantumFrames(int sample_rate,
                          std::initializer_list<double> durations_s) {
  return QuantumFrames(sample_rate,
                       std::span<const double>(durations_s.begin(),
                                               durations_s.size()));
}

LoudnessMeter::LoudnessMeter(int sample_rate,
                             std::vector<double> channel_weights,
                             std::size_t quantum_frames, bool measure_peaks)
    : weights_(std::move(channel_weights)),
      partial_(weights_.size(), 0.0),
      series_(sample_rate, quantum_frames),
      measure_peaks_(measure_peaks) {
  if (quantum_frames == 0) {
    throw Error(ErrorCode::kValidation, "metering quantum must be positive");
  }
  const KWeightingCoefficients coeffs = KWeightingFor(sample_rate);
  filters_.assign(weights_.size(), KWeightingFilter(coeffs));
  if (measure_peaks_) {
    true_peak_.assign(weights_.size(),
                      TruePeakDetector(TruePeakOversampling(sample_rate)));
  }
}

void LoudnessMeter::Process(const AudioBuffer& chunk, std::size_t first,
                            std::size_t count) {
  if (chunk.num_channels() != weights_.size()) {
    throw Error(ErrorCode::kAlignment,
                "chunk channel count does not match the meter");
  }
  if (first + count > chunk.num_frames()) {
    throw Error(ErrorCode::kValidation, "chunk range out of bounds");
  }
  ScopedFlushDenormals flush;
  const std::size_t quantum = series_.quantum_frames();
  std::size_t pos = first;
  const std::size_t end = first + count;
  while (pos < end) {
    const std::size_t take = std::min(end - pos, quantum - fill_);
    for (std::size_t c = 0; c < weights_.size(); ++c) {
      const float* x = chunk.channel(c).data() + pos;
      KWeightingFilter& filter = filters_[c];
      double acc = partial_[c];
      for (std::size_t i = 0; i < take; ++i) {
        const double y = filter.Process(x[i]);
        acc += y * y;
      }
      partial_[c] = acc;
      if (measure_peaks_) {
        TruePeakDetector& tp = true_peak_[c];
        for (std::size_t i = 0; i < take; ++i) {
          sample_peak_ = std::max(sample_peak_,
                                  static_cast<double>(std::fabs(x[i])));
          tp.Process(x[i]);
        }
      }
    }
    fill_ += take;
    pos += take;
    if (fill_ == quantum) {
      double weighted = 0.0;
      for (std::size_t c = 0; c < weights_.size(); ++c) {
        weighted += weights_[c] * partial_[c];
        partial_[c] = 0.0;
      }
      series_.Append(weighted);
      fill_ = 0;
    }
  }
  series_.set_total_frames(series_.total_frames() + count);
}

PeakReport LoudnessMeter::peaks() const {
  PeakReport report;
  report.sample_peak_dbfs =
      sample_peak_ > 0 ? GainToDb(sample_peak_) : kSilence;
  double tp = sample_peak_;
  for (const TruePeakDetector& d : true_peak_) tp = std::max(tp, d.Peak());
  report.true_peak_dbtp = tp > 0 ? GainToDb(tp) : kSilence;
  return report;
}

LoudnessTimeline BlockTimeline(const EnergySeries& series, double window_s,
                               double hop_s, double start_s,
                               SignalRole role) {
  const std::size_t window = series.Frames(window_s);
  const std::size_t hop = series.Frames(hop_s);
  const std::size_t start = series.Frames(start_s);
  LoudnessTimeline timeline;
  timeline.window_s = window_s;
  timeline.hop_s = hop_s;
  timeline.role = role;
  const std::size_t n = series.CountBlocks(start, window, hop);
  timeline.times.reserve(n);
  timeline.values.reserve(n);
  const double rate = series.sample_rate();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t block_start = start + k * hop;
    timeline.times.push_back(
        (static_cast<double>(block_start) + window / 2.0) / rate);
    timeline.values.push_back(
        EnergyToLoudness(series.WindowMeanSquare(block_start, window)));
  }
  return timeline;
}

GatingBlocks GatingBlocksOf(const EnergySeries& series,
                            const MeterConfig& config) {
  const std::size_t window = series.Frames(config.momentary_window_s);
  const std::size_t hop = series.Frames(config.momentary_hop_s);
  const std::size_t n = series.CountBlocks(0, window, hop);
  GatingBlocks blocks;
  blocks.mean_squares.reserve(n);
  blocks.centers_s.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    blocks.mean_squares.push_back(series.WindowMeanSquare(k * hop, window));
    blocks.centers_s.push_back(
        (static_cast<double>(k * hop) + window / 2.0) / series.sample_rate());
  }
  return blocks;
}

Measurement GatedLoudness(std::span<const double> mean_squares,
                          double absolute_gate_lufs,
                          std::optional<double> relative_gate_lu,
                          const std::vector<bool>* include) {
  const double absolute_energy = LoudnessToEnergy(absolute_gate_lufs);
  double sum = 0.0;
  std::size_t count = 0;
  auto selected = [&](std::size_t i) {
    return include == nullptr || (*include)[i];
  };
  for (std::size_t i = 0; i < mean_squares.size(); ++i) {
    if (selected(i) && mean_squares[i] > absolute_energy) {
      sum += mean_squares[i];
      ++count;
    }
  }
  if (count == 0) return Measurement::Missing(Status::kBelowGate);
  if (!relative_gate_lu) {
    return Measurement::Ok(EnergyToLoudness(sum / static_cast<double>(count)));
  }

  const double relative_lufs =
      EnergyToLoudness(sum / static_cast<double>(count)) + *relative_gate_lu;
  const double threshold =
      std::max(absolute_energy, LoudnessToEnergy(relative_lufs));
  double gated_sum = 0.0;
  std::size_t gated_count = 0;
  for (std::size_t i = 0; i < mean_squares.size(); ++i) {
    if (selected(i) && mean_squares[i] > threshold) {
      gated_sum += mean_squares[i];
      ++gated_count;
    }
  }
  if (gated_count == 0) return Measurement::Missing(Status::kBelowGate);
  return Measurement::Ok(
      EnergyToLoudness(gated_sum / static_cast<double>(gated_count)));
}

Measurement IntegratedFromSeries(const EnergySeries& series,
                                 const MeterConfig& config) {
  const GatingBlocks blocks = GatingBlocksOf(series, config);
  if (blocks.mean_squares.empty()) {
    return Measurement::Missing(Status::kTooShort);
  }
  return GatedLoudness(blocks.mean_squares, config.absolute_gate_lufs,
                       config.relative_gate_lu);
}

namespace {

EnergySeries Meter(const AudioBuffer& buffer,
                   std::span<const double> weights,
                   std::initializer_list<double> durations) {
  LoudnessMeter meter(buffer.sample_rate(),
                      std::vector<double>(weights.begin(), weights.end()),
                      QuantumFrames(buffer.sample_rate(), durations));
  meter.Process(buffer);
  return meter.TakeEnergies();
}

void RequireDuration(const AudioBuffer& buffer, double window_s) {
  if (buffer.num_frames() <
      static_cast<std::size_t>(std::llround(window_s * buffer.sample_rate()))) {
    throw Error(ErrorCode::kProgramTooShort,
                "program too short: " + std::to_string(buffer.duration_s()) +
                    " s is less than the " + std::to_string(window_s) +
                    " s window");
  }
}

}  // namespace

LoudnessTimeline BlockLoudness(const AudioBuffer& buffer, double window_s,
                               double hop_s,
                               std::span<const double> channel_weights) {
  if (!(window_s > 0) || !(hop_s > 0) || hop_s > window_s) {
    throw Error(ErrorCode::kValidation,
                "block window and hop must be positive with hop <= window");
  }
  RequireDuration(buffer, window_s);
  if (channel_weights.size() != buffer.num_channels()) {
    throw Error(ErrorCode::kValidation,
                "channel weight count does not match channel count");
  }
  const EnergySeries series =
      Meter(buffer, channel_weights, {window_s, hop_s});
  return BlockTimeline(series, window_s, hop_s);
}

Measurement IntegratedLoudness(const AudioBuffer& buffer,
                               const MeterConfig& config) {
  config.Validate();
  RequireDuration(buffer, config.momentary_window_s);
  const std::vector<double> weights = config.WeightsFor(buffer.layout());
  const EnergySeries series = Meter(
      buffer, weights, {config.momentary_window_s, config.momentary_hop_s});
  return IntegratedFromSeries(series, config);
}

LoudnessTimeline Momentary(const AudioBuffer& buffer,
                           const MeterConfig& config) {
  config.Validate();
  LoudnessTimeline t = BlockLoudness(buffer, config.momentary_window_s,
                                     config.momentary_hop_s,
                                     config.WeightsFor(buffer.layout()));
  return t;
}

LoudnessTimeline ShortTerm(const AudioBuffer& buffer,
                           const MeterConfig& config) {
  config.Validate();
  return BlockLoudness(buffer, config.short_term_window_s,
                       config.short_term_hop_s,
                       config.WeightsFor(buffer.layout()));
}

PeakReport Peaks(const AudioBuffer& buffer) {
  if (buffer.empty()) {
    throw Error(ErrorCode::kValidation, "peaks of an empty buffer");
  }
  LoudnessMeter meter(buffer.sample_rate(),
                      std::vector<double>(buffer.num_channels(), 1.0),
                      buffer.num_frames(), /*measure_peaks=*/true);
  meter.Process(buffer);
  return meter.peaks();
}

}  // namespace speechqc
