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

#ifndef SPEECHQC_METER_H_
#define SPEECHQC_METER_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "speechqc/audio_buffer.h"
#include "speechqc/k_weighting.h"
#include "speechqc/measurement.h"
#include "speechqc/true_peak.h"

namespace speechqc {

inline constexpr double kLoudnessOffset = -0.691;

// Loudness of a silent block. Serialized as null, never as -inf.
inline constexpr double kSilence = -std::numeric_limits<double>::infinity();

// -0.691 + 10 log10(mean_square); kSilence for zero energy.
double EnergyToLoudness(double mean_square);
double LoudnessToEnergy(double lufs);

struct MeterConfig {
  double momentary_window_s = 0.4;
  double momentary_hop_s = 0.1;
  double short_term_window_s = 3.0;
  double short_term_hop_s = 0.1;
  double absolute_gate_lufs = -70.0;
  double relative_gate_lu = -10.0;
  // Per-channel gains; empty means derive from the channel layout.
  std::vector<double> channel_weights;

  // Throws kValidation on non-positive windows, hop > window or a
  // non-negative absolute gate.
  void Validate() const;

  std::vector<double> WeightsFor(const std::vector<ChannelRole>& layout) const;
};

enum class SignalRole { kMix, kSpeech, kBackground };

std::string_view SignalRoleName(SignalRole role);

// Loudness per block, timestamped at block centers.
struct LoudnessTimeline {
  std::vector<double> times;
  std::vector<double> values;  // LUFS; kSilence for silent blocks
  double window_s = 0.0;
  double hop_s = 0.0;
  SignalRole role = SignalRole::kMix;

  std::size_t size() const { return values.size(); }
  // Largest value, or kSilence if every block is silent or the timeline is
  // empty.
  double Max() const;
};

struct PeakReport {
  double sample_peak_dbfs = kSilence;
  double true_peak_dbtp = kSilence;
};

// Channel-weighted sums of squared K-weighted samples, one per fixed-size
// quantum of frames. Every window and hop used downstream is a whole number
// of quanta, so all block loudness values derive exactly from this series.
class EnergySeries {
 public:
  EnergySeries() = default;
  EnergySeries(int sample_rate, std::size_t quantum_frames)
      : sample_rate_(sample_rate), quantum_frames_(quantum_frames) {}

  int sample_rate() const { return sample_rate_; }
  std::size_t quantum_frames() const { return quantum_frames_; }
  // Frames processed, including a trailing partial quantum.
  std::size_t total_frames() const { return total_frames_; }
  double duration_s() const {
    return sample_rate_ > 0 ? static_cast<double>(total_frames_) / sample_rate_
                            : 0.0;
  }
  const std::vector<double>& sums() const { return sums_; }

  // Converts seconds to frames and checks that the result is a whole number
  // of quanta.
  std::size_t Frames(double seconds) const;

  // Mean over [start, start + window) frames of the channel-weighted square.
  double WindowMeanSquare(std::size_t start_frame,
                          std::size_t window_frames) const;

  // Number of windows [start + k hop, start + k hop + window) lying within
  // the completed quanta.
  std::size_t CountBlocks(std::size_t start_frame, std::size_t window_frames,
                          std::size_t hop_frames) const;

  void Append(double sum) { sums_.push_back(sum); }
  void set_total_frames(std::size_t frames) { total_frames_ = frames; }

 private:
  int sample_rate_ = 0;
  std::size_t quantum_frames_ = 0;
  std::size_t total_frames_ = 0;
  std::vector<double> sums_;
};

// Largest frame count dividing every duration (each rounded to frames).
std::size_t QuantumFrames(int sample_rate, std::initializer_list<double>
                                               durations_s);
std::size_t QuantumFrames(int sample_rate, std::span<const double> durations_s);

// Streaming K-weighted energy meter. Feeding a signal in any chunking gives
// bit-identical results. Single owner; movable between threads.
class LoudnessMeter {
 public:
  LoudnessMeter(int sample_rate, std::vector<double> channel_weights,
                std::size_t quantum_frames, bool measure_peaks = false);

  // Frames [first, first + count) of `chunk`, whose channel count must match
  // the weights.
  void Process(const AudioBuffer& chunk, std::size_t first,
               std::size_t count);
  void Process(const AudioBuffer& chunk) {
    Process(chunk, 0, chunk.num_frames());
  }

  const EnergySeries& energies() const { return series_; }
  EnergySeries TakeEnergies() { return std::move(series_); }
  PeakReport peaks() const;

 private:
  std::vector<double> weights_;
  std::vector<KWeightingFilter> filters_;
  std::vector<double> partial_;
  std::size_t fill_ = 0;
  EnergySeries series_;
  bool measure_peaks_;
  std::vector<TruePeakDetector> true_peak_;
  double sample_peak_ = 0.0;
};

// Blocks of `window_s` every `hop_s`, the first starting at `start_s`.
LoudnessTimeline BlockTimeline(const EnergySeries& series, double window_s,
                               double hop_s, double start_s = 0.0,
                               SignalRole role = SignalRole::kMix);

// Mean squares of the 400 ms gating blocks (momentary window and hop) and
// their center times.
struct GatingBlocks {
  std::vector<double> mean_squares;
  std::vector<double> centers_s;
};
GatingBlocks GatingBlocksOf(const EnergySeries& series,
                            const MeterConfig& config);

// Two-stage gated energy mean. Blocks at or below the absolute gate are
// dropped; then blocks at or below (loudness of survivors + relative gate).
// `relative_gate_lu` = nullopt skips the second stage. `include` (optional)
// pre-selects blocks. Returns kBelowGate when nothing survives.
Measurement GatedLoudness(std::span<const double> mean_squares,
                          double absolute_gate_lufs,
                          std::optional<double> relative_gate_lu,
                          const std::vector<bool>* include = nullptr);

// Integrated loudness of a metered signal with standard gating.
Measurement IntegratedFromSeries(const EnergySeries& series,
                                 const MeterConfig& config);

// Buffer-level operations.

// Throws kProgramTooShort when the buffer is shorter than `window_s`.
LoudnessTimeline BlockLoudness(const AudioBuffer& buffer, double window_s,
                               double hop_s,
                               std::span<const double> channel_weights);

// Throws kProgramTooShort below one momentary window.
Measurement IntegratedLoudness(const AudioBuffer& buffer,
                               const MeterConfig& config = {});

LoudnessTimeline Momentary(const AudioBuffer& buffer,
                           const MeterConfig& config = {});
LoudnessTimeline ShortTerm(const AudioBuffer& buffer,
                           const MeterConfig& config = {});

PeakReport Peaks(const AudioBuffer& buffer);

}  // namespace speechqc

#endif  // SPEECHQC_METER_H_
