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

#ifndef SPEECHQC_SYNTH_H_
#define SPEECHQC_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "speechqc/activity.h"
#include "speechqc/audio_buffer.h"

namespace speechqc {

// Seeded generator with a fixed uniform conversion, so sequences do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

 private:
  std::mt19937_64 engine_;
};

// Second-order section, transposed direct form II.
class Biquad {
 public:
  static Biquad Lowpass(double cutoff_hz, int sample_rate, double q = 0.7071);
  static Biquad Highpass(double cutoff_hz, int sample_rate, double q = 0.7071);

  double Process(double x) {
    const double y = b0_ * x + z1_;
    z1_ = b1_ * x - a1_ * y + z2_;
    z2_ = b2_ * x - a2_ * y;
    return y;
  }

 private:
  double b0_ = 1, b1_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double z1_ = 0, z2_ = 0;
};

struct SpeechSynthOptions {
  int sample_rate = 48000;
  double min_talk_s = 1.5;
  double max_talk_s = 5.0;
  double min_pause_s = 0.4;
  double max_pause_s = 1.5;
  double min_syllable_s = 0.12;
  double max_syllable_s = 0.3;
  double gain = 0.25;
};

// Speech-shaped noise: band-limited noise under a syllabic envelope,
// alternating talk spurts and exact-zero pauses. Streams in chunks; the
// talk schedule is the activity ground truth.
class SpeechLikeGenerator {
 public:
  SpeechLikeGenerator(std::uint64_t seed, SpeechSynthOptions options = {});

  void Generate(std::span<float> out);
  // Talk spurts planned so far; the last may extend past the generated
  // frames.
  const std::vector<Interval>& talk_segments() const { return talk_; }
  std::size_t frames_generated() const { return frame_; }

 private:
  void PlanUntil(std::size_t frame);
  double Envelope(std::size_t frame);

  SpeechSynthOptions options_;
  // Separate streams keep the output independent of chunk sizes.
  Rng schedule_rng_;
  Rng syllable_rng_;
  Rng noise_rng_;
  Biquad highpass_;
  Biquad lowpass_;
  std::size_t frame_ = 0;
  std::vector<Interval> talk_;
  std::size_t talk_index_ = 0;
  double planned_until_s_ = 0.0;
  // Current syllable, in frames.
  std::size_t syllable_start_ = 0;
  std::size_t syllable_end_ = 0;
  double syllable_amp_ = 0.0;
};

struct BackgroundSynthOptions {
  int sample_rate = 48000;
  std::size_t num_channels = 2;
  double lowpass_hz = 2000.0;
  double highpass_hz = 50.0;
  double drift_db = 3.0;
  double min_drift_period_s = 8.0;
  double max_drift_period_s = 20.0;
  double gain = 0.2;
};

// Stationary-ish noise bed with independent channels and a slow common
// level drift.
class BackgroundGenerator {
 public:
  BackgroundGenerator(std::uint64_t seed, BackgroundSynthOptions options = {});

  // `out` holds one span per channel, all the same length.
  void Generate(std::span<const std::span<float>> out);

 private:
  BackgroundSynthOptions options_;
  std::vector<Rng> rngs_;
  std::vector<Biquad> lowpass_;
  std::vector<Biquad> highpass_;
  double drift_period_s_;
  double drift_phase_;
  std::size_t frame_ = 0;
};

struct SyntheticPair {
  AudioBuffer speech;
  AudioBuffer background;
  ActivitySidecar activity;  // oracle
};

// Speech is dual-mono over the layout; the background is independent noise
// per channel. Deterministic in `seed`.
SyntheticPair SynthesizePair(double duration_s, std::uint64_t seed,
                             int sample_rate = 48000,
                             std::size_t num_channels = 2);

}  // namespace speechqc

#endif  // SPEECHQC_SYNTH_H_
