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

#include "speechqc/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "speechqc/error.h"

namespace speechqc {

namespace {

// Uniform noise with unit variance.
double Noise(Rng& rng) { return std::numbers::sqrt3 * (2.0 * rng.Uniform() - 1.0); }

}  // namespace

Biquad Biquad::Lowpass(double cutoff_hz, int sample_rate, double q) {
  const double w = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double alpha = std::sin(w) / (2.0 * q);
  const double c = std::cos(w);
  const double a0 = 1.0 + alpha;
  Biquad f;
  f.b0_ = (1.0 - c) / 2.0 / a0;
  f.b1_ = (1.0 - c) / a0;
  f.b2_ = f.b0_;
  f.a1_ = -2.0 * c / a0;
  f.a2_ = (1.0 - alpha) / a0;
  return f;
}

Biquad Biquad::Highpass(double cutoff_hz, int sample_rate, double q) {
  const double w = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double alpha = std::sin(w) / (2.0 * q);
  const double c = std::cos(w);
  const double a0 = 1.0 + alpha;
  Biquad f;
  f.b0_ = (1.0 + c) / 2.0 / a0;
  f.b1_ = -(1.0 + c) / a0;
  f.b2_ = f.b0_;
  f.a1_ = -2.0 * c / a0;
  f.a2_ = (1.0 - alpha) / a0;
  return f;
}

SpeechLikeGenerator::SpeechLikeGenerator(std::uint64_t seed,
                                         SpeechSynthOptions options)
    : options_(options),
      schedule_rng_(seed),
      syllable_rng_(schedule_rng_.Next()),
      noise_rng_(schedule_rng_.Next()),
      highpass_(Biquad::Highpass(150.0, options.sample_rate)),
      lowpass_(Biquad::Lowpass(3500.0, options.sample_rate)) {
  if (options_.sample_rate <= 0 || options_.min_talk_s <= 0 ||
      options_.max_talk_s < options_.min_talk_s ||
      options_.min_pause_s <= 0 ||
      options_.max_pause_s < options_.min_pause_s) {
    throw Error(ErrorCode::kValidation, "invalid speech synthesis options");
  }
  // Leading pause.
  planned_until_s_ = schedule_rng_.Uniform(options_.min_pause_s, options_.max_pause_s);
}

void SpeechLikeGenerator::PlanUntil(std::size_t frame) {
  const double t = static_cast<double>(frame) / options_.sample_rate;
  while (planned_until_s_ <= t) {
    // Spurts start and end on whole milliseconds so sidecars round-trip.
    const double start = std::round(planned_until_s_ * 1000.0) / 1000.0;
    const double talk =
        std::round(schedule_rng_.Uniform(options_.min_talk_s, options_.max_talk_s) *
                   1000.0) /
        1000.0;
    const double pause =
        schedule_rng_.Uniform(options_.min_pause_s, options_.max_pause_s);
    talk_.push_back({start, start + talk});
    planned_until_s_ = start + talk + pause;
  }
}

double SpeechLikeGenerator::Envelope(std::size_t frame) {
  const double t = static_cast<double>(frame) / options_.sample_rate;
  while (talk_index_ < talk_.size() && talk_[talk_index_].end_s <= t) {
    ++talk_index_;
  }
  if (talk_index_ >= talk_.size() || !talk_[talk_index_].Contains(t)) {
    return 0.0;
  }
  if (frame >= syllable_end_) {
    syllable_start_ = frame;
    syllable_end_ =
        frame + static_cast<std::size_t>(
                    syllable_rng_.Uniform(options_.min_syllable_s,
                                 options_.max_syllable_s) *
                    options_.sample_rate);
    syllable_amp_ = syllable_rng_.Uniform(0.5, 1.0);
  }
  const double phase = static_cast<double>(frame - syllable_start_) /
                       static_cast<double>(syllable_end_ - syllable_start_);
  return syllable_amp_ * (0.15 + 0.85 * std::sin(std::numbers::pi * phase));
}

void SpeechLikeGenerator::Generate(std::span<float> out) {
  PlanUntil(frame_ + out.size());
  for (float& sample : out) {
    const double env = Envelope(frame_);
    // The filters keep running through pauses so spurts start smoothly.
    const double shaped = lowpass_.Process(highpass_.Process(Noise(noise_rng_)));
    sample = static_cast<float>(options_.gain * env * shaped);
    ++frame_;
  }
}

BackgroundGenerator::BackgroundGenerator(std::uint64_t seed,
                                         BackgroundSynthOptions options)
    : options_(options) {
  if (options_.sample_rate <= 0 || options_.num_channels == 0) {
    throw Error(ErrorCode::kValidation,
                "invalid background synthesis options");
  }
  Rng setup(seed);
  drift_period_s_ =
      setup.Uniform(options_.min_drift_period_s, options_.max_drift_period_s);
  drift_phase_ = setup.Uniform(0.0, 2.0 * std::numbers::pi);
  for (std::size_t c = 0; c < options_.num_channels; ++c) {
    rngs_.emplace_back(setup.Next());
    lowpass_.push_back(Biquad::Lowpass(options_.lowpass_hz, options_.sample_rate));
    highpass_.push_back(
        Biquad::Highpass(options_.highpass_hz, options_.sample_rate));
  }
}

void BackgroundGenerator::Generate(std::span<const std::span<float>> out) {
  if (out.size() != options_.num_channels) {
    throw Error(ErrorCode::kValidation, "channel count mismatch");
  }
  const std::size_t n = out.empty() ? 0 : out[0].size();
  const double omega = 2.0 * std::numbers::pi / drift_period_s_;
  double drift = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    // The drift is slow; it is refreshed on a fixed 64-frame grid so the
    // output does not depend on chunking.
    if (i == 0 || (frame_ + i) % 64 == 0) {
      const double t = static_cast<double>((frame_ + i) / 64 * 64) /
                       options_.sample_rate;
      drift = std::pow(10.0, options_.drift_db *
                                 std::sin(omega * t + drift_phase_) / 20.0);
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
      const double x =
          lowpass_[c].Process(highpass_[c].Process(Noise(rngs_[c])));
      out[c][i] = static_cast<float>(options_.gain * drift * x);
    }
  }
  frame_ += n;
}

SyntheticPair SynthesizePair(double duration_s, std::uint64_t seed,
                             int sample_rate, std::size_t num_channels) {
  if (!(duration_s > 0)) {
    throw Error(ErrorCode::kValidation, "duration must be positive");
  }
  const auto frames =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  Rng seeds(seed);
  SpeechSynthOptions speech_options;
  speech_options.sample_rate = sample_rate;
  SpeechLikeGenerator speech_gen(seeds.Next(), speech_options);
  AudioBuffer mono(sample_rate, DefaultLayout(1), frames);
  speech_gen.Generate(mono.mutable_channel(0));

  BackgroundSynthOptions bg_options;
  bg_options.sample_rate = sample_rate;
  bg_options.num_channels = num_channels;
  BackgroundGenerator bg_gen(seeds.Next(), bg_options);
  const auto layout = DefaultLayout(num_channels);
  AudioBuffer background(sample_rate, layout, frames);
  std::vector<std::span<float>> spans;
  for (std::size_t c = 0; c < num_channels; ++c) {
    spans.push_back(background.mutable_channel(c));
  }
  bg_gen.Generate(spans);

  SyntheticPair pair;
  pair.speech = num_channels == 1 ? std::move(mono) : Upmix(mono, layout);
  pair.background = std::move(background);
  ActivitySidecar activity;
  activity.source = ActivitySource::kOracle;
  activity.intervals = speech_gen.talk_segments();
  pair.activity = ClipToDuration(activity, duration_s);
  return pair;
}

}  // namespace speechqc
