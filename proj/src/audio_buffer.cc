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

#include "speechqc/audio_buffer.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "speechqc/error.h"

namespace speechqc {

std::string_view ChannelRoleName(ChannelRole role) {
  switch (role) {
    case ChannelRole::kMono:
      return "M";
    case ChannelRole::kLeft:
      return "L";
    case ChannelRole::kRight:
      return "R";
    case ChannelRole::kCenter:
      return "C";
    case ChannelRole::kLfe:
      return "LFE";
    case ChannelRole::kLeftSurround:
      return "Ls";
    case ChannelRole::kRightSurround:
      return "Rs";
  }
  return "?";
}

double ChannelWeight(ChannelRole role) {
  switch (role) {
    case ChannelRole::kLfe:
      return 0.0;
    case ChannelRole::kLeftSurround:
    case ChannelRole::kRightSurround:
      return 1.41;
    default:
      return 1.0;
  }
}

std::vector<ChannelRole> DefaultLayout(std::size_t num_channels) {
  switch (num_channels) {
    case 1:
      return {ChannelRole::kMono};
    case 2:
      return {ChannelRole::kLeft, ChannelRole::kRight};
    case 6:
      return {ChannelRole::kLeft,         ChannelRole::kRight,
              ChannelRole::kCenter,       ChannelRole::kLfe,
              ChannelRole::kLeftSurround, ChannelRole::kRightSurround};
    default:
      throw Error(ErrorCode::kUnsupportedFormat,
                  "unsupported format: channel count " +
                      std::to_string(num_channels) +
                      " has no default layout (expected 1, 2 or 6)");
  }
}

std::vector<double> ChannelWeights(const std::vector<ChannelRole>& layout) {
  std::vector<double> weights;
  weights.reserve(layout.size());
  for (ChannelRole role : layout) weights.push_back(ChannelWeight(role));
  return weights;
}

AudioBuffer::AudioBuffer(int sample_rate, std::vector<ChannelRole> layout,
                         std::size_t num_frames)
    : sample_rate_(sample_rate),
      layout_(std::move(layout)),
      channels_(layout_.size(), std::vector<float>(num_frames, 0.0f)) {
  if (sample_rate_ <= 0) {
    throw Error(ErrorCode::kValidation, "sample rate must be positive");
  }
  if (layout_.empty()) {
    throw Error(ErrorCode::kValidation, "audio needs at least one channel");
  }
}

AudioBuffer::AudioBuffer(int sample_rate, std::vector<ChannelRole> layout,
                         std::vector<std::vector<float>> channels)
    : sample_rate_(sample_rate),
      layout_(std::move(layout)),
      channels_(std::move(channels)) {
  if (sample_rate_ <= 0) {
    throw Error(ErrorCode::kValidation, "sample rate must be positive");
  }
  if (channels_.empty() || channels_.size() != layout_.size()) {
    throw Error(ErrorCode::kValidation,
                "channel count does not match layout");
  }
  for (const auto& ch : channels_) {
    if (ch.size() != channels_.front().size()) {
      throw Error(ErrorCode::kValidation, "channels differ in length");
    }
  }
}

AudioBuffer AudioBuffer::Slice(std::size_t first, std::size_t count) const {
  first = std::min(first, num_frames());
  count = std::min(count, num_frames() - first);
  std::vector<std::vector<float>> out;
  out.reserve(channels_.size());
  for (const auto& ch : channels_) {
    out.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(first),
                     ch.begin() + static_cast<std::ptrdiff_t>(first + count));
  }
  return AudioBuffer(sample_rate_, layout_, std::move(out));
}

void AudioBuffer::Resize(std::size_t num_frames) {
  for (auto& ch : channels_) ch.resize(num_frames, 0.0f);
}

bool AudioBuffer::SameShape(const AudioBuffer& other) const {
  return sample_rate_ == other.sample_rate_ && layout_ == other.layout_ &&
         num_frames() == other.num_frames();
}

double DbToGain(double db) { return std::pow(10.0, db / 20.0); }

double GainToDb(double gain) { return 20.0 * std::log10(gain); }

AudioBuffer ApplyGainDb(const AudioBuffer& buffer, double gain_db) {
  const double gain = DbToGain(gain_db);
  AudioBuffer out = buffer;
  for (std::size_t c = 0; c < out.num_channels(); ++c) {
    for (float& x : out.mutable_channel(c)) {
      x = static_cast<float>(x * gain);
    }
  }
  return out;
}

namespace {

template <typename Op>
AudioBuffer Combine(const AudioBuffer& a, const AudioBuffer& b, Op op,
                    const char* what) {
  if (!a.SameShape(b)) {
    throw Error(ErrorCode::kAlignment,
                std::string(what) +
                    ": buffers differ in sample rate, layout or length (" +
                    std::to_string(a.num_frames()) + " vs " +
                    std::to_string(b.num_frames()) + " frames)");
  }
  AudioBuffer out = a;
  for (std::size_t c = 0; c < out.num_channels(); ++c) {
    auto dst = out.mutable_channel(c);
    auto src = b.channel(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = op(dst[i], src[i]);
  }
  return out;
}

}  // namespace

AudioBuffer Add(const AudioBuffer& a, const AudioBuffer& b) {
  return Combine(a, b, [](float x, float y) { return x + y; }, "add");
}

AudioBuffer Subtract(const AudioBuffer& a, const AudioBuffer& b) {
  return Combine(a, b, [](float x, float y) { return x - y; }, "subtract");
}

AudioBuffer Upmix(const AudioBuffer& mono, std::vector<ChannelRole> layout) {
  if (mono.num_channels() != 1) {
    throw Error(ErrorCode::kValidation, "upmix expects a mono buffer");
  }
  std::vector<std::vector<float>> channels(
      layout.size(),
      std::vector<float>(mono.channel(0).begin(), mono.channel(0).end()));
  return AudioBuffer(mono.sample_rate(), std::move(layout),
                     std::move(channels));
}

float MaxAbsSample(const AudioBuffer& buffer) {
  float peak = 0.0f;
  for (std::size_t c = 0; c < buffer.num_channels(); ++c) {
    for (float x : buffer.channel(c)) peak = std::max(peak, std::fabs(x));
  }
  return peak;
}

}  // namespace speechqc
