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

#ifndef SPEECHQC_AUDIO_BUFFER_H_
#define SPEECHQC_AUDIO_BUFFER_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace speechqc {

enum class ChannelRole {
  kMono,
  kLeft,
  kRight,
  kCenter,
  kLfe,
  kLeftSurround,
  kRightSurround,
};

std::string_view ChannelRoleName(ChannelRole role);

// Loudness weight of a channel: 1.0 for front channels, 1.41 for surrounds,
// 0 for LFE.
double ChannelWeight(ChannelRole role);

// Layout implied by a bare channel count: 1 = mono, 2 = L R,
// 6 = L R C LFE Ls Rs. Throws kUnsupportedFormat for anything else.
std::vector<ChannelRole> DefaultLayout(std::size_t num_channels);

std::vector<double> ChannelWeights(const std::vector<ChannelRole>& layout);

// Planar multichannel audio. Samples are linear amplitude with nominal range
// [-1, 1]; all channels have the same number of frames.
class AudioBuffer {
 public:
  AudioBuffer() = default;

  // Zero-filled buffer.
  AudioBuffer(int sample_rate, std::vector<ChannelRole> layout,
              std::size_t num_frames);

  // Takes ownership of per-channel sample vectors. Throws kValidation if the
  // channel count does not match the layout or lengths differ.
  AudioBuffer(int sample_rate, std::vector<ChannelRole> layout,
              std::vector<std::vector<float>> channels);

  int sample_rate() const { return sample_rate_; }
  std::size_t num_channels() const { return channels_.size(); }
  std::size_t num_frames() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  double duration_s() const {
    return sample_rate_ > 0 ? static_cast<double>(num_frames()) / sample_rate_
                            : 0.0;
  }
  bool empty() const { return num_frames() == 0; }

  const std::vector<ChannelRole>& layout() const { return layout_; }

  std::span<const float> channel(std::size_t index) const {
    return channels_[index];
  }
  std::span<float> mutable_channel(std::size_t index) {
    return channels_[index];
  }

  // Copy of frames [first, first + count).
  AudioBuffer Slice(std::size_t first, std::size_t count) const;

  // Zero-pads or truncates to exactly num_frames.
  void Resize(std::size_t num_frames);

  bool SameShape(const AudioBuffer& other) const;

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  int sample_rate_ = 0;
  std::vector<ChannelRole> layout_;
  std::vector<std::vector<float>> channels_;
};

double DbToGain(double db);
double GainToDb(double gain);

AudioBuffer ApplyGainDb(const AudioBuffer& buffer, double gain_db);

// Sample-wise a + b and a - b. Throws kAlignment on shape mismatch.
AudioBuffer Add(const AudioBuffer& a, const AudioBuffer& b);
AudioBuffer Subtract(const AudioBuffer& a, const AudioBuffer& b);

// Copies a mono buffer into every channel of `layout`.
AudioBuffer Upmix(const AudioBuffer& mono, std::vector<ChannelRole> layout);

float MaxAbsSample(const AudioBuffer& buffer);

}  // namespace speechqc

#endif  // SPEECHQC_AUDIO_BUFFER_H_
