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

#ifndef SPEECHQC_WAV_H_
#define SPEECHQC_WAV_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "speechqc/audio_buffer.h"
#include "speechqc/diagnostics.h"

namespace speechqc {

enum class SampleFormat { kPcm16, kPcm24, kPcm32, kFloat32, kFloat64 };

struct WavInfo {
  SampleFormat format = SampleFormat::kPcm16;
  int sample_rate = 0;
  int num_channels = 0;
  std::uint32_t channel_mask = 0;  // 0 when the file carries none
  std::uint64_t num_frames = 0;
};

// Decodes a RIFF/WAVE byte stream: PCM 16/24/32-bit integer, IEEE float
// 32/64-bit, plain or WAVE_FORMAT_EXTENSIBLE. Integer samples are scaled by
// 2^-(bits-1). The layout comes from the channel mask when present and from
// the channel count otherwise.
//
// Throws Error(kUnsupportedFormat) naming the offending header field, and
// ParseError with a byte offset for malformed or truncated input.
AudioBuffer DecodeWav(std::span<const std::byte> bytes,
                      WavInfo* info = nullptr);

AudioBuffer ReadWav(const std::filesystem::path& path,
                    WavInfo* info = nullptr);

std::vector<std::byte> EncodeWav(const AudioBuffer& buffer,
                                 SampleFormat format);

// Writes via a temporary file and rename.
void WriteWav(const std::filesystem::path& path, const AudioBuffer& buffer,
              SampleFormat format);

// ReadWav followed by resampling to `target_rate` when the rates differ.
// Resampling is reported through `diag`.
AudioBuffer LoadAudio(const std::filesystem::path& path, int target_rate,
                      Diagnostics* diag = nullptr, bool* resampled = nullptr);

// Incremental reader for files too long to hold in memory.
class WavReader {
 public:
  // Parses the header; throws like ReadWav.
  explicit WavReader(const std::filesystem::path& path);

  const WavInfo& info() const { return info_; }
  const std::vector<ChannelRole>& layout() const { return layout_; }
  std::uint64_t frames_remaining() const { return info_.num_frames - read_; }

  // Next `max_frames` frames or fewer; empty at the end of the data.
  AudioBuffer Read(std::size_t max_frames);

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  WavInfo info_;
  std::vector<ChannelRole> layout_;
  std::size_t block_align_ = 0;
  std::uint64_t read_ = 0;
  std::vector<std::byte> scratch_;
};

}  // namespace speechqc

#endif  // SPEECHQC_WAV_H_
