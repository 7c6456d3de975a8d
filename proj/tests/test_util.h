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

#ifndef SPEECHQC_TESTS_TEST_UTIL_H_
#define SPEECHQC_TESTS_TEST_UTIL_H_

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "speechqc/audio_buffer.h"

namespace speechqc::testing {

// Published 48 kHz K-weighting sections, {b0, b1, b2, a1, a2}.
inline constexpr double kShelf48k[5] = {1.53512485958697, -2.69169618940638,
                                        1.19839281085285, -1.69065929318241,
                                        0.73248077421585};
inline constexpr double kHighpass48k[5] = {1.0, -2.0, 1.0, -1.99004745483398,
                                           0.99007225036621};

// |H(e^jw)| in dB of one biquad, by direct complex evaluation.
double BiquadGainDb(const double (&c)[5], double freq_hz, double rate_hz);

// Peak amplitude `amp`, identical on every channel of `layout`.
AudioBuffer Sine(int rate, double freq_hz, double amp, double seconds,
                 std::vector<ChannelRole> layout = {ChannelRole::kLeft,
                                                    ChannelRole::kRight},
                 double phase = 0.0);

// Uniform white noise with independent channels.
AudioBuffer WhiteNoise(int rate, double amp, double seconds,
                       std::size_t channels, std::uint64_t seed);

// Concatenation along time.
AudioBuffer Concat(const std::vector<AudioBuffer>& parts);

// Straightforward whole-buffer BS.1770 meter at 48 kHz, for cross-checks:
// fresh K-weighting per channel, blocks summed sample by sample.
std::vector<double> NaiveBlockLoudness(const AudioBuffer& buffer,
                                       double window_s, double hop_s);
std::optional<double> NaiveIntegrated(const AudioBuffer& buffer);

// Scoped temporary directory.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

std::string ReadText(const std::filesystem::path& path);

}  // namespace speechqc::testing

#endif  // SPEECHQC_TESTS_TEST_UTIL_H_
