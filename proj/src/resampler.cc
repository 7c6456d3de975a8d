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

#include "speechqc/resampler.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "speechqc/error.h"

namespace speechqc {

namespace {

constexpr int kZeroCrossings = 32;
constexpr double kKaiserBeta = 10.0;
constexpr double kCutoff = 0.95;
constexpr std::int64_t kMaxTablePhases = 4096;

double BesselI0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

class Kernel {
 public:
  // `scale` < 1 when downsampling: the kernel is stretched in input samples.
  explicit Kernel(double scale)
      : scale_(scale),
        half_width_(kZeroCrossings / scale),
        norm_(1.0 / BesselI0(kKaiserBeta)) {}

  double half_width() const { return half_width_; }

  // Kernel value at offset `x` input samples from the output instant.
  double operator()(double x) const {
    const double r = x / half_width_;
    if (std::fabs(r) >= 1.0) return 0.0;
    const double window =
        BesselI0(kKaiserBeta * std::sqrt(1.0 - r * r)) * norm_;
    const double arg = kCutoff * scale_ * x;
    const double sinc =
        arg == 0.0 ? 1.0
                   : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    return kCutoff * scale_ * sinc * window;
  }

 private:
  double scale_;
  double half_width_;
  double norm_;
};

}  // namespace

std::size_t ResampledLength(std::size_t input_frames, int from_rate,
                            int to_rate) {
  const auto num = static_cast<unsigned __int128>(input_frames) *
                   static_cast<unsigned>(to_rate);
  const auto den = static_cast<unsigned>(from_rate);
  return static_cast<std::size_t>((num + den - 1) / den);
}

AudioBuffer Resample(const AudioBuffer& input, int to_rate) {
  if (to_rate <= 0) {
    throw Error(ErrorCode::kValidation, "target sample rate must be positive");
  }
  const int from_rate = input.sample_rate();
  if (from_rate == to_rate) return input;

  const std::int64_t g = std::gcd(from_rate, to_rate);
  const std::int64_t up = to_rate / g;    // output step in 1/up input samples
  const std::int64_t down = from_rate / g;
  const double scale = std::min(1.0, static_cast<double>(to_rate) / from_rate);
  const Kernel kernel(scale);
  const auto taps = static_cast<std::int64_t>(std::ceil(kernel.half_width()));

  const std::size_t in_frames = input.num_frames();
  const std::size_t out_frames = ResampledLength(in_frames, from_rate, to_rate);

  // Output n sits at input position n * down / up = base + phase / up.
  const bool use_table = up <= kMaxTablePhases;
  std::vector<double> table;
  if (use_table) {
    table.resize(static_cast<std::size_t>(up * (2 * taps + 1)));
    for (std::int64_t phase = 0; phase < up; ++phase) {
      const double frac = static_cast<double>(phase) / up;
      for (std::int64_t k = -taps; k <= taps; ++k) {
        table[static_cast<std::size_t>(phase * (2 * taps + 1) + k + taps)] =
            kernel(frac - static_cast<double>(k));
      }
    }
  }

  AudioBuffer out(to_rate, input.layout(), out_frames);
  std::vector<double> coeffs(static_cast<std::size_t>(2 * taps + 1));
  for (std::size_t n = 0; n < out_frames; ++n) {
    const auto pos = static_cast<std::int64_t>(n) * down;
    const std::int64_t base = pos / up;
    const std::int64_t phase = pos % up;
    const double* h = nullptr;
    if (use_table) {
      h = &table[static_cast<std::size_t>(phase * (2 * taps + 1))];
    } else {
      const double frac = static_cast<double>(phase) / up;
      for (std::int64_t k = -taps; k <= taps; ++k) {
        coeffs[static_cast<std::size_t>(k + taps)] =
            kernel(frac - static_cast<double>(k));
      }
      h = coeffs.data();
    }
    for (std::size_t c = 0; c < input.num_channels(); ++c) {
      const auto x = input.channel(c);
      double acc = 0.0;
      for (std::int64_t k = -taps; k <= taps; ++k) {
        const std::int64_t i = base + k;
        if (i < 0 || i >= static_cast<std::int64_t>(in_frames)) continue;
        acc += h[k + taps] * x[static_cast<std::size_t>(i)];
      }
      out.mutable_channel(c)[n] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace speechqc
