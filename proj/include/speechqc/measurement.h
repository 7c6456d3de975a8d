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

#ifndef SPEECHQC_MEASUREMENT_H_
#define SPEECHQC_MEASUREMENT_H_

#include <optional>
#include <string_view>

namespace speechqc {

// Why a measurement has no (ordinary) value.
enum class Status {
  kOk,
  kBelowGate,    // every block fell below the gates
  kNoSpeech,     // no speech-active time to measure over
  kTooShort,     // program shorter than the analysis window
  kUnavailable,  // input missing, e.g. no speech stem and no separator
  kCapped,       // value clipped to a reporting bound (value is the bound)
  kUndefined,    // arithmetic on unmeasurable inputs
};

std::string_view StatusName(Status status);

struct Measurement {
  std::optional<double> value;
  Status status = Status::kUnavailable;

  static Measurement Ok(double v) { return {v, Status::kOk}; }
  static Measurement Capped(double bound) { return {bound, Status::kCapped}; }
  static Measurement Missing(Status why) { return {std::nullopt, why}; }

  bool ok() const { return status == Status::kOk; }
  // True for ordinary and capped values.
  bool has_value() const { return value.has_value(); }

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

// a - b, propagating the first non-ok status.
Measurement Difference(const Measurement& a, const Measurement& b);

}  // namespace speechqc

#endif  // SPEECHQC_MEASUREMENT_H_
