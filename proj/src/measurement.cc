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

#include "speechqc/measurement.h"

namespace speechqc {

std::string_view StatusName(Status status) {
  switch (status) {
    case Status::kOk:
      return "ok";
    case Status::kBelowGate:
      return "below_gate";
    case Status::kNoSpeech:
      return "no_speech";
    case Status::kTooShort:
      return "too_short";
    case Status::kUnavailable:
      return "unavailable";
    case Status::kCapped:
      return "capped";
    case Status::kUndefined:
      return "undefined";
  }
  return "unknown";
}

Measurement Difference(const Measurement& a, const Measurement& b) {
  if (!a.ok()) return Measurement::Missing(a.status);
  if (!b.ok()) return Measurement::Missing(b.status);
  return Measurement::Ok(*a.value - *b.value);
}

}  // namespace speechqc
