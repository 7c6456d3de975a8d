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

#include "speechqc/error.h"

namespace speechqc {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedFormat:
      return "unsupported_format";
    case ErrorCode::kParse:
      return "parse_error";
    case ErrorCode::kIo:
      return "io_error";
    case ErrorCode::kAlignment:
      return "alignment_error";
    case ErrorCode::kValidation:
      return "validation_error";
    case ErrorCode::kProgramTooShort:
      return "program_too_short";
    case ErrorCode::kSilentStem:
      return "silent_stem";
    case ErrorCode::kSeparatorLaunch:
      return "separator_launch_failed";
    case ErrorCode::kSeparatorExit:
      return "separator_nonzero_exit";
    case ErrorCode::kSeparatorTimeout:
      return "separator_timeout";
    case ErrorCode::kSeparatorOutput:
      return "separator_malformed_output";
    case ErrorCode::kRateMismatch:
      return "rate_mismatch";
    case ErrorCode::kLengthMismatch:
      return "length_mismatch";
    case ErrorCode::kUsage:
      return "usage_error";
    case ErrorCode::kInsufficientPairs:
      return "insufficient_pairs";
  }
  return "unknown";
}

}  // namespace speechqc
