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

#ifndef SPEECHQC_ERROR_H_
#define SPEECHQC_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace speechqc {

enum class ErrorCode {
  kUnsupportedFormat,
  kParse,
  kIo,
  kAlignment,
  kValidation,
  kProgramTooShort,
  kSilentStem,
  kSeparatorLaunch,
  kSeparatorExit,
  kSeparatorTimeout,
  kSeparatorOutput,
  kRateMismatch,
  kLengthMismatch,
  kUsage,
  kInsufficientPairs,  // too many corpus items failed
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as Error; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse error that remembers where in the byte stream it happened.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::uint64_t byte_offset)
      : Error(ErrorCode::kParse,
              message + " (at byte offset " + std::to_string(byte_offset) +
                  ")"),
        byte_offset_(byte_offset) {}

  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

// Validation error tied to a line of a text input.
class LineError : public Error {
 public:
  LineError(const std::string& message, int line)
      : Error(ErrorCode::kValidation,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace speechqc

#endif  // SPEECHQC_ERROR_H_
