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

#ifndef SPEECHQC_DIAGNOSTICS_H_
#define SPEECHQC_DIAGNOSTICS_H_

#include <string>
#include <vector>

namespace speechqc {

// Collects non-fatal warnings so they can be surfaced in reports. Functions
// taking a Diagnostics* accept nullptr when the caller does not care.
class Diagnostics {
 public:
  void Warn(std::string message) { warnings_.push_back(std::move(message)); }

  const std::vector<std::string>& warnings() const { return warnings_; }
  bool empty() const { return warnings_.empty(); }

  void Append(const Diagnostics& other) {
    warnings_.insert(warnings_.end(), other.warnings_.begin(),
                     other.warnings_.end());
  }

 private:
  std::vector<std::string> warnings_;
};

inline void Warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->Warn(std::move(message));
}

}  // namespace speechqc

#endif  // SPEECHQC_DIAGNOSTICS_H_
