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

#ifndef SPEECHQC_IO_UTIL_H_
#define SPEECHQC_IO_UTIL_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speechqc {

std::vector<std::byte> ReadFileBytes(const std::filesystem::path& path);
std::string ReadFileText(const std::filesystem::path& path);

// Writes to "<path>.tmp-<pid>" and renames over `path`, so readers never see
// a partially written file.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::byte> bytes);
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view text);

}  // namespace speechqc

#endif  // SPEECHQC_IO_UTIL_H_
