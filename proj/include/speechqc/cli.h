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

#ifndef SPEECHQC_CLI_H_
#define SPEECHQC_CLI_H_

namespace speechqc {

// Exit codes of the command-line tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRuleViolation = 2;

// Entry point of the speechqc tool: analyze, simulate, evaluate, generate
// and mix subcommands.
int RunMain(int argc, char** argv);

}  // namespace speechqc

#endif  // SPEECHQC_CLI_H_
