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

#include "speechqc/separator.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>
#include <utility>

#include "speechqc/error.h"
#include "speechqc/io_util.h"
#include "speechqc/wav.h"

namespace speechqc {

namespace {

constexpr const char* kInput = "{input}";
constexpr const char* kOutputSpeech = "{output_speech}";
constexpr const char* kOutputBackground = "{output_background}";

void ReplaceAll(std::string& s, const std::string& from,
                const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

// Job-scoped temporary directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "speechqc-sep-XXXXXX")
            .string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw Error(ErrorCode::kIo, "cannot create temporary directory");
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string Tail(const std::filesystem::path& log, std::size_t max_chars) {
  std::error_code ec;
  if (!std::filesystem::exists(log, ec)) return "";
  std::string text = ReadFileText(log);
  if (text.size() > max_chars) text = "..." + text.substr(text.size() - max_chars);
  return text;
}

// Runs `command` via /bin/sh in its own process group, output redirected to
// `log`. Returns the exit status; kills the group on timeout.
int RunShell(const std::string& command, double timeout_s,
             const std::filesystem::path& log) {
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw Error(ErrorCode::kSeparatorLaunch, "fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    const int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      ::dup2(fd, STDOUT_FILENO);
      ::dup2(fd, STDERR_FILENO);
      ::close(fd);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(timeout_s));
  int status = 0;
  while (true) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) {
      throw Error(ErrorCode::kSeparatorLaunch, "waitpid failed");
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw Error(ErrorCode::kSeparatorTimeout,
                  "separator timed out after " + std::to_string(timeout_s) +
                      " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

AudioBuffer LoadOutput(const std::filesystem::path& path,
                       const AudioBuffer& mix, const SeparatorSpec& spec,
                       const char* what, Diagnostics* diag) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw Error(ErrorCode::kSeparatorOutput,
                std::string("separator did not write the ") + what + " stem");
  }
  AudioBuffer out;
  try {
    out = ReadWav(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kSeparatorOutput,
                std::string("malformed ") + what + " stem: " + e.what());
  }
  const int expected =
      spec.expected_rate > 0 ? spec.expected_rate : mix.sample_rate();
  if (out.sample_rate() != expected) {
    throw Error(ErrorCode::kRateMismatch,
                std::string(what) + " stem is at " +
                    std::to_string(out.sample_rate()) + " Hz, expected " +
                    std::to_string(expected) + " Hz");
  }
  if (out.layout() != mix.layout()) {
    throw Error(ErrorCode::kSeparatorOutput,
                std::string(what) + " stem channel layout differs from mix");
  }
  const std::size_t have = out.num_frames();
  const std::size_t want = mix.num_frames();
  if (have != want) {
    const std::size_t diff = have > want ? have - want : want - have;
    if (diff > spec.length_tolerance_frames) {
      throw Error(ErrorCode::kLengthMismatch,
                  std::string(what) + " stem has " + std::to_string(have) +
                      " frames, mix has " + std::to_string(want));
    }
    Warn(diag, std::string(what) + " stem length adjusted by " +
                   std::to_string(diff) + " frames");
    out.Resize(want);
  }
  return out;
}

}  // namespace

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

void SeparatorSpec::Validate() const {
  if (command_template.find(kInput) == std::string::npos ||
      command_template.find(kOutputSpeech) == std::string::npos) {
    throw Error(ErrorCode::kValidation,
                "separator command must contain {input} and {output_speech}");
  }
  if (!(timeout_s > 0)) {
    throw Error(ErrorCode::kValidation, "separator timeout must be positive");
  }
}

bool SeparatorSpec::emits_background() const {
  return command_template.find(kOutputBackground) != std::string::npos;
}

CommandSeparator::CommandSeparator(SeparatorSpec spec)
    : spec_(std::move(spec)) {
  spec_.Validate();
}

StemSet CommandSeparator::Separate(const AudioBuffer& mix,
                                   const StemSet* /*reference*/,
                                   Diagnostics* diag) const {
  TempDir dir;
  const auto input = dir.path() / "mix.wav";
  const auto speech_path = dir.path() / "speech.wav";
  const auto background_path = dir.path() / "background.wav";
  WriteWav(input, mix, SampleFormat::kFloat32);

  std::string command = spec_.command_template;
  ReplaceAll(command, kInput, ShellQuote(input.string()));
  ReplaceAll(command, kOutputSpeech, ShellQuote(speech_path.string()));
  ReplaceAll(command, kOutputBackground, ShellQuote(background_path.string()));

  const auto log = dir.path() / "separator.log";
  const int status = RunShell(command, spec_.timeout_s, log);
  if (status != 0) {
    std::string message =
        "separator exited with status " + std::to_string(status);
    // Job paths are random; keep messages reproducible.
    std::string tail = Tail(log, 400);
    ReplaceAll(tail, dir.path().string(), "<job>");
    if (!tail.empty()) message += ": " + tail;
    throw Error(ErrorCode::kSeparatorExit, message);
  }

  StemSet stems;
  stems.mix = mix;
  stems.speech = LoadOutput(speech_path, mix, spec_, "speech", diag);
  if (spec_.emits_background()) {
    stems.background =
        LoadOutput(background_path, mix, spec_, "background", diag);
  } else {
    stems.background = DeriveBackground(mix, *stems.speech);
  }
  return stems;
}

StemSet OracleSeparator::Separate(const AudioBuffer& mix,
                                  const StemSet* reference,
                                  Diagnostics* /*diag*/) const {
  if (reference == nullptr || !reference->speech || !reference->background) {
    throw Error(ErrorCode::kUsage,
                "oracle separator needs reference speech and background");
  }
  StemSet stems;
  stems.mix = mix;
  stems.speech = reference->speech;
  stems.background = reference->background;
  return stems;
}

StemSet MixAsSpeechSeparator::Separate(const AudioBuffer& mix,
                                       const StemSet* /*reference*/,
                                       Diagnostics* /*diag*/) const {
  StemSet stems;
  stems.mix = mix;
  stems.speech = mix;
  stems.background =
      AudioBuffer(mix.sample_rate(), mix.layout(), mix.num_frames());
  return stems;
}

StemSet Separate(const AudioBuffer& mix, const SeparatorSpec& spec,
                 Diagnostics* diag) {
  return CommandSeparator(spec).Separate(mix, nullptr, diag);
}

std::unique_ptr<Separator> MakeSeparator(const std::string& name_or_command,
                                         double timeout_s) {
  if (name_or_command == "oracle") return std::make_unique<OracleSeparator>();
  if (name_or_command == "mix-as-speech") {
    return std::make_unique<MixAsSpeechSeparator>();
  }
  SeparatorSpec spec;
  spec.command_template = name_or_command;
  spec.timeout_s = timeout_s;
  return std::make_unique<CommandSeparator>(std::move(spec));
}

}  // namespace speechqc
