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

#ifndef SPEECHQC_SEPARATOR_H_
#define SPEECHQC_SEPARATOR_H_

#include <cstddef>
#include <memory>
#include <string>

#include "speechqc/audio_buffer.h"
#include "speechqc/diagnostics.h"
#include "speechqc/stems.h"

namespace speechqc {

// External separation command. The template is run through /bin/sh with
// {input}, {output_speech} and (optionally) {output_background} replaced by
// shell-quoted paths in a job-scoped temporary directory.
struct SeparatorSpec {
  std::string command_template;
  double timeout_s = 600.0;
  int expected_rate = 0;  // 0: the mix rate
  // Output length differences up to this many frames are padded or
  // truncated with a warning; larger ones are errors.
  std::size_t length_tolerance_frames = 0;

  // Throws kValidation unless {input} and {output_speech} are present.
  void Validate() const;
  bool emits_background() const;
};

// Source of speech (and possibly background) estimates for a mix.
class Separator {
 public:
  virtual ~Separator() = default;

  // Returns a complete, mix-aligned stem set whose mix is `mix` unchanged.
  // `reference` carries ground-truth stems when the caller has them (as the
  // evaluation harness does); real separators ignore it.
  virtual StemSet Separate(const AudioBuffer& mix, const StemSet* reference,
                           Diagnostics* diag) const = 0;
  virtual std::string name() const = 0;
};

class CommandSeparator : public Separator {
 public:
  explicit CommandSeparator(SeparatorSpec spec);

  StemSet Separate(const AudioBuffer& mix, const StemSet* reference,
                   Diagnostics* diag) const override;
  std::string name() const override { return "command"; }

  const SeparatorSpec& spec() const { return spec_; }

 private:
  SeparatorSpec spec_;
};

// Returns the reference stems untouched: separation error is zero by
// construction. Throws kUsage without a reference.
class OracleSeparator : public Separator {
 public:
  StemSet Separate(const AudioBuffer& mix, const StemSet* reference,
                   Diagnostics* diag) const override;
  std::string name() const override { return "oracle"; }
};

// Treats the whole mix as speech and silence as background.
class MixAsSpeechSeparator : public Separator {
 public:
  StemSet Separate(const AudioBuffer& mix, const StemSet* reference,
                   Diagnostics* diag) const override;
  std::string name() const override { return "mix-as-speech"; }
};

// Runs `spec` on `mix`. Background preference: emitted by the separator,
// otherwise mix - speech.
StemSet Separate(const AudioBuffer& mix, const SeparatorSpec& spec,
                 Diagnostics* diag = nullptr);

// Builds a separator from a CLI name: "oracle", "mix-as-speech", or
// anything else treated as a command template.
std::unique_ptr<Separator> MakeSeparator(const std::string& name_or_command,
                                         double timeout_s);

// Quotes `s` for /bin/sh.
std::string ShellQuote(const std::string& s);

}  // namespace speechqc

#endif  // SPEECHQC_SEPARATOR_H_
