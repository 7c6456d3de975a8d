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

#include <stdio.h>

#include <chrono>
#include <string>

#include "gtest/gtest.h"
#include "speechqc/error.h"
#include "speechqc/separator.h"
#include "speechqc/wav.h"
#include "test_util.h"

namespace speechqc {
namespace {

using testing::TempDir;

AudioBuffer Mix() { return testing::WhiteNoise(48000, 0.3, 1.0, 2, 4); }

ErrorCode CodeOf(const std::string& command, double timeout = 30.0) {
  SeparatorSpec spec{command, timeout};
  try {
    Separate(Mix(), spec);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error from: " << command;
  return ErrorCode::kUsage;
}

TEST(SeparatorTest, IdentityCommand) {
  const AudioBuffer mix = Mix();
  const AudioBuffer before = mix;
  const StemSet stems = Separate(mix, SeparatorSpec{"cp {input} {output_speech}"});
  ASSERT_TRUE(stems.complete());
  EXPECT_EQ(mix, before);
  EXPECT_EQ(*stems.mix, mix);
  EXPECT_EQ(*stems.speech, mix);
  EXPECT_EQ(MaxAbsSample(*stems.background), 0.0f);
}

TEST(SeparatorTest, EmittedBackgroundIsPreferred) {
  TempDir dir;
  const AudioBuffer bg = testing::WhiteNoise(48000, 0.1, 1.0, 2, 5);
  WriteWav(dir / "bg.wav", bg, SampleFormat::kFloat32);
  const std::string cmd = "cp {input} {output_speech} && cp " +
                          ShellQuote((dir / "bg.wav").string()) +
                          " {output_background}";
  const StemSet stems = Separate(Mix(), SeparatorSpec{cmd});
  EXPECT_EQ(*stems.background, bg);
}

TEST(SeparatorTest, TemplateValidation) {
  EXPECT_THROW(SeparatorSpec{"cp {input} out.wav"}.Validate(), Error);
  EXPECT_THROW(SeparatorSpec{"run {output_speech}"}.Validate(), Error);
  EXPECT_FALSE(SeparatorSpec{"x {input} {output_speech}"}.emits_background());
  EXPECT_TRUE(SeparatorSpec{"x {input} {output_speech} {output_background}"}
                  .emits_background());
}

TEST(SeparatorTest, NonzeroExit) {
  EXPECT_EQ(CodeOf("echo oops >&2; exit 3 # {input} {output_speech}"),
            ErrorCode::kSeparatorExit);
  try {
    Separate(Mix(), SeparatorSpec{"echo oops-tail >&2; false # {input} {output_speech}"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("oops-tail"), std::string::npos);
  }
}

TEST(SeparatorTest, Timeout) {
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(CodeOf("sleep 20 # {input} {output_speech}", 0.3),
            ErrorCode::kSeparatorTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(SeparatorTest, MissingOrMalformedOutput) {
  EXPECT_EQ(CodeOf("true {input} {output_speech}"), ErrorCode::kSeparatorOutput);
  EXPECT_EQ(CodeOf("echo garbage > {output_speech} # {input}"),
            ErrorCode::kSeparatorOutput);
}

TEST(SeparatorTest, RateMismatch) {
  TempDir dir;
  WriteWav(dir / "s.wav", testing::WhiteNoise(44100, 0.1, 1.0, 2, 1),
           SampleFormat::kPcm16);
  EXPECT_EQ(CodeOf("cp " + ShellQuote((dir / "s.wav").string()) +
                   " {output_speech} # {input}"),
            ErrorCode::kRateMismatch);
}

TEST(SeparatorTest, LayoutMismatch) {
  TempDir dir;
  WriteWav(dir / "s.wav", testing::WhiteNoise(48000, 0.1, 1.0, 1, 1),
           SampleFormat::kPcm16);
  EXPECT_EQ(CodeOf("cp " + ShellQuote((dir / "s.wav").string()) +
                   " {output_speech} # {input}"),
            ErrorCode::kSeparatorOutput);
}

TEST(SeparatorTest, LengthMismatchAndTolerance) {
  TempDir dir;
  WriteWav(dir / "s.wav", testing::WhiteNoise(48000, 0.1, 0.999, 2, 1),
           SampleFormat::kFloat32);
  const std::string cmd =
      "cp " + ShellQuote((dir / "s.wav").string()) + " {output_speech} # {input}";
  EXPECT_EQ(CodeOf(cmd), ErrorCode::kLengthMismatch);
  SeparatorSpec lenient{cmd};
  lenient.length_tolerance_frames = 100;
  Diagnostics diag;
  const StemSet stems = Separate(Mix(), lenient, &diag);
  EXPECT_EQ(stems.speech->num_frames(), Mix().num_frames());
  EXPECT_FALSE(diag.empty());
}

TEST(SeparatorTest, ErrorsDoNotLeakTempPaths) {
  try {
    Separate(Mix(), SeparatorSpec{"echo {output_speech} >&2; false # {input}"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).find("/tmp"), std::string::npos) << e.what();
  }
}

std::string ShellRoundTrip(const std::string& s) {
  const std::string cmd = "printf %s " + ShellQuote(s);
  FILE* p = ::popen(cmd.c_str(), "r");
  std::string out;
  char buf[256];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  ::pclose(p);
  return out;
}

TEST(SeparatorTest, ShellQuoteRoundTrips) {
  for (const std::string s :
       {"plain", "with space", "it's", "$HOME `x` \"q\"", "a'b'c", "", "*; rm"}) {
    EXPECT_EQ(ShellRoundTrip(s), s);
  }
}

TEST(SeparatorTest, OracleAndMixAsSpeech) {
  const AudioBuffer mix = Mix();
  OracleSeparator oracle;
  EXPECT_THROW(oracle.Separate(mix, nullptr, nullptr), Error);
  StemSet truth;
  truth.mix = mix;
  truth.speech = ApplyGainDb(mix, -3.0);
  truth.background = Subtract(mix, *truth.speech);
  const StemSet same = oracle.Separate(mix, &truth, nullptr);
  EXPECT_EQ(*same.speech, *truth.speech);
  EXPECT_EQ(*same.background, *truth.background);

  const StemSet identity = MixAsSpeechSeparator().Separate(mix, &truth, nullptr);
  EXPECT_EQ(*identity.speech, mix);
  EXPECT_EQ(MaxAbsSample(*identity.background), 0.0f);

  EXPECT_EQ(MakeSeparator("oracle", 1)->name(), "oracle");
  EXPECT_EQ(MakeSeparator("mix-as-speech", 1)->name(), "mix-as-speech");
  EXPECT_EQ(MakeSeparator("cp {input} {output_speech}", 1)->name(), "command");
  EXPECT_THROW(MakeSeparator("cp a b", 1), Error);
}

}  // namespace
}  // namespace speechqc
