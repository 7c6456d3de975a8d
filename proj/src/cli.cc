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

#include "speechqc/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speechqc/activity.h"
#include "speechqc/analysis.h"
#include "speechqc/error.h"
#include "speechqc/harness.h"
#include "speechqc/io_util.h"
#include "speechqc/qc_rules.h"
#include "speechqc/report.h"
#include "speechqc/separator.h"
#include "speechqc/wav.h"

namespace speechqc {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kChunkFrames = 1 << 16;

const std::map<std::string, GatingMode> kGatingModes = {
    {"standard", GatingMode::kStandard}, {"ungated", GatingMode::kUngated}};

struct MeasureFlags {
  std::optional<double> sld_threshold;
  std::optional<double> sbld_threshold;
  double hop_s = 0.1;
  double lra_hop_s = 1.0;
  GatingMode speech_gating = GatingMode::kStandard;
  GatingMode background_gating = GatingMode::kUngated;
};

struct AnalyzeFlags {
  std::string mix;
  std::string speech;
  std::string background;
  std::string activity;
  std::string separator;
  double separator_timeout_s = 600.0;
  std::size_t length_tolerance = 0;
  std::string rules = std::string(kDefaultPreset);
  std::string out = ".";
  bool reproducible = false;
  MeasureFlags measure;
};

struct CorpusFlags {
  std::string corpus;
  std::size_t generate = 20;
  double duration_s = 12.0;
  std::uint64_t seed = 1;
  std::string align = "loop";
  int jobs = 1;
  std::string out = ".";
  bool reproducible = false;
  MeasureFlags measure;
};

struct SimulateFlags {
  CorpusFlags corpus;
  std::string grid = "-10:20:2.5";
  std::string curve = "both";
};

struct EvaluateFlags {
  CorpusFlags corpus;
  std::string separator;
  double separator_timeout_s = 600.0;
  std::string conditions = "-10,-5,0,5,10,15,20";
};

struct GenerateFlags {
  std::string out;
  std::size_t count = 20;
  double duration_s = 12.0;
  std::uint64_t seed = 1;
  int sample_rate = 48000;
};

struct MixFlags {
  std::string speech;
  std::string background;
  std::string activity;
  double sbld = 0.0;
  std::string align = "loop";
  std::uint64_t seed = 1;
  std::string out;
  MeasureFlags measure;
};

void AddMeasureFlags(CLI::App* app, MeasureFlags* f) {
  app->add_option("--sld-threshold", f->sld_threshold,
                  "Critical SLD threshold in LU (overrides the rules)");
  app->add_option("--sbld-threshold", f->sbld_threshold,
                  "Critical local SBLD threshold in LU (overrides the rules)");
  app->add_option("--hop", f->hop_s, "Short-term hop in seconds")
      ->capture_default_str();
  app->add_option("--lra-hop", f->lra_hop_s, "LRA block hop in seconds")
      ->capture_default_str();
  app->add_option("--speech-gating", f->speech_gating,
                  "Gating of speech loudness in SL and SBLD")
      ->transform(CLI::CheckedTransformer(kGatingModes, CLI::ignore_case))
      ->option_text("standard|ungated");
  app->add_option("--background-gating", f->background_gating,
                  "Gating of background loudness in SBLD")
      ->transform(CLI::CheckedTransformer(kGatingModes, CLI::ignore_case))
      ->option_text("standard|ungated");
}

void AddCorpusFlags(CLI::App* app, CorpusFlags* f) {
  app->add_option("--corpus", f->corpus,
                  "Corpus folder with pairs/<id>/speech.wav, background.wav");
  app->add_option("--generate", f->generate,
                  "Synthetic pairs to generate when no corpus is given")
      ->capture_default_str();
  app->add_option("--duration", f->duration_s,
                  "Duration of generated pairs in seconds")
      ->capture_default_str();
  app->add_option("--seed", f->seed, "Seed for generation and alignment")
      ->capture_default_str();
  app->add_option("--align", f->align, "Background alignment: loop or pad")
      ->check(CLI::IsMember({"loop", "pad"}))
      ->capture_default_str();
  app->add_option("--jobs", f->jobs, "Worker threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  app->add_option("--out", f->out, "Output directory")->capture_default_str();
  app->add_flag("--reproducible", f->reproducible,
                "Omit timestamps from outputs");
  AddMeasureFlags(app, &f->measure);
}

AnalysisConfig ConfigFrom(const MeasureFlags& f) {
  AnalysisConfig c;
  c.meter.short_term_hop_s = f.hop_s;
  c.lra_hop_s = f.lra_hop_s;
  c.speech.speech_gating = f.speech_gating;
  c.speech.background_gating = f.background_gating;
  if (f.sld_threshold) c.speech.sld_threshold_lu = *f.sld_threshold;
  if (f.sbld_threshold) c.speech.sbld_threshold_lu = *f.sbld_threshold;
  c.Validate();
  return c;
}

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> out;
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::kUsage, "bad number '" + std::string(s) +
                                         "' in grid '" + text + "'");
    }
    return v;
  };
  if (text.find(':') != std::string::npos) {
    // start:stop:step
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string::npos) {
      throw Error(ErrorCode::kUsage, "grid range needs start:stop:step");
    }
    const double start = number(std::string_view(text).substr(0, a));
    const double stop = number(std::string_view(text).substr(a + 1, b - a - 1));
    const double step = number(std::string_view(text).substr(b + 1));
    if (!(step > 0) || stop < start) {
      throw Error(ErrorCode::kUsage, "grid range is empty");
    }
    const auto n = static_cast<std::size_t>(
        std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
      out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    out.push_back(number(std::string_view(text).substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

// Source of equal-length chunks for one signal.
class ChunkSource {
 public:
  virtual ~ChunkSource() = default;
  virtual std::uint64_t frames() const = 0;
  virtual int sample_rate() const = 0;
  virtual const std::vector<ChannelRole>& layout() const = 0;
  virtual AudioBuffer Read(std::size_t n) = 0;
};

class FileSource : public ChunkSource {
 public:
  explicit FileSource(const std::string& path) : reader_(path) {}
  std::uint64_t frames() const override { return reader_.info().num_frames; }
  int sample_rate() const override { return reader_.info().sample_rate; }
  const std::vector<ChannelRole>& layout() const override {
    return reader_.layout();
  }
  AudioBuffer Read(std::size_t n) override { return reader_.Read(n); }

 private:
  WavReader reader_;
};

class MemorySource : public ChunkSource {
 public:
  explicit MemorySource(AudioBuffer buffer) : buffer_(std::move(buffer)) {}
  std::uint64_t frames() const override { return buffer_.num_frames(); }
  int sample_rate() const override { return buffer_.sample_rate(); }
  const std::vector<ChannelRole>& layout() const override {
    return buffer_.layout();
  }
  AudioBuffer Read(std::size_t n) override {
    const std::size_t count =
        std::min<std::size_t>(n, buffer_.num_frames() - pos_);
    AudioBuffer out = buffer_.Slice(pos_, count);
    pos_ += count;
    return out;
  }

 private:
  AudioBuffer buffer_;
  std::size_t pos_ = 0;
};

std::unique_ptr<ChunkSource> OpenSource(const std::string& path,
                                        int target_rate, Diagnostics* diag) {
  auto file = std::make_unique<FileSource>(path);
  if (target_rate == 0 || file->sample_rate() == target_rate) return file;
  bool resampled = false;
  return std::make_unique<MemorySource>(
      LoadAudio(path, target_rate, diag, &resampled));
}

// Streams the three roles through the analyzer, deriving whichever stem is
// missing chunk by chunk and fitting stem lengths to the reference.
ProgramEnergies MeterSources(std::unique_ptr<ChunkSource> mix,
                             std::unique_ptr<ChunkSource> speech,
                             std::unique_ptr<ChunkSource> background,
                             const AnalysisConfig& config, Diagnostics* diag) {
  ChunkSource* reference =
      mix ? mix.get() : speech ? speech.get() : background.get();
  const int rate = reference->sample_rate();
  const auto layout = reference->layout();
  const std::uint64_t total = reference->frames();
  const int present = (mix != nullptr) + (speech != nullptr) +
                      (background != nullptr);
  const bool with_stems = present >= 2 || speech != nullptr;
  for (ChunkSource* s : {mix.get(), speech.get(), background.get()}) {
    if (s == nullptr) continue;
    if (s->layout() != layout) {
      throw Error(ErrorCode::kAlignment,
                  "inputs differ in channel layout");
    }
    if (s->sample_rate() != rate) {
      throw Error(ErrorCode::kAlignment, "inputs differ in sample rate");
    }
  }
  const char* names[] = {"mix", "speech", "background"};
  ChunkSource* sources[] = {mix.get(), speech.get(), background.get()};
  for (int i = 0; i < 3; ++i) {
    if (sources[i] == nullptr || sources[i]->frames() == total) continue;
    Warn(diag, std::string(names[i]) + " has " +
                   std::to_string(sources[i]->frames()) + " frames, " +
                   (sources[i]->frames() > total ? "truncated" : "zero-padded") +
                   " to " + std::to_string(total));
  }

  ProgramAnalyzer analyzer(rate, layout, config, with_stems);
  double max_residual = 0.0;
  for (std::uint64_t done = 0; done < total;) {
    const auto n = static_cast<std::size_t>(
        std::min<std::uint64_t>(kChunkFrames, total - done));
    auto read = [&](ChunkSource* s) -> std::optional<AudioBuffer> {
      if (s == nullptr) return std::nullopt;
      AudioBuffer b = s->Read(n);
      if (b.num_frames() != n) {
        if (b.num_channels() == 0) b = AudioBuffer(rate, layout, 0);
        b.Resize(n);
      }
      return b;
    };
    std::optional<AudioBuffer> m = read(mix.get());
    std::optional<AudioBuffer> s = read(speech.get());
    std::optional<AudioBuffer> b = read(background.get());
    if (!with_stems) {
      analyzer.Process(*m);
    } else {
      if (m && s && b) {
        max_residual = std::max<double>(max_residual, MixResidual(*m, *s, *b));
      } else if (m && s) {
        b = DeriveBackground(*m, *s);
      } else if (m && b) {
        s = Subtract(*m, *b);
      } else if (s && b) {
        m = Add(*s, *b);
      } else {
        // Speech only: the program is the speech, the background silent.
        m = *s;
        b = AudioBuffer(rate, layout, n);
      }
      analyzer.Process(*m, &*s, &*b);
    }
    done += n;
  }
  if (max_residual > 1e-3) {
    Warn(diag, "mix differs from speech + background by up to " +
                   FormatFixed(max_residual, 6));
  }
  return analyzer.Finish();
}

bool IsSeparatorFailure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSeparatorLaunch:
    case ErrorCode::kSeparatorExit:
    case ErrorCode::kSeparatorTimeout:
    case ErrorCode::kSeparatorOutput:
    case ErrorCode::kRateMismatch:
    case ErrorCode::kLengthMismatch:
      return true;
    default:
      return false;
  }
}

std::string Describe(const Measurement& m, const char* unit) {
  if (!m.has_value()) return "n/a (" + std::string(StatusName(m.status)) + ")";
  return FormatFixed(*m.value, 2) + " " + unit +
         (m.status == Status::kCapped ? " (capped)" : "");
}

void Summarize(const Analysis& a, const QcFindings& qc) {
  const MacroReport& m = a.macro;
  std::cout << "program loudness      " << Describe(m.program_loudness, "LUFS")
            << "\n"
            << "program LRA           " << Describe(m.program_lra, "LU")
            << "\n"
            << "true peak             " << Describe(m.true_peak, "dBTP")
            << "\n"
            << "speech loudness (SL)  " << Describe(m.speech_loudness, "LUFS")
            << "\n"
            << "speech-gated loudness "
            << Describe(m.speech_gated_loudness, "LUFS") << "\n"
            << "LDR                   " << Describe(m.ldr, "LU") << "\n"
            << "SBLD                  " << Describe(m.sbld_integrated, "LU")
            << "\n"
            << "critical speech       " << Describe(m.critical_percentage, "%")
            << "\n";
  for (const QcFinding& f : qc.findings) {
    std::cout << "qc " << f.rule << ": " << OutcomeName(f.outcome) << "\n";
  }
  std::cout << "qc result: " << (qc.passed() ? "pass" : "fail") << "\n";
}

void PrintWarnings(const Diagnostics& diag) {
  for (const auto& w : diag.warnings()) std::cerr << "warning: " << w << "\n";
}

int RunAnalyze(const AnalyzeFlags& f) {
  if (f.mix.empty() && f.speech.empty()) {
    throw Error(ErrorCode::kUsage,
                "analyze needs --mix, --speech, or both (see --help)");
  }
  if (!f.separator.empty() && f.mix.empty()) {
    throw Error(ErrorCode::kUsage, "--separator-cmd needs --mix");
  }
  QcRuleSet rules = LoadRules(f.rules);
  if (f.measure.sld_threshold) rules.sld_threshold_lu = *f.measure.sld_threshold;
  if (f.measure.sbld_threshold) {
    rules.sbld_threshold_lu = *f.measure.sbld_threshold;
  }
  MeasureFlags measure = f.measure;
  measure.sld_threshold = rules.sld_threshold_lu;
  measure.sbld_threshold = rules.sbld_threshold_lu;
  const AnalysisConfig config = ConfigFrom(measure);

  Diagnostics diag;
  Manifest manifest;
  manifest.rules = f.rules;
  if (!f.mix.empty()) manifest.inputs["mix"] = f.mix;
  if (!f.speech.empty()) manifest.inputs["speech"] = f.speech;
  if (!f.background.empty()) manifest.inputs["background"] = f.background;
  if (!f.activity.empty()) manifest.inputs["activity"] = f.activity;

  const fs::path out(f.out);
  fs::create_directories(out);

  std::unique_ptr<ChunkSource> mix, speech, background;
  if (!f.separator.empty()) {
    AudioBuffer mix_audio = ReadWav(f.mix);
    const int rate = mix_audio.sample_rate();
    StemSet reference;
    if (!f.speech.empty()) reference.speech = LoadAudio(f.speech, rate, &diag);
    if (!f.background.empty()) {
      reference.background = LoadAudio(f.background, rate, &diag);
    }
    if (reference.speech || reference.background) {
      reference.mix = mix_audio;
      reference = CompleteStems(AlignStems(std::move(reference), &diag), 1e-3,
                                &diag);
    }
    const auto separator = MakeSeparator(f.separator, f.separator_timeout_s);
    manifest.separator = separator->name() == "command" ? f.separator
                                                        : separator->name();
    std::optional<StemSet> est;
    try {
      est = separator->Separate(
          mix_audio, reference.complete() ? &reference : nullptr, &diag);
    } catch (const Error& e) {
      if (!IsSeparatorFailure(e.code())) throw;
      // Program-level measures survive; speech measures become unavailable.
      diag.Warn("separator failed (" + std::string(ErrorCodeName(e.code())) +
                "): " + e.what());
    }
    if (est) {
      const fs::path est_path = out / "speech_estimate.wav";
      WriteWav(est_path, *est->speech, SampleFormat::kFloat32);
      manifest.speech_stem_path = est_path.string();
      mix = std::make_unique<MemorySource>(std::move(*est->mix));
      speech = std::make_unique<MemorySource>(std::move(*est->speech));
      background = std::make_unique<MemorySource>(std::move(*est->background));
    } else {
      mix = std::make_unique<MemorySource>(std::move(mix_audio));
    }
  } else {
    int rate = 0;
    if (!f.mix.empty()) {
      mix = OpenSource(f.mix, 0, &diag);
      rate = mix->sample_rate();
    }
    if (!f.speech.empty()) {
      speech = OpenSource(f.speech, rate, &diag);
      if (rate == 0) rate = speech->sample_rate();
    }
    if (!f.background.empty()) background = OpenSource(f.background, rate, &diag);
    if (!f.speech.empty()) manifest.speech_stem_path = f.speech;
  }
  ProgramEnergies energies = MeterSources(std::move(mix), std::move(speech),
                                          std::move(background), config, &diag);

  std::optional<ActivitySidecar> sidecar;
  if (!f.activity.empty()) {
    sidecar = ClipToDuration(LoadActivity(f.activity, &diag),
                             energies.mix.duration_s(), &diag);
    sidecar->source = ActivitySource::kExternal;
  }
  const Analysis analysis =
      Analyze(energies, sidecar ? &*sidecar : nullptr, config);
  const QcFindings findings = EvaluateRules(rules, analysis);

  ReportContext context;
  context.layout = DefaultLayout(energies.num_channels);
  context.warnings = diag.warnings();
  if (!f.reproducible) context.generated_at = Iso8601Now();
  manifest.generated_at = context.generated_at;
  manifest.outputs = {"report.json", "timelines.csv", "critical.csv"};

  WriteFileAtomic(out / "report.json",
                  ReportJson(analysis, findings, config, context));
  WriteFileAtomic(out / "timelines.csv", TimelinesCsv(analysis));
  WriteFileAtomic(out / "critical.csv", CriticalCsv(analysis));
  WriteFileAtomic(out / "manifest.json", ManifestJson(manifest));
  PrintWarnings(diag);
  Summarize(analysis, findings);
  return findings.passed() ? kExitPass : kExitRuleViolation;
}

std::vector<StemPair> CorpusFrom(const CorpusFlags& f, Diagnostics* diag) {
  if (!f.corpus.empty()) return LoadCorpus(f.corpus, diag);
  if (f.generate == 0) {
    throw Error(ErrorCode::kUsage, "--generate must be positive");
  }
  return GenerateCorpus(f.generate, f.duration_s, f.seed);
}

HarnessOptions OptionsFrom(const CorpusFlags& f) {
  HarnessOptions o;
  o.analysis = ConfigFrom(f.measure);
  o.jobs = f.jobs;
  o.align = ParseAlignPolicy(f.align);
  o.seed = f.seed;
  return o;
}

void ReportFailures(const std::vector<PairFailure>& failures) {
  for (const auto& p : failures) {
    std::cerr << "pair " << p.pair_id << " at " << p.condition
              << " failed: " << p.message << "\n";
  }
}

int RunSimulate(const SimulateFlags& f) {
  Diagnostics diag;
  const std::vector<StemPair> corpus = CorpusFrom(f.corpus, &diag);
  const HarnessOptions options = OptionsFrom(f.corpus);
  const std::vector<double> grid = ParseGrid(f.grid);
  const fs::path out(f.corpus.out);
  fs::create_directories(out);
  PrintWarnings(diag);
  if (f.curve == "bias" || f.curve == "both") {
    const Curve c = GatedBiasCurve(corpus, grid, options);
    ReportFailures(c.failures);
    WriteFileAtomic(out / "gated_bias.csv", CurveCsv(c));
    std::cout << "wrote " << (out / "gated_bias.csv").string() << "\n";
  }
  if (f.curve == "ldr" || f.curve == "both") {
    const Curve c = LdrSbldCurve(corpus, grid, options);
    ReportFailures(c.failures);
    WriteFileAtomic(out / "ldr_sbld.csv", CurveCsv(c));
    std::cout << "wrote " << (out / "ldr_sbld.csv").string() << "\n";
  }
  return kExitPass;
}

int RunEvaluate(const EvaluateFlags& f) {
  Diagnostics diag;
  const std::vector<StemPair> corpus = CorpusFrom(f.corpus, &diag);
  const HarnessOptions options = OptionsFrom(f.corpus);
  const auto separator = MakeSeparator(f.separator, f.separator_timeout_s);
  const MaeReport report = EvaluateSeparator(
      corpus, *separator, ParseGrid(f.conditions), options);
  const fs::path out(f.corpus.out);
  fs::create_directories(out);
  PrintWarnings(diag);
  ReportFailures(report.failures);
  WriteFileAtomic(out / "mae.csv", MaeCsv(report));
  WriteFileAtomic(out / "mae.json",
                  MaeJson(report, f.corpus.reproducible
                                      ? std::nullopt
                                      : std::optional(Iso8601Now())));
  for (const ConditionMae& c : report.conditions) {
    std::cout << c.label << ": integrated SL MAE "
              << (c.integrated_sl.mae ? FormatFixed(*c.integrated_sl.mae, 3)
                                      : "n/a")
              << " LU, SBLD MAE "
              << (c.integrated_sbld.mae
                      ? FormatFixed(*c.integrated_sbld.mae, 3)
                      : "n/a")
              << " LU\n";
  }
  return kExitPass;
}

int RunGenerate(const GenerateFlags& f) {
  const auto corpus =
      GenerateCorpus(f.count, f.duration_s, f.seed, f.sample_rate);
  WriteCorpus(f.out, corpus);
  std::cout << "wrote " << corpus.size() << " pairs under "
            << (fs::path(f.out) / "pairs").string() << "\n";
  return kExitPass;
}

int RunMix(const MixFlags& f) {
  const AudioBuffer speech = ReadWav(f.speech);
  Diagnostics diag;
  const AudioBuffer background =
      LoadAudio(f.background, speech.sample_rate(), &diag);
  std::optional<ActivitySidecar> sidecar;
  if (!f.activity.empty()) sidecar = LoadActivity(f.activity, &diag);
  const MixSpec spec{f.sbld, ParseAlignPolicy(f.align), f.seed};
  const MixedProgram mixed =
      MixAtSbld(speech, background, spec, sidecar ? &*sidecar : nullptr,
                ConfigFrom(f.measure));
  const fs::path out(f.out);
  fs::create_directories(out);
  WriteWav(out / "mix.wav", *mixed.stems.mix, SampleFormat::kFloat32);
  WriteWav(out / "speech.wav", *mixed.stems.speech, SampleFormat::kFloat32);
  WriteWav(out / "background.wav", *mixed.stems.background,
           SampleFormat::kFloat32);
  if (sidecar) SaveActivity(out / "activity.csv", *sidecar);
  PrintWarnings(diag);
  std::cout << "background gain " << FormatFixed(mixed.background_gain_db, 3)
            << " dB, SBLD " << FormatFixed(mixed.measured_sbld_lu, 3)
            << " LU\n";
  return kExitPass;
}

}  // namespace

int RunMain(int argc, char** argv) {
  CLI::App app{"Speech-aware loudness measurement and QC"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  AnalyzeFlags analyze;
  CLI::App* a = app.add_subcommand("analyze", "Measure a program and apply QC rules");
  a->add_option("--mix", analyze.mix, "Mix WAV");
  a->add_option("--speech", analyze.speech, "Speech stem WAV");
  a->add_option("--background", analyze.background, "Background stem WAV");
  a->add_option("--activity", analyze.activity,
                "Speech activity sidecar (start,end per line)");
  a->add_option("--separator-cmd", analyze.separator,
                "Separator: 'oracle', 'mix-as-speech' or a command template "
                "with {input} and {output_speech}");
  a->add_option("--separator-timeout", analyze.separator_timeout_s,
                "Separator timeout in seconds")
      ->capture_default_str();
  a->add_option("--rules", analyze.rules, "Rules preset or file")
      ->capture_default_str();
  a->add_option("--out", analyze.out, "Output directory")
      ->capture_default_str();
  a->add_flag("--reproducible", analyze.reproducible,
              "Omit timestamps from outputs");
  AddMeasureFlags(a, &analyze.measure);

  SimulateFlags simulate;
  CLI::App* s = app.add_subcommand("simulate", "Gated-bias and LDR curves over SBLD");
  AddCorpusFlags(s, &simulate.corpus);
  s->add_option("--grid", simulate.grid,
                "SBLD grid in LU: start:stop:step or a comma list")
      ->capture_default_str();
  s->add_option("--curve", simulate.curve, "bias, ldr or both")
      ->check(CLI::IsMember({"bias", "ldr", "both"}))
      ->capture_default_str();

  EvaluateFlags evaluate;
  CLI::App* e = app.add_subcommand("evaluate", "Separator MAE against ground truth");
  AddCorpusFlags(e, &evaluate.corpus);
  e->add_option("--separator-cmd", evaluate.separator,
                "Separator: 'oracle', 'mix-as-speech' or a command template")
      ->required();
  e->add_option("--separator-timeout", evaluate.separator_timeout_s,
                "Separator timeout in seconds")
      ->capture_default_str();
  e->add_option("--conditions", evaluate.conditions,
                "SBLD mixing conditions in LU")
      ->capture_default_str();

  GenerateFlags generate;
  CLI::App* g = app.add_subcommand("generate", "Write a synthetic stem corpus");
  g->add_option("--out", generate.out, "Corpus folder")->required();
  g->add_option("--count", generate.count, "Number of pairs")
      ->capture_default_str();
  g->add_option("--duration", generate.duration_s, "Seconds per pair")
      ->capture_default_str();
  g->add_option("--seed", generate.seed, "Seed")->capture_default_str();
  g->add_option("--rate", generate.sample_rate, "Sample rate")
      ->check(CLI::Range(8000, 384000))
      ->capture_default_str();

  MixFlags mix;
  CLI::App* m = app.add_subcommand("mix", "Mix a stem pair at a target SBLD");
  m->add_option("--speech", mix.speech, "Speech stem WAV")->required();
  m->add_option("--background", mix.background, "Background stem WAV")
      ->required();
  m->add_option("--activity", mix.activity, "Speech activity sidecar");
  m->add_option("--sbld", mix.sbld, "Target SBLD in LU")->required();
  m->add_option("--align", mix.align, "Background alignment: loop or pad")
      ->check(CLI::IsMember({"loop", "pad"}))
      ->capture_default_str();
  m->add_option("--seed", mix.seed, "Alignment seed")->capture_default_str();
  m->add_option("--out", mix.out, "Output folder")->required();
  AddMeasureFlags(m, &mix.measure);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (a->parsed()) return RunAnalyze(analyze);
    if (s->parsed()) return RunSimulate(simulate);
    if (e->parsed()) return RunEvaluate(evaluate);
    if (g->parsed()) return RunGenerate(generate);
    if (m->parsed()) return RunMix(mix);
  } catch (const Error& err) {
    std::cerr << "error [" << ErrorCodeName(err.code()) << "]: " << err.what()
              << "\n";
    return kExitError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace speechqc
