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

#include "speechqc/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>
#include <utility>

#include "speechqc/error.h"
#include "speechqc/synth.h"
#include "speechqc/wav.h"

namespace speechqc {

namespace {

EnergySeries Meter(const AudioBuffer& buffer, const AnalysisConfig& config) {
  LoudnessMeter meter(buffer.sample_rate(),
                      config.meter.WeightsFor(buffer.layout()),
                      config.Quantum(buffer.sample_rate()));
  meter.Process(buffer);
  return meter.TakeEnergies();
}

SpeechActivity ActivityFor(const EnergySeries& speech,
                           const ActivitySidecar* sidecar,
                           const AnalysisConfig& config) {
  if (sidecar != nullptr) {
    return ActivityFromSidecar(
        ClipToDuration(*sidecar, speech.duration_s()),
        MicroGrid::For(speech, config));
  }
  // Without the local-SBLD floor: the mixing gain must not move the mask.
  return DetectActivityFromSeries(speech, config);
}

// Per-item seed independent of scheduling.
std::uint64_t ItemSeed(std::uint64_t seed, std::size_t pair, std::size_t cond) {
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (pair + 1)) ^
                    (0xC2B2AE3D27D4EB4FULL * (cond + 1));
  x ^= x >> 31;
  return x * 0xBF58476D1CE4E5B9ULL;
}

std::string ConditionLabel(double sbld) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sbld_%g", sbld);
  return buf;
}

MaeStat Summarize(const std::vector<double>& errors) {
  MaeStat s;
  s.count = errors.size();
  if (errors.empty()) return s;
  const double n = static_cast<double>(errors.size());
  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  s.mae = mean;
  s.stddev = errors.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return s;
}

void RequireSuccess(std::size_t ok, std::size_t total, double fraction,
                    const std::string& what) {
  if (total == 0 || static_cast<double>(ok) < fraction * total) {
    throw Error(ErrorCode::kInsufficientPairs,
                what + ": only " + std::to_string(ok) + " of " +
                    std::to_string(total) + " pairs succeeded");
  }
}

using PointFn = double (*)(const MixedProgram&, const ActivitySidecar*,
                           const HarnessOptions&);

Curve RunCurve(const std::string& quantity, PointFn measure,
               const std::vector<StemPair>& corpus,
               const std::vector<double>& grid,
               const HarnessOptions& options) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kValidation, "corpus is empty");
  }
  for (double s : grid) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kValidation, "SBLD grid must be finite");
    }
  }
  options.analysis.Validate();
  struct Cell {
    std::optional<double> value;
    std::string error;
  };
  const std::size_t n = corpus.size() * grid.size();
  std::vector<Cell> cells(n);
  ParallelFor(n, options.jobs, [&](std::size_t i) {
    const std::size_t p = i / grid.size();
    const std::size_t g = i % grid.size();
    try {
      const StemPair& pair = corpus[p];
      MixSpec spec{grid[g], options.align, ItemSeed(options.seed, p, g)};
      const ActivitySidecar* sidecar =
          pair.activity ? &*pair.activity : nullptr;
      const MixedProgram mixed = MixAtSbld(pair.speech, pair.background, spec,
                                           sidecar, options.analysis);
      cells[i].value = measure(mixed, sidecar, options);
    } catch (const std::exception& e) {
      cells[i].error = e.what();
    }
  });

  Curve curve;
  curve.quantity = quantity;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> values;
    CurvePoint point;
    point.sbld_lu = grid[g];
    point.prediction = UncorrelatedSumPrediction(grid[g]);
    for (std::size_t p = 0; p < corpus.size(); ++p) {
      const Cell& cell = cells[p * grid.size() + g];
      if (cell.value) {
        values.push_back(*cell.value);
      } else {
        curve.failures.push_back(
            {corpus[p].id, ConditionLabel(grid[g]), cell.error});
        ++point.failed;
      }
    }
    point.pairs = values.size();
    RequireSuccess(values.size(), corpus.size(),
                   options.min_success_fraction,
                   quantity + " at " + ConditionLabel(grid[g]));
    const MaeStat s = Summarize(values);
    point.mean = *s.mae;
    point.stddev = *s.stddev;
    curve.points.push_back(point);
  }
  return curve;
}

// Program normalized to the target, then metered.
struct Normalized {
  EnergySeries mix;
  EnergySeries speech;
};

Normalized Normalize(const MixedProgram& mixed, const HarnessOptions& options) {
  const AnalysisConfig& config = options.analysis;
  const Measurement program =
      IntegratedFromSeries(Meter(*mixed.stems.mix, config), config.meter);
  if (!program.has_value()) {
    throw Error(ErrorCode::kSilentStem, "program is silent");
  }
  const double gain = options.program_target_lufs - *program.value;
  return {Meter(ApplyGainDb(*mixed.stems.mix, gain), config),
          Meter(ApplyGainDb(*mixed.stems.speech, gain), config)};
}

double Value(const Measurement& m, const char* what) {
  if (!m.ok()) {
    throw Error(ErrorCode::kValidation,
                std::string(what) + " is " + std::string(StatusName(m.status)));
  }
  return *m.value;
}

double GatedBiasPoint(const MixedProgram& mixed, const ActivitySidecar* sidecar,
                      const HarnessOptions& options) {
  const AnalysisConfig& config = options.analysis;
  const Normalized n = Normalize(mixed, options);
  const SpeechActivity activity = ActivityFor(n.speech, sidecar, config);
  const double gated = Value(
      SpeechGatedLoudnessFromSeries(n.mix, activity, config), "gated loudness");
  const double sl =
      Value(SpeechLoudnessFromSeries(n.speech, config), "speech loudness");
  return gated - sl;
}

double LdrPoint(const MixedProgram& mixed, const ActivitySidecar* /*sidecar*/,
                const HarnessOptions& options) {
  const AnalysisConfig& config = options.analysis;
  const Normalized n = Normalize(mixed, options);
  const Measurement ldr =
      Ldr(IntegratedFromSeries(n.mix, config.meter),
          SpeechLoudnessFromSeries(n.speech, config));
  return Value(ldr, "LDR");
}

struct PairErrors {
  bool ok = false;
  std::string error;
  std::optional<double> integrated_sl;
  std::optional<double> integrated_sbld;
  std::vector<double> short_term_sl;
  std::vector<double> short_term_sbld;
};

PairErrors Compare(const Analysis& truth, const Analysis& estimate,
                   bool with_sbld) {
  PairErrors out;
  out.ok = true;
  const MacroReport& t = truth.macro;
  const MacroReport& e = estimate.macro;
  if (t.speech_loudness.ok() && e.speech_loudness.has_value()) {
    out.integrated_sl = std::fabs(*e.speech_loudness.value -
                                  *t.speech_loudness.value);
  }
  if (with_sbld && t.sbld_integrated.ok() && e.sbld_integrated.has_value()) {
    out.integrated_sbld = std::fabs(*e.sbld_integrated.value -
                                    *t.sbld_integrated.value);
  }
  if (!truth.micro || !estimate.micro) return out;
  const MicroTimelines& tm = *truth.micro;
  const MicroTimelines& em = *estimate.micro;
  const std::size_t hops =
      std::min(tm.speech_short_term.size(), em.speech_short_term.size());
  for (std::size_t k = 0; k < hops; ++k) {
    if (!truth.activity.mask[k]) continue;
    const double ts = tm.speech_short_term[k];
    const double es = em.speech_short_term[k];
    if (std::isfinite(ts) && std::isfinite(es)) {
      out.short_term_sl.push_back(std::fabs(es - ts));
    }
    if (with_sbld && tm.local_sbld[k] && em.local_sbld[k]) {
      out.short_term_sbld.push_back(
          std::fabs(*em.local_sbld[k] - *tm.local_sbld[k]));
    }
  }
  return out;
}

void Pool(const PairErrors& e, std::vector<double>* sl,
          std::vector<double>* sbld, std::vector<double>* st_sl,
          std::vector<double>* st_sbld) {
  if (e.integrated_sl) sl->push_back(*e.integrated_sl);
  if (e.integrated_sbld) sbld->push_back(*e.integrated_sbld);
  st_sl->insert(st_sl->end(), e.short_term_sl.begin(), e.short_term_sl.end());
  st_sbld->insert(st_sbld->end(), e.short_term_sbld.begin(),
                  e.short_term_sbld.end());
}

}  // namespace

std::string_view AlignPolicyName(AlignPolicy policy) {
  return policy == AlignPolicy::kPad ? "pad" : "loop";
}

AlignPolicy ParseAlignPolicy(std::string_view name) {
  if (name == "pad") return AlignPolicy::kPad;
  if (name == "loop") return AlignPolicy::kLoop;
  throw Error(ErrorCode::kUsage,
              "unknown align policy '" + std::string(name) + "'");
}

AudioBuffer AlignBackground(const AudioBuffer& background,
                            const AudioBuffer& speech, AlignPolicy policy,
                            std::uint64_t seed) {
  if (background.sample_rate() != speech.sample_rate()) {
    throw Error(ErrorCode::kAlignment,
                "background and speech sample rates differ");
  }
  AudioBuffer bg = background;
  if (bg.layout() != speech.layout()) {
    if (bg.num_channels() != 1) {
      throw Error(ErrorCode::kAlignment,
                  "background and speech channel layouts differ");
    }
    bg = Upmix(bg, speech.layout());
  }
  const std::size_t want = speech.num_frames();
  const std::size_t have = bg.num_frames();
  if (have == want) return bg;
  if (policy == AlignPolicy::kPad || have == 0) {
    bg.Resize(want);
    return bg;
  }
  Rng rng(seed);
  const std::size_t offset =
      have > want ? static_cast<std::size_t>(rng.Next() % (have - want + 1))
                  : static_cast<std::size_t>(rng.Next() % have);
  AudioBuffer out(bg.sample_rate(), bg.layout(), want);
  for (std::size_t c = 0; c < bg.num_channels(); ++c) {
    const auto src = bg.channel(c);
    auto dst = out.mutable_channel(c);
    for (std::size_t i = 0; i < want; ++i) dst[i] = src[(offset + i) % have];
  }
  return out;
}

MixedProgram MixAtSbld(const AudioBuffer& speech, const AudioBuffer& background,
                       const MixSpec& spec, const ActivitySidecar* activity,
                       const AnalysisConfig& config) {
  if (!std::isfinite(spec.target_sbld_lu)) {
    throw Error(ErrorCode::kValidation, "target SBLD must be finite");
  }
  config.Validate();
  const AudioBuffer bg =
      AlignBackground(background, speech, spec.align, spec.seed);
  const EnergySeries s = Meter(speech, config);
  const SpeechActivity act = ActivityFor(s, activity, config);
  if (act.empty()) {
    throw Error(ErrorCode::kSilentStem, "speech stem has no active region");
  }
  const Measurement initial =
      SbldIntegratedFromSeries(s, Meter(bg, config), act, config);
  if (!initial.ok()) {
    throw Error(ErrorCode::kSilentStem,
                std::string(initial.status == Status::kCapped
                                ? "background"
                                : "speech") +
                    " stem is silent over the active region");
  }
  MixedProgram out;
  // SBLD falls by exactly the background gain in dB.
  out.background_gain_db = *initial.value - spec.target_sbld_lu;
  AudioBuffer scaled = ApplyGainDb(bg, out.background_gain_db);
  const Measurement check =
      SbldIntegratedFromSeries(s, Meter(scaled, config), act, config);
  if (!check.ok()) {
    throw Error(ErrorCode::kSilentStem, "background vanished after scaling");
  }
  out.measured_sbld_lu = *check.value;
  out.stems.mix = Add(speech, scaled);
  out.stems.speech = speech;
  out.stems.background = std::move(scaled);
  return out;
}

double UncorrelatedSumPrediction(double sbld_lu) {
  return 10.0 * std::log10(1.0 + std::pow(10.0, -sbld_lu / 10.0));
}

Curve GatedBiasCurve(const std::vector<StemPair>& corpus,
                     const std::vector<double>& sbld_grid,
                     const HarnessOptions& options) {
  return RunCurve("gated_bias", &GatedBiasPoint, corpus, sbld_grid, options);
}

Curve LdrSbldCurve(const std::vector<StemPair>& corpus,
                   const std::vector<double>& sbld_grid,
                   const HarnessOptions& options) {
  return RunCurve("ldr", &LdrPoint, corpus, sbld_grid, options);
}

Analysis AnalyzeForHarness(const StemSet& stems, const ActivitySidecar* sidecar,
                           const AnalysisConfig& config) {
  if (!stems.complete()) {
    throw Error(ErrorCode::kUsage, "harness analysis needs all three stems");
  }
  ProgramEnergies energies;
  energies.sample_rate = stems.mix->sample_rate();
  energies.num_channels = stems.mix->num_channels();
  energies.mix = Meter(*stems.mix, config);
  energies.speech = Meter(*stems.speech, config);
  energies.background = Meter(*stems.background, config);
  Analysis a = Analyze(energies, sidecar, config);
  a.macro.sample_peak = Measurement::Missing(Status::kUnavailable);
  a.macro.true_peak = Measurement::Missing(Status::kUnavailable);
  return a;
}

MaeReport EvaluateSeparator(const std::vector<StemPair>& corpus,
                            const Separator& separator,
                            const std::vector<double>& sbld_conditions,
                            const HarnessOptions& options) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kValidation, "corpus is empty");
  }
  options.analysis.Validate();
  // Last condition is speech only.
  const std::size_t num_conditions = sbld_conditions.size() + 1;
  const std::size_t n = corpus.size() * num_conditions;
  std::vector<PairErrors> results(n);
  ParallelFor(n, options.jobs, [&](std::size_t i) {
    const std::size_t p = i / num_conditions;
    const std::size_t c = i % num_conditions;
    const bool speech_only = c == sbld_conditions.size();
    try {
      const StemPair& pair = corpus[p];
      StemSet truth;
      if (speech_only) {
        truth.mix = pair.speech;
        truth.speech = pair.speech;
        truth.background =
            AudioBuffer(pair.speech.sample_rate(), pair.speech.layout(),
                        pair.speech.num_frames());
      } else {
        MixSpec spec{sbld_conditions[c], options.align,
                     ItemSeed(options.seed, p, c)};
        truth = MixAtSbld(pair.speech, pair.background, spec,
                          pair.activity ? &*pair.activity : nullptr,
                          options.analysis)
                    .stems;
      }
      const StemSet estimate = separator.Separate(*truth.mix, &truth, nullptr);
      results[i] = Compare(AnalyzeForHarness(truth, nullptr, options.analysis),
                           AnalyzeForHarness(estimate, nullptr,
                                             options.analysis),
                           !speech_only);
    } catch (const std::exception& e) {
      results[i].ok = false;
      results[i].error = e.what();
    }
  });

  MaeReport report;
  report.separator = separator.name();
  std::vector<double> all_sl, all_sbld, all_st_sl, all_st_sbld;
  for (std::size_t c = 0; c < num_conditions; ++c) {
    const bool speech_only = c == sbld_conditions.size();
    ConditionMae cond;
    if (speech_only) {
      cond.label = "speech_only";
    } else {
      cond.label = ConditionLabel(sbld_conditions[c]);
      cond.sbld_lu = sbld_conditions[c];
    }
    std::vector<double> sl, sbld, st_sl, st_sbld;
    for (std::size_t p = 0; p < corpus.size(); ++p) {
      const PairErrors& e = results[p * num_conditions + c];
      if (!e.ok) {
        ++cond.pairs_failed;
        report.failures.push_back({corpus[p].id, cond.label, e.error});
        continue;
      }
      ++cond.pairs_ok;
      Pool(e, &sl, &sbld, &st_sl, &st_sbld);
      Pool(e, &all_sl, &all_sbld, &all_st_sl, &all_st_sbld);
    }
    RequireSuccess(cond.pairs_ok, corpus.size(), options.min_success_fraction,
                   "evaluation at " + cond.label);
    cond.integrated_sl = Summarize(sl);
    cond.integrated_sbld = Summarize(sbld);
    cond.short_term_sl = Summarize(st_sl);
    cond.short_term_sbld = Summarize(st_sbld);
    report.conditions.push_back(std::move(cond));
  }
  ConditionMae overall;
  overall.label = "overall";
  for (const ConditionMae& c : report.conditions) {
    overall.pairs_ok += c.pairs_ok;
    overall.pairs_failed += c.pairs_failed;
  }
  overall.integrated_sl = Summarize(all_sl);
  overall.integrated_sbld = Summarize(all_sbld);
  overall.short_term_sl = Summarize(all_st_sl);
  overall.short_term_sbld = Summarize(all_st_sbld);
  report.conditions.push_back(std::move(overall));
  return report;
}

void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& t : threads) t.join();
}

std::vector<StemPair> LoadCorpus(const std::filesystem::path& root,
                                 Diagnostics* diag) {
  namespace fs = std::filesystem;
  fs::path dir = root / "pairs";
  if (!fs::is_directory(dir)) dir = root;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "corpus directory not found: " + root.string());
  }
  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());
  std::vector<StemPair> corpus;
  for (const fs::path& p : entries) {
    if (!fs::exists(p / "speech.wav") || !fs::exists(p / "background.wav")) {
      Warn(diag, "skipping " + p.filename().string() +
                     ": speech.wav or background.wav missing");
      continue;
    }
    StemPair pair;
    pair.id = p.filename().string();
    pair.speech = ReadWav(p / "speech.wav");
    pair.background = ReadWav(p / "background.wav");
    if (fs::exists(p / "activity.csv")) {
      pair.activity = LoadActivity(p / "activity.csv", diag);
    }
    corpus.push_back(std::move(pair));
  }
  if (corpus.empty()) {
    throw Error(ErrorCode::kValidation,
                "no stem pairs found under " + dir.string());
  }
  return corpus;
}

void WriteCorpus(const std::filesystem::path& root,
                 const std::vector<StemPair>& corpus) {
  namespace fs = std::filesystem;
  for (const StemPair& pair : corpus) {
    const fs::path dir = root / "pairs" / pair.id;
    fs::create_directories(dir);
    WriteWav(dir / "speech.wav", pair.speech, SampleFormat::kFloat32);
    WriteWav(dir / "background.wav", pair.background, SampleFormat::kFloat32);
    if (pair.activity) SaveActivity(dir / "activity.csv", *pair.activity);
  }
}

std::vector<StemPair> GenerateCorpus(std::size_t count, double duration_s,
                                     std::uint64_t seed, int sample_rate) {
  std::vector<StemPair> corpus(count);
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticPair synth =
        SynthesizePair(duration_s, ItemSeed(seed, i, 0), sample_rate);
    char id[32];
    std::snprintf(id, sizeof id, "pair-%03zu", i);
    corpus[i].id = id;
    corpus[i].speech = std::move(synth.speech);
    corpus[i].background = std::move(synth.background);
    corpus[i].activity = std::move(synth.activity);
  }
  return corpus;
}

}  // namespace speechqc
