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

#ifndef SPEECHQC_ACTIVITY_H_
#define SPEECHQC_ACTIVITY_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "speechqc/diagnostics.h"

namespace speechqc {

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
  bool Contains(double t) const { return t >= start_s && t < end_s; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class ActivitySource { kOracle, kDerived, kExternal };

std::string_view ActivitySourceName(ActivitySource source);

// Speech activity as continuous time intervals. Intervals are sorted,
// non-overlapping and have end > start >= 0.
struct ActivitySidecar {
  std::vector<Interval> intervals;
  ActivitySource source = ActivitySource::kOracle;

  double coverage_s() const;
  friend bool operator==(const ActivitySidecar&,
                         const ActivitySidecar&) = default;
};

// Parses `start_seconds,end_seconds` lines. Blank lines and lines starting
// with '#' are ignored. Intervals are sorted and overlapping or touching
// ones merged, with one warning per merge. Throws LineError for malformed
// numbers, negative times or end <= start.
ActivitySidecar ParseActivity(std::string_view text,
                              Diagnostics* diag = nullptr);
ActivitySidecar LoadActivity(const std::filesystem::path& path,
                             Diagnostics* diag = nullptr);

std::string FormatActivity(const ActivitySidecar& activity);
void SaveActivity(const std::filesystem::path& path,
                  const ActivitySidecar& activity);

// Sorts and merges overlapping/touching intervals in place; returns the
// number of merges performed.
int NormalizeIntervals(std::vector<Interval>& intervals);

// Drops intervals starting at or after `duration_s` and clips the rest.
ActivitySidecar ClipToDuration(const ActivitySidecar& activity,
                               double duration_s, Diagnostics* diag = nullptr);

// True if `t` lies in one of the sorted intervals.
bool IntervalsContain(const std::vector<Interval>& intervals, double t);

}  // namespace speechqc

#endif  // SPEECHQC_ACTIVITY_H_
