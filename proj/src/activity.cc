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

#include "speechqc/activity.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "speechqc/error.h"
#include "speechqc/io_util.h"

namespace speechqc {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

double ParseSeconds(std::string_view field, int line, const char* what) {
  field = Trim(field);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw LineError(std::string("malformed ") + what + " '" +
                        std::string(field) + "'",
                    line);
  }
  return value;
}

// Shortest representation that parses back to the same double.
std::string FormatSeconds(double s) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view ActivitySourceName(ActivitySource source) {
  switch (source) {
    case ActivitySource::kOracle:
      return "oracle";
    case ActivitySource::kDerived:
      return "derived";
    case ActivitySource::kExternal:
      return "external";
  }
  return "unknown";
}

double ActivitySidecar::coverage_s() const {
  double total = 0.0;
  for (const Interval& iv : intervals) total += iv.duration();
  return total;
}

int NormalizeIntervals(std::vector<Interval>& intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) {
              return a.start_s < b.start_s ||
                     (a.start_s == b.start_s && a.end_s < b.end_s);
            });
  int merges = 0;
  std::vector<Interval> merged;
  for (const Interval& iv : intervals) {
    if (!merged.empty() && iv.start_s <= merged.back().end_s) {
      merged.back().end_s = std::max(merged.back().end_s, iv.end_s);
      ++merges;
    } else {
      merged.push_back(iv);
    }
  }
  intervals = std::move(merged);
  return merges;
}

ActivitySidecar ParseActivity(std::string_view text, Diagnostics* diag) {
  ActivitySidecar activity;
  int line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view()
                                         : text.substr(eol + 1);
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw LineError("expected 'start_seconds,end_seconds'", line_no);
    }
    const double start = ParseSeconds(line.substr(0, comma), line_no, "start");
    const double end = ParseSeconds(line.substr(comma + 1), line_no, "end");
    if (start < 0.0 || end < 0.0) {
      throw LineError("negative time", line_no);
    }
    if (end <= start) {
      throw LineError("end time must be greater than start time", line_no);
    }
    activity.intervals.push_back({start, end});
  }
  const int merges = NormalizeIntervals(activity.intervals);
  if (merges > 0) {
    Warn(diag, "activity: merged " + std::to_string(merges) +
                   " overlapping or adjacent interval(s)");
  }
  return activity;
}

ActivitySidecar LoadActivity(const std::filesystem::path& path,
                             Diagnostics* diag) {
  const std::string text = ReadFileText(path);
  try {
    return ParseActivity(text, diag);
  } catch (const LineError& e) {
    throw LineError(path.string() + ": " + e.what(), e.line());
  }
}

std::string FormatActivity(const ActivitySidecar& activity) {
  std::string out;
  for (const Interval& iv : activity.intervals) {
    out += FormatSeconds(iv.start_s) + "," + FormatSeconds(iv.end_s) + "\n";
  }
  return out;
}

void SaveActivity(const std::filesystem::path& path,
                  const ActivitySidecar& activity) {
  WriteFileAtomic(path, FormatActivity(activity));
}

ActivitySidecar ClipToDuration(const ActivitySidecar& activity,
                               double duration_s, Diagnostics* diag) {
  ActivitySidecar out;
  out.source = activity.source;
  bool clipped = false;
  for (const Interval& iv : activity.intervals) {
    if (iv.start_s >= duration_s) {
      clipped = true;
      continue;
    }
    if (iv.end_s > duration_s) clipped = true;
    out.intervals.push_back({iv.start_s, std::min(iv.end_s, duration_s)});
  }
  if (clipped) {
    Warn(diag, "activity: intervals beyond the program end were clipped");
  }
  return out;
}

bool IntervalsContain(const std::vector<Interval>& intervals, double t) {
  auto it = std::upper_bound(
      intervals.begin(), intervals.end(), t,
      [](double v, const Interval& iv) { return v < iv.start_s; });
  if (it == intervals.begin()) return false;
  return std::prev(it)->Contains(t);
}

}  // namespace speechqc
