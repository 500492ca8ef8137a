// Copyright 2026 The offsetnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "offsetnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "offsetnav/errors.hpp"

namespace offsetnav::metrics {

double inconsistency(std::span<const sim::Pose> expected, std::span<const sim::Pose> actual) {
  if (expected.size() != actual.size())
    throw LengthMismatch("pose streams have lengths " + std::to_string(expected.size()) +
                         " and " + std::to_string(actual.size()));
  double total = 0.0;
  for (size_t i = 0; i < expected.size(); ++i) {
    const double dx = expected[i].x - actual[i].x;
    const double dy = expected[i].y - actual[i].y;
    const double dh = std::remainder(expected[i].heading - actual[i].heading, 2.0 * std::numbers::pi);
    total += dx * dx + dy * dy + dh * dh;
  }
  return total;
}

double jerkiness(std::span<const sim::Pose> p, double dt) {
  const long n = static_cast<long>(p.size());
  if (n < 4) throw TooShort("jerkiness needs at least 4 poses, got " + std::to_string(n));
  const double scale = 1.0 / (dt * dt * dt);
  auto third = [&](auto get, long i) -> std::optional<double> {
    if (i >= 2 && i + 2 < n)
      return (get(i + 2) - 2.0 * get(i + 1) + 2.0 * get(i - 1) - get(i - 2)) / 2.0;
    if (i + 3 < n) return get(i + 3) - 3.0 * get(i + 2) + 3.0 * get(i + 1) - get(i);
    if (i >= 3) return get(i) - 3.0 * get(i - 1) + 3.0 * get(i - 2) - get(i - 3);
    return std::nullopt;
  };
  const auto px = [&](long i) { return p[i].x; };
  const auto py = [&](long i) { return p[i].y; };
  double sum = 0.0;
  long valid = 0;
  for (long i = 0; i < n; ++i) {
    const auto jx = third(px, i);
    if (!jx) continue;
    sum += (std::abs(*jx) + std::abs(*third(py, i))) * scale;
    ++valid;
  }
  return sum / static_cast<double>(valid);
}

RunMetrics evaluate(const sim::ClosedLoopRun& run) {
  RunMetrics m;
  m.failed = run.failed;
  if (run.failed) return m;
  m.traversal_time = run.traversal_time;
  // Whichever stream arrives first waits at its final pose.
  std::vector<sim::Pose> expected = run.expected_poses, actual = run.actual_poses;
  const std::size_t len = std::max(expected.size(), actual.size());
  if (!expected.empty()) expected.resize(len, expected.back());
  if (!actual.empty()) actual.resize(len, actual.back());
  m.inconsistency = inconsistency(expected, actual);
  // Trajectory starts at the origin pose.
  std::vector<sim::Pose> path{sim::Pose{}};
  path.insert(path.end(), run.actual_poses.begin(), run.actual_poses.end());
  m.jerkiness = jerkiness(path, run.episode.dt);
  return m;
}

Summary aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw EmptyInput("aggregate needs at least one run");
  Summary s;
  s.runs = static_cast<int>(runs.size());
  double tt = 0.0, inc = 0.0, jerk = 0.0;
  for (const auto& r : runs) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    tt += r.traversal_time;
    inc += r.inconsistency;
    jerk += r.jerkiness;
  }
  s.failure_rate = static_cast<double>(s.failures) / s.runs;
  const int ok = s.runs - s.failures;
  if (ok > 0) {
    s.traversal_time = tt / ok;
    s.inconsistency = inc / ok;
    s.jerkiness = jerk / ok;
  }
  return s;
}

std::string format_table(const std::vector<std::pair<std::string, Summary>>& rows) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %12s %18s %16s %18s\n", "mode", "failure rate",
                "traversal time (s)", "inconsistency", "jerkiness (m/s^3)");
  out += line;
  auto cell = [](const std::optional<double>& v) {
    char buf[32];
    if (v)
      std::snprintf(buf, sizeof buf, "%.4f", *v);
    else
      std::snprintf(buf, sizeof buf, "-");
    return std::string(buf);
  };
  for (const auto& [label, s] : rows) {
    char rate[32];
    std::snprintf(rate, sizeof rate, "%d/%d", s.failures, s.runs);
    std::snprintf(line, sizeof line, "%-24s %12s %18s %16s %18s\n", label.c_str(), rate,
                  cell(s.traversal_time).c_str(), cell(s.inconsistency).c_str(),
                  cell(s.jerkiness).c_str());
    out += line;
  }
  return out;
}

}  // namespace offsetnav::metrics
