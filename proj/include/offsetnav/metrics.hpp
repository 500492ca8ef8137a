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

#pragma once

// Evaluation metrics over closed-loop runs: failure rate, traversal time,
// inconsistency and jerkiness.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offsetnav/simulator.hpp"

namespace offsetnav::metrics {

struct RunMetrics {
  bool failed = false;
  double traversal_time = 0.0;  // seconds
  double inconsistency = 0.0;
  double jerkiness = 0.0;       // m/s^3
};

// Sum over steps of squared position error plus squared wrapped heading error
// (1 m^2 per rad^2). Throws LengthMismatch.
double inconsistency(std::span<const sim::Pose> expected, std::span<const sim::Pose> actual);

// Mean over steps of sum_axes |d^3 p / dt^3|, central third differences in
// the interior and one-sided ones at the edges. Throws TooShort below 4 poses.
double jerkiness(std::span<const sim::Pose> trajectory, double dt);

RunMetrics evaluate(const sim::ClosedLoopRun& run);

struct Summary {
  int runs = 0;
  int failures = 0;
  double failure_rate = 0.0;
  // Means over successful runs; empty when every run failed.
  std::optional<double> traversal_time;
  std::optional<double> inconsistency;
  std::optional<double> jerkiness;
};

// Throws EmptyInput.
Summary aggregate(std::span<const RunMetrics> runs);

// Aligned text table, one row per (label, summary).
std::string format_table(const std::vector<std::pair<std::string, Summary>>& rows);

}  // namespace offsetnav::metrics
