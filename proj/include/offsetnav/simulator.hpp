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

// Deterministic desk-scale ground-vehicle world: terrain profiles with
// parametric multi-modal feature generators, setback injection (slip, drag,
// roughness, inertia, noise), a scripted expert for demonstrations, and a
// closed-loop runner for trained models.
//
// The vehicle follows a straight reference path along +x starting at the
// origin; behavior vectors are (linear speed m/s, angular rate rad/s).

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "offsetnav/model.hpp"
#include "offsetnav/predictor.hpp"

namespace offsetnav::sim {

inline constexpr int kBehaviorDim = 2;
inline constexpr double kDefaultDt = 1.0 / 30.0;

struct SetbackModel {
  double slip = 0.0;       // fraction of command lost to wheel slip
  double drag = 0.0;       // fraction lost to payload / tire pressure
  double roughness = 0.0;  // terrain roughness amplitude
  std::vector<double> noise_std = {0.0, 0.0};  // per behavior channel
  double inertia = 0.0;    // weight of the previous actual behavior

  // Throws InvalidProfile.
  void validate() const;
};

struct FeatureParams {
  double texture_freq = 2.0;  // rad/m of the texture sinusoid bundle
  double texture_amp = 0.2;
  double shape_level = 0.5;   // center of the shape histogram, in [0, 1]
};

struct TerrainSegment {
  std::string name;
  double length = 1.0;  // meters
  FeatureParams features;
  SetbackModel setback;
};

struct TerrainProfile {
  std::string name;
  std::vector<TerrainSegment> segments;
  std::uint64_t terrain_seed = 1;  // fixed micro-structure of the terrain
  int noise_modality = -1;         // modality replaced by pure noise, -1 for none
  double sensor_noise = 0.01;      // std of additive feature noise

  double total_length() const;
  // Segment covering arc length s (the last one extends past the end).
  const TerrainSegment& at(double s) const;
  void validate() const;
};

// Named presets: grass, sand, gravel, medium_rock, large_rock,
// grass_to_large_rock, mixed_1, mixed_2. Throws InvalidProfile.
TerrainProfile preset(const std::string& name);
std::vector<std::string> preset_names();
// The single-terrain presets used to collect demonstrations.
std::vector<std::string> individual_presets();
// Copy of `profile` with every segment's slip set to `slip`.
TerrainProfile with_slip(TerrainProfile profile, double slip);

// Scripted demonstrator: target speed shrinks with local roughness, heading
// control pulls the vehicle back onto the path.
struct ExpertPolicy {
  std::string id = "terrain_speed";
  double v_max = 1.0;
  double v_min = 0.1;
  double kappa = 0.8;  // speed reduction per unit local roughness
  double k_lateral = 1.0;
  double k_heading = 2.0;
  double omega_max = 0.5;

  // Throws InvalidProfile for an unknown id.
  static ExpertPolicy by_id(const std::string& id);
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

struct Step {
  Vector frame;     // length q
  Vector expected;  // length r
  Vector actual;    // length r
  Pose pose;        // pose after executing the step
};

struct Episode {
  std::vector<Step> steps;
  double dt = kDefaultDt;
  std::uint64_t seed = 0;
};

// Feature frame observed at arc length s; `rng` drives the sensor noise.
Vector sense(const TerrainProfile& profile, const ModalityLayout& layout, double s,
             std::mt19937_64& rng);

// One step of the setback model:
//   out = inertia * previous + (1 - inertia) * (1 - slip - drag) * command + noise
// with noise scaled by (1 + roughness); speed is clamped to
// [0, command speed * (1 + roughness)].
Vector apply_setback(const SetbackModel& setback, const Vector& command, const Vector& previous,
                     std::mt19937_64& rng);

// Local roughness under the vehicle, including the fixed micro-structure.
double local_roughness(const TerrainProfile& profile, double s);

Episode generate_episode(const TerrainProfile& profile, const ModalityLayout& layout,
                         const ExpertPolicy& expert, int n_steps, double dt,
                         std::uint64_t seed);

TrainingSet episodes_to_training_set(const std::vector<Episode>& episodes,
                                     const ModalityLayout& layout);

enum class Mode { kFeedforward, kWithOffset };
const char* mode_name(Mode mode);
Mode parse_mode(const std::string& name);

struct ClosedLoopOptions {
  InverseMode inverse = InverseMode::kPseudoInverse;
  double inverse_cutoff = 1e-3;  // relative singular-value cutoff for the pseudo-inverse
  ExpertPolicy reference;        // drives the expected pose stream
  double corridor = 1.0;     // max |lateral error| in meters
  double stall_speed = 0.01; // m/s
  double stall_time = 2.0;   // seconds below stall_speed before failing
  double max_speed = 2.0;    // command clipping
  double max_turn = 1.0;
};

struct ClosedLoopRun {
  Episode episode;                  // frames, expected (intent), actual, poses
  // Reference expert driving the same terrain without setbacks, until it
  // reaches the goal. May be longer or shorter than actual_poses.
  std::vector<Pose> expected_poses;
  std::vector<Pose> actual_poses;   // integration of the actual behaviors
  std::vector<Vector> commands;
  bool failed = false;
  std::string failure_reason;
  bool reached_end = false;
  double traversal_time = 0.0;
};

ClosedLoopRun closed_loop_run(const TerrainProfile& profile, const WeightW& w,
                              const WeightU& u, Mode mode, int n_steps, double dt,
                              std::uint64_t seed, const ClosedLoopOptions& opts = {});

// One run per seed, in seed order; runs execute in parallel.
std::vector<ClosedLoopRun> closed_loop_batch(const TerrainProfile& profile, const WeightW& w,
                                             const WeightU& u, Mode mode, int n_steps,
                                             double dt, const std::vector<std::uint64_t>& seeds,
                                             const ClosedLoopOptions& opts = {});

}  // namespace offsetnav::sim
