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

#include "offsetnav/simulator.hpp"

#include <algorithm>
#include <deque>
#include <cmath>
#include <numbers>
#include <string>

#include "offsetnav/errors.hpp"

namespace offsetnav::sim {

namespace {

constexpr double kCell = 0.02;        // micro-structure cell size, m
constexpr double kMicroAmp = 0.3;     // relative amplitude of micro roughness
constexpr int kTexture = 0, kShape = 1, kGeometry = 2;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1], fixed per (seed, stream, cell).
double cell_value(std::uint64_t seed, std::uint64_t stream, double s) {
  const auto cell = static_cast<std::int64_t>(std::floor(s / kCell));
  const std::uint64_t h =
      splitmix(splitmix(seed ^ (stream * 0x632be59bd9b4e019ULL)) + static_cast<std::uint64_t>(cell));
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

double segment_roughness(const TerrainProfile& p, double s) { return p.at(s).setback.roughness; }

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

void integrate(Pose& pose, double v, double omega, double dt) {
  pose.x += v * std::cos(pose.heading) * dt;
  pose.y += v * std::sin(pose.heading) * dt;
  pose.heading = wrap(pose.heading + omega * dt);
}

Vector expert_behavior(const ExpertPolicy& ex, const TerrainProfile& profile, const Pose& pose) {
  Vector y(kBehaviorDim);
  const double flat = 1.0 - ex.kappa * local_roughness(profile, pose.x);
  y(0) = std::clamp(ex.v_max * flat, ex.v_min, ex.v_max);
  y(1) = std::clamp(-ex.k_lateral * pose.y - ex.k_heading * wrap(pose.heading), -ex.omega_max,
                    ex.omega_max);
  return y;
}

void check_layout(const ModalityLayout& layout) {
  if (layout.behavior_dim() != kBehaviorDim)
    throw DimensionMismatch("simulator behaviors are (speed, turn rate): r must be 2");
}

}  // namespace

void SetbackModel::validate() const {
  if (!(slip >= 0.0 && slip < 1.0)) throw InvalidProfile("slip must be in [0, 1)");
  if (!(drag >= 0.0 && drag < 1.0)) throw InvalidProfile("drag must be in [0, 1)");
  if (!(slip + drag < 1.0)) throw InvalidProfile("slip + drag must be < 1");
  if (!(roughness >= 0.0)) throw InvalidProfile("roughness must be >= 0");
  if (!(inertia >= 0.0 && inertia < 1.0)) throw InvalidProfile("inertia must be in [0, 1)");
  for (double sd : noise_std)
    if (!(sd >= 0.0)) throw InvalidProfile("noise_std must be >= 0");
}

double TerrainProfile::total_length() const {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.length;
  return total;
}

const TerrainSegment& TerrainProfile::at(double s) const {
  if (segments.empty()) throw InvalidProfile("profile has no segments");
  double start = 0.0;
  for (const auto& seg : segments) {
    start += seg.length;
    if (s < start) return seg;
  }
  return segments.back();
}

void TerrainProfile::validate() const {
  if (segments.empty()) throw InvalidProfile("profile '" + name + "' has no segments");
  for (const auto& seg : segments) {
    if (!(seg.length > 0.0)) throw InvalidProfile("segment '" + seg.name + "' has length <= 0");
    seg.setback.validate();
  }
  if (!(total_length() > 0.0)) throw InvalidProfile("profile length must be > 0");
  if (!(sensor_noise >= 0.0)) throw InvalidProfile("sensor_noise must be >= 0");
}

Vector apply_setback(const SetbackModel& sb, const Vector& command, const Vector& previous,
               std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(command.size());
  const double gain = 1.0 - sb.slip - sb.drag;
  for (int j = 0; j < command.size(); ++j) {
    const double sd = j < static_cast<int>(sb.noise_std.size()) ? sb.noise_std[j] : 0.0;
    const double noise = sd > 0.0 ? sd * (1.0 + sb.roughness) * normal(rng) : 0.0;
    out(j) = sb.inertia * previous(j) + (1.0 - sb.inertia) * gain * command(j) + noise;
  }
  // Displacement per step never exceeds the commanded speed times (1 + roughness).
  const double cap = std::max(command(0), 0.0) * (1.0 + sb.roughness);
  out(0) = std::clamp(out(0), 0.0, cap);
  return out;
}

double local_roughness(const TerrainProfile& profile, double s) {
  return segment_roughness(profile, s) *
         (1.0 + kMicroAmp * cell_value(profile.terrain_seed, 0, s));
}

Vector sense(const TerrainProfile& profile, const ModalityLayout& layout, double s,
             std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& seg = profile.at(s);
  const double rough = segment_roughness(profile, s);
  Vector frame(layout.frame_dim());
  for (int m = 0; m < layout.modalities(); ++m) {
    const int width = layout.width(m);
    auto out = frame.segment(layout.modality_offset(m), width);
    if (m == profile.noise_modality) {
      for (int j = 0; j < width; ++j) out(j) = normal(rng);
      continue;
    }
    switch (m % 3) {
      case kTexture:
        for (int j = 0; j < width; ++j)
          out(j) = 0.5 + seg.features.texture_amp *
                             std::sin(seg.features.texture_freq * (j + 1) * s + 0.7 * j);
        break;
      case kShape: {
        // Normalized histogram of oriented gradients centered at shape_level.
        const double center = seg.features.shape_level + 0.1 * std::sin(0.8 * s);
        double sum = 0.0;
        for (int j = 0; j < width; ++j) {
          const double pos = width == 1 ? 0.0 : static_cast<double>(j) / (width - 1);
          out(j) = std::exp(-(pos - center) * (pos - center) / (2.0 * 0.15 * 0.15));
          sum += out(j);
        }
        out /= sum;
        break;
      }
      case kGeometry:
        // Flatness under the wheels, then independent elevation statistics.
        out(0) = 1.0 - 0.8 * local_roughness(profile, s);
        for (int j = 1; j < width; ++j)
          out(j) = rough * (1.0 + kMicroAmp * cell_value(profile.terrain_seed, j, s));
        break;
    }
    if (profile.sensor_noise > 0.0)
      for (int j = 0; j < width; ++j) out(j) += profile.sensor_noise * normal(rng);
  }
  return frame;
}

ExpertPolicy ExpertPolicy::by_id(const std::string& id) {
  if (id == "terrain_speed") return ExpertPolicy{};
  if (id == "cautious") {
    ExpertPolicy p;
    p.id = id;
    p.v_max = 0.6;
    return p;
  }
  throw InvalidProfile("unknown expert policy '" + id + "'");
}

Episode generate_episode(const TerrainProfile& profile, const ModalityLayout& layout,
                         const ExpertPolicy& expert, int n_steps, double dt,
                         std::uint64_t seed) {
  profile.validate();
  check_layout(layout);
  if (n_steps < layout.history())
    throw InvalidProfile("n_steps (" + std::to_string(n_steps) + ") must be >= history length c (" +
                         std::to_string(layout.history()) + ")");
  if (!(dt > 0.0)) throw InvalidProfile("dt must be > 0");

  std::mt19937_64 sensor_rng(splitmix(seed) ^ 0x5e45u);
  std::mt19937_64 plant_rng(splitmix(seed + 1));
  Episode ep;
  ep.dt = dt;
  ep.seed = seed;
  ep.steps.reserve(n_steps);
  Pose pose;
  Vector previous = Vector::Zero(kBehaviorDim);
  for (int t = 0; t < n_steps; ++t) {
    Step step;
    step.frame = sense(profile, layout, pose.x, sensor_rng);
    step.expected = expert_behavior(expert, profile, pose);
    step.actual = apply_setback(profile.at(pose.x).setback, step.expected, previous, plant_rng);
    integrate(pose, step.actual(0), step.actual(1), dt);
    step.pose = pose;
    previous = step.actual;
    ep.steps.push_back(std::move(step));
  }
  return ep;
}

TrainingSet episodes_to_training_set(const std::vector<Episode>& episodes,
                                     const ModalityLayout& layout) {
  const int c = layout.history();
  long n = 0;
  for (const auto& ep : episodes) {
    if (static_cast<int>(ep.steps.size()) < c)
      throw DimensionMismatch("episode shorter than history length c");
    n += static_cast<long>(ep.steps.size()) - c + 1;
  }
  TrainingSet data{layout, Matrix(layout.feature_dim(), n), Matrix(layout.behavior_dim(), n),
                   Matrix(layout.behavior_dim(), n), Matrix(layout.difference_dim(), n)};
  std::vector<Vector> frames(c), expected(c), actual(c);
  long col = 0;
  for (const auto& ep : episodes) {
    for (int t = c - 1; t < static_cast<int>(ep.steps.size()); ++t, ++col) {
      for (int k = 0; k < c; ++k) {
        const Step& s = ep.steps[t - k];
        frames[k] = s.frame;
        expected[k] = s.expected;
        actual[k] = s.actual;
      }
      data.X.col(col) = build_instance(frames, layout).values;
      data.Y.col(col) = ep.steps[t].expected;
      data.Yhat.col(col) = ep.steps[t].actual;
      data.E.col(col) = build_differences(expected, actual, layout);
    }
  }
  return data;
}

const char* mode_name(Mode mode) {
  return mode == Mode::kFeedforward ? "feedforward" : "with_offset";
}

Mode parse_mode(const std::string& name) {
  if (name == "feedforward") return Mode::kFeedforward;
  if (name == "with_offset") return Mode::kWithOffset;
  throw std::invalid_argument("unknown mode '" + name + "' (feedforward | with_offset)");
}

ClosedLoopRun closed_loop_run(const TerrainProfile& profile, const WeightW& w,
                              const WeightU& u, Mode mode, int n_steps, double dt,
                              std::uint64_t seed, const ClosedLoopOptions& opts) {
  profile.validate();
  const ModalityLayout& layout = w.layout();
  check_layout(layout);
  if (!(u.layout() == layout)) throw DimensionMismatch("W and U layouts differ");
  if (!(dt > 0.0)) throw InvalidProfile("dt must be > 0");

  const int c = layout.history();
  const double goal = profile.total_length();
  std::mt19937_64 sensor_rng(splitmix(seed) ^ 0x5e45u);
  std::mt19937_64 plant_rng(splitmix(seed + 1));

  ClosedLoopRun run;
  run.episode.dt = dt;
  run.episode.seed = seed;
  ExecutionState state(layout);
  std::deque<Vector> window;  // most recent frame first
  Pose actual_pose, expected_pose;
  Vector previous = Vector::Zero(kBehaviorDim);
  double stalled = 0.0;

  // The reference keeps driving after the robot arrives (and vice versa) so
  // both streams cover the whole traversal.
  bool reference_done = false;
  for (int t = 0; t < n_steps && !(run.reached_end && reference_done); ++t) {
    if (!reference_done) {
      const Vector reference = expert_behavior(opts.reference, profile, expected_pose);
      integrate(expected_pose, reference(0), reference(1), dt);
      run.expected_poses.push_back(expected_pose);
      reference_done = expected_pose.x >= goal;
    }
    if (run.reached_end) continue;

    Vector frame = sense(profile, layout, actual_pose.x, sensor_rng);
    window.push_front(frame);
    if (static_cast<int>(window.size()) > c) window.pop_back();
    // Before c frames exist the oldest available frame is repeated.
    std::vector<Vector> frames(window.begin(), window.end());
    while (static_cast<int>(frames.size()) < c) frames.push_back(frames.back());
    const FeatureInstance x = build_instance(frames, layout);

    const Vector intent = w.values().transpose() * x.values;
    Vector command = intent;
    if (mode == Mode::kWithOffset) {
      try {
        const Vector predicted =
            predicted_offset(w, u, state, opts.inverse, opts.inverse_cutoff);
        command = generate_behavior(w, u, x, state.shortfall(), predicted);
      } catch (const SingularTemporalBlock& err) {
        run.failed = true;
        run.failure_reason = err.what();
        break;
      }
    }
    command(0) = std::clamp(command(0), 0.0, opts.max_speed);
    command(1) = std::clamp(command(1), -opts.max_turn, opts.max_turn);

    const Vector actual = apply_setback(profile.at(actual_pose.x).setback, command, previous, plant_rng);
    integrate(actual_pose, actual(0), actual(1), dt);
    previous = actual;
    state.push(frame, intent, actual);

    run.episode.steps.push_back({std::move(frame), intent, actual, actual_pose});
    run.actual_poses.push_back(actual_pose);
    run.commands.push_back(command);

    if (actual_pose.x >= goal) {
      run.reached_end = true;
      run.traversal_time = (t + 1) * dt;
      continue;
    }
    if (std::abs(actual_pose.y) > opts.corridor) {
      run.failed = true;
      run.failure_reason = "left the corridor";
      break;
    }
    stalled = actual(0) < opts.stall_speed ? stalled + dt : 0.0;
    if (stalled >= opts.stall_time) {
      run.failed = true;
      run.failure_reason = "stalled";
      break;
    }
  }
  if (!run.failed && !run.reached_end) {
    run.failed = true;
    run.failure_reason = "did not reach the goal";
  }
  return run;
}

std::vector<ClosedLoopRun> closed_loop_batch(const TerrainProfile& profile, const WeightW& w,
                                             const WeightU& u, Mode mode, int n_steps,
                                             double dt, const std::vector<std::uint64_t>& seeds,
                                             const ClosedLoopOptions& opts) {
  std::vector<ClosedLoopRun> runs(seeds.size());
  const long count = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i)
    runs[i] = closed_loop_run(profile, w, u, mode, n_steps, dt, seeds[i], opts);
  return runs;
}

// ---------------------------------------------------------------------------
// Presets. Setback magnitudes are free parameters of the simulation, chosen
// to span easy to hard terrain; they are not measurements.

namespace {

TerrainSegment segment(const std::string& name, double length) {
  TerrainSegment seg;
  seg.name = name;
  seg.length = length;
  seg.setback.inertia = 0.5;
  seg.setback.noise_std = {0.02, 0.02};
  if (name == "grass") {
    seg.features = {3.0, 0.25, 0.2};
    seg.setback.slip = 0.05;
    seg.setback.drag = 0.05;
    seg.setback.roughness = 0.1;
  } else if (name == "sand") {
    seg.features = {1.5, 0.15, 0.35};
    seg.setback.slip = 0.2;
    seg.setback.drag = 0.1;
    seg.setback.roughness = 0.15;
  } else if (name == "gravel") {
    seg.features = {6.0, 0.3, 0.5};
    seg.setback.slip = 0.1;
    seg.setback.drag = 0.1;
    seg.setback.roughness = 0.3;
  } else if (name == "medium_rock") {
    seg.features = {4.0, 0.35, 0.7};
    seg.setback.slip = 0.1;
    seg.setback.drag = 0.15;
    seg.setback.roughness = 0.5;
  } else if (name == "large_rock") {
    seg.features = {2.5, 0.4, 0.9};
    seg.setback.slip = 0.15;
    seg.setback.drag = 0.2;
    seg.setback.roughness = 0.8;
  } else {
    throw InvalidProfile("unknown terrain '" + name + "'");
  }
  return seg;
}

}  // namespace

std::vector<std::string> individual_presets() {
  return {"grass", "sand", "gravel", "medium_rock", "large_rock"};
}

std::vector<std::string> preset_names() {
  auto names = individual_presets();
  names.insert(names.end(), {"grass_to_large_rock", "mixed_1", "mixed_2"});
  return names;
}

TerrainProfile preset(const std::string& name) {
  TerrainProfile p;
  p.name = name;
  if (name == "grass_to_large_rock") {
    p.segments = {segment("grass", 5.0), segment("large_rock", 5.0)};
  } else if (name == "mixed_1") {
    p.segments = {segment("grass", 2.5), segment("gravel", 2.5), segment("sand", 2.5),
                  segment("medium_rock", 2.5)};
  } else if (name == "mixed_2") {
    p.segments = {segment("sand", 2.0), segment("large_rock", 2.0), segment("gravel", 2.0),
                  segment("medium_rock", 2.0), segment("grass", 2.0)};
  } else {
    p.segments = {segment(name, 10.0)};
  }
  // Distinct micro-structure per preset, stable across runs.
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : name) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
  p.terrain_seed = h;
  return p;
}

TerrainProfile with_slip(TerrainProfile profile, double slip) {
  for (auto& seg : profile.segments) seg.setback.slip = slip;
  profile.validate();
  return profile;
}

}  // namespace offsetnav::sim
