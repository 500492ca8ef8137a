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

// Experiment configuration and the generate / train / eval commands behind
// the offsetnav executable. Every command is a pure function of its inputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "offsetnav/io.hpp"
#include "offsetnav/predictor.hpp"
#include "offsetnav/simulator.hpp"
#include "offsetnav/solver.hpp"

namespace offsetnav::cli {

namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

inline constexpr double kOracleGapLimit = 1e-3;

struct ExperimentConfig {
  // Layout.
  std::vector<int> widths = {2, 2, 2};
  int history = 15;
  int behavior_dim = sim::kBehaviorDim;

  // One model per (lambda1, lambda2) pair.
  std::vector<double> lambda1 = {0.1};
  std::vector<double> lambda2 = {10.0};
  FitOptions solver;

  // Demonstrations.
  std::vector<std::string> train_presets = sim::individual_presets();
  int episodes_per_preset = 10;
  int train_steps = 300;
  std::uint64_t train_seed = 100;
  std::string expert = "terrain_speed";
  int noise_modality = -1;

  // Closed-loop evaluation.
  std::string eval_preset = "grass_to_large_rock";
  std::string eval_profile;  // JSON profile path, overrides eval_preset
  std::optional<double> eval_slip = 0.3;
  std::vector<std::string> modes = {"feedforward", "with_offset"};
  int runs = 10;
  std::uint64_t eval_seed = 0;
  int eval_steps = 4000;
  InverseMode inverse = InverseMode::kPseudoInverse;
  double inverse_cutoff = 1e-3;

  std::string out = "out";

  ModalityLayout layout() const;
  // Throws std::invalid_argument or InvalidProfile.
  void validate() const;

  io::Json to_json() const;
  // Missing keys keep their defaults. Throws IoError on schema violations.
  static ExperimentConfig from_json(const io::Json& j);
};

ExperimentConfig load_config(const fs::path& path);

std::vector<sim::Episode> generate_episodes(const ExperimentConfig& config);
TrainingSet training_set(const ExperimentConfig& config);
sim::TerrainProfile eval_profile(const ExperimentConfig& config);
sim::ClosedLoopOptions closed_loop_options(const ExperimentConfig& config);

struct GenerateResult {
  int episodes = 0;
  int samples = 0;
};

// Writes the dataset into `out_dir`.
GenerateResult cmd_generate(const ExperimentConfig& config, const fs::path& out_dir);

struct TrainedModel {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  fs::path model_path;
  fs::path trace_path;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  std::optional<double> oracle_gap;  // relative, set with verify_oracle
};

struct TrainResult {
  std::vector<TrainedModel> models;
  bool verification_failed = false;
};

// Fits one model per lambda pair. A single pair writes model.json and
// trace.csv; a sweep suffixes both with the pair.
TrainResult cmd_train(const ExperimentConfig& config, const fs::path& dataset_dir,
                      const fs::path& out_dir, bool verify_oracle = false);

struct EvalResult {
  io::Json summary;
  std::string table;
};

// Writes summary.json, summary.txt and runs.csv into `out_dir`.
EvalResult cmd_eval(const ExperimentConfig& config, const fs::path& model_path,
                    const fs::path& out_dir);

}  // namespace offsetnav::cli
