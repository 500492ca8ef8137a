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

// On-disk formats.
//
// Dataset: a directory with manifest.json and row-major CSV matrices, one
// sample per row (X.csv, Y.csv, Yhat.csv, E.csv) plus one CSV per episode.
// Model: one JSON document. Numbers are written with 17 significant digits
// so every double survives a round trip.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "offsetnav/metrics.hpp"
#include "offsetnav/model.hpp"
#include "offsetnav/simulator.hpp"
#include "offsetnav/solver.hpp"

namespace offsetnav::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double value);

std::string read_text(const fs::path& path);
// Creates parent directories. Throws IoError.
void write_text(const fs::path& path, const std::string& text);

// Column headers.
std::vector<std::string> feature_header(const ModalityLayout& layout);  // mod1_f0_dim0, ...
std::vector<std::string> behavior_header(const std::string& prefix, int r);  // y_dim0, ...
std::vector<std::string> difference_header(const ModalityLayout& layout);  // diff_f0_dim0, ...

// `columns` holds one sample per column; the file holds one per row.
void write_samples_csv(const fs::path& path, const std::vector<std::string>& header,
                       const Matrix& columns);
// Throws IoError when the header differs from `header`.
Matrix read_samples_csv(const fs::path& path, const std::vector<std::string>& header);

Json layout_to_json(const ModalityLayout& layout);
ModalityLayout layout_from_json(const Json& j);

struct Dataset {
  TrainingSet data;
  Json manifest;
};

// `provenance` is stored verbatim in the manifest.
void save_dataset(const fs::path& dir, const TrainingSet& data,
                  const std::vector<sim::Episode>& episodes, const Json& provenance);
Dataset load_dataset(const fs::path& dir);

struct ModelFile {
  WeightW W;
  WeightU U;
  FitOptions options;
  bool converged = false;
  int iterations = 0;
  ObjectiveBreakdown final_objective;
  Json provenance = Json::object();
};

ModelFile model_from_fit(const FitResult& fit, const FitOptions& options, Json provenance = {});
std::string model_to_string(const ModelFile& model);
void save_model(const fs::path& path, const ModelFile& model);
ModelFile load_model(const fs::path& path);

// iter,loss,modality_penalty,temporal_penalty,total
std::string trace_to_csv(const std::vector<ObjectiveBreakdown>& trace);
void save_trace(const fs::path& path, const std::vector<ObjectiveBreakdown>& trace);
std::vector<ObjectiveBreakdown> load_trace(const fs::path& path);

Json profile_to_json(const sim::TerrainProfile& profile);
sim::TerrainProfile profile_from_json(const Json& j);
sim::TerrainProfile load_profile(const fs::path& path);

Json summary_to_json(const metrics::Summary& summary);

// Minimal JSON Schema subset: type, properties, required,
// additionalProperties (bool), items, enum, minimum, maximum, minItems.
// Returns the list of violations, empty when `doc` conforms.
std::vector<std::string> validate(const Json& doc, const Json& schema);

const Json& config_schema();
const Json& summary_schema();

}  // namespace offsetnav::io
