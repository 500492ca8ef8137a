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


#include "offsetnav/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "offsetnav/errors.hpp"

namespace offsetnav::io {

namespace {

constexpr const char* kDatasetFormat = "offsetnav-dataset";
constexpr const char* kModelFormat = "offsetnav-model";
constexpr int kFormatVersion = 1;

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const fs::path& path, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + text + "'");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw IoError(std::string(what) + " must have " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw IoError(std::string(what) + " row " + std::to_string(i) + " must have " +
                    std::to_string(cols) + " entries");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[k].get<double>();
  }
  return m;
}

Json breakdown_to_json(const ObjectiveBreakdown& b) {
  return Json{{"loss", b.loss},
              {"modality_penalty", b.modality_penalty},
              {"temporal_penalty", b.temporal_penalty},
              {"total", b.total}};
}

ObjectiveBreakdown breakdown_from_json(const Json& j) {
  return {j.at("loss").get<double>(), j.at("modality_penalty").get<double>(),
          j.at("temporal_penalty").get<double>(), j.at("total").get<double>()};
}

Json parse_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string type_of(const Json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number_integer() || j.is_number_unsigned()) return "integer";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

bool type_matches(const Json& doc, const std::string& type) {
  const std::string actual = type_of(doc);
  return actual == type || (type == "number" && actual == "integer");
}

void validate_into(const Json& doc, const Json& schema, const std::string& where,
                   std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(doc, t.get<std::string>());
    } else {
      for (const auto& option : t) ok = ok || type_matches(doc, option.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + t.dump() + ", got " + type_of(doc));
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"]) found = found || v == doc;
    if (!found) errors.push_back(where + ": value " + doc.dump() + " not in " + schema["enum"].dump());
  }
  if (doc.is_number()) {
    if (schema.contains("minimum") && doc.get<double>() < schema["minimum"].get<double>())
      errors.push_back(where + ": below minimum " + schema["minimum"].dump());
    if (schema.contains("maximum") && doc.get<double>() > schema["maximum"].get<double>())
      errors.push_back(where + ": above maximum " + schema["maximum"].dump());
  }
  if (doc.is_array()) {
    if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
      errors.push_back(where + ": fewer than " + schema["minItems"].dump() + " items");
    if (schema.contains("items"))
      for (std::size_t i = 0; i < doc.size(); ++i)
        validate_into(doc[i], schema["items"], where + "[" + std::to_string(i) + "]", errors);
  }
  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!doc.contains(key.get<std::string>()))
          errors.push_back(where + ": missing required '" + key.get<std::string>() + "'");
    const Json empty = Json::object();
    const Json& props = schema.contains("properties") ? schema["properties"] : empty;
    const bool closed = schema.contains("additionalProperties") &&
                        schema["additionalProperties"].is_boolean() &&
                        !schema["additionalProperties"].get<bool>();
    for (const auto& [key, value] : doc.items()) {
      if (props.contains(key))
        validate_into(value, props[key], where + "." + key, errors);
      else if (closed)
        errors.push_back(where + ": unexpected property '" + key + "'");
    }
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> feature_header(const ModalityLayout& layout) {
  std::vector<std::string> h;
  h.reserve(layout.feature_dim());
  for (int k = 0; k < layout.history(); ++k)
    for (int i = 0; i < layout.modalities(); ++i)
      for (int f = 0; f < layout.width(i); ++f)
        h.push_back("mod" + std::to_string(i + 1) + "_f" + std::to_string(k) + "_dim" +
                    std::to_string(f));
  return h;
}

std::vector<std::string> behavior_header(const std::string& prefix, int r) {
  std::vector<std::string> h;
  for (int j = 0; j < r; ++j) h.push_back(prefix + "_dim" + std::to_string(j));
  return h;
}

std::vector<std::string> difference_header(const ModalityLayout& layout) {
  std::vector<std::string> h;
  for (int k = 0; k < layout.history(); ++k)
    for (int j = 0; j < layout.behavior_dim(); ++j)
      h.push_back("diff_f" + std::to_string(k) + "_dim" + std::to_string(j));
  return h;
}

void write_samples_csv(const fs::path& path, const std::vector<std::string>& header,
                       const Matrix& columns) {
  if (static_cast<Eigen::Index>(header.size()) != columns.rows())
    throw DimensionMismatch("header has " + std::to_string(header.size()) + " names for " +
                            std::to_string(columns.rows()) + " rows");
  std::string text = join(header, ',') + '\n';
  for (Eigen::Index s = 0; s < columns.cols(); ++s) {
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      if (i) text += ',';
      text += format_double(columns(i, s));
    }
    text += '\n';
  }
  write_text(path, text);
}

Matrix read_samples_csv(const fs::path& path, const std::vector<std::string>& header) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  if (split(line, ',') != header)
    throw IoError(path.string() + ": header does not match the layout");
  std::vector<std::vector<double>> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw IoError(path.string() + ":" + std::to_string(number) + ": expected " +
                    std::to_string(header.size()) + " fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path, number));
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(header.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (std::size_t i = 0; i < header.size(); ++i) m(i, s) = rows[s][i];
  return m;
}

Json layout_to_json(const ModalityLayout& layout) {
  return Json{{"widths", layout.widths()},
              {"history", layout.history()},
              {"behavior_dim", layout.behavior_dim()}};
}

ModalityLayout layout_from_json(const Json& j) {
  try {
    return ModalityLayout(j.at("widths").get<std::vector<int>>(), j.at("history").get<int>(),
                          j.at("behavior_dim").get<int>());
  } catch (const Json::exception& e) {
    throw IoError(std::string("bad layout: ") + e.what());
  }
}

void save_dataset(const fs::path& dir, const TrainingSet& data,
                  const std::vector<sim::Episode>& episodes, const Json& provenance) {
  data.validate();
  const auto& layout = data.layout;
  write_samples_csv(dir / "X.csv", feature_header(layout), data.X);
  write_samples_csv(dir / "Y.csv", behavior_header("y", layout.behavior_dim()), data.Y);
  write_samples_csv(dir / "Yhat.csv", behavior_header("yhat", layout.behavior_dim()), data.Yhat);
  write_samples_csv(dir / "E.csv", difference_header(layout), data.E);

  // Per-episode streams: frame, expected, actual, pose after the step.
  std::vector<std::string> header{"step"};
  for (int i = 0; i < layout.modalities(); ++i)
    for (int f = 0; f < layout.width(i); ++f)
      header.push_back("mod" + std::to_string(i + 1) + "_dim" + std::to_string(f));
  for (const auto& h : behavior_header("expected", layout.behavior_dim())) header.push_back(h);
  for (const auto& h : behavior_header("actual", layout.behavior_dim())) header.push_back(h);
  for (const char* h : {"x", "y", "heading"}) header.emplace_back(h);

  Json listing = Json::array();
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& ep = episodes[e];
    char name[40];
    std::snprintf(name, sizeof name, "episodes/episode_%03zu.csv", e);
    std::string text = join(header, ',') + '\n';
    for (std::size_t t = 0; t < ep.steps.size(); ++t) {
      const auto& s = ep.steps[t];
      text += std::to_string(t);
      for (Eigen::Index i = 0; i < s.frame.size(); ++i) text += ',' + format_double(s.frame(i));
      for (Eigen::Index i = 0; i < s.expected.size(); ++i)
        text += ',' + format_double(s.expected(i));
      for (Eigen::Index i = 0; i < s.actual.size(); ++i) text += ',' + format_double(s.actual(i));
      text += ',' + format_double(s.pose.x) + ',' + format_double(s.pose.y) + ',' +
              format_double(s.pose.heading) + '\n';
    }
    write_text(dir / name, text);
    listing.push_back(Json{{"file", name},
                           {"seed", ep.seed},
                           {"steps", ep.steps.size()},
                           {"dt", ep.dt}});
  }

  Json manifest{{"format", kDatasetFormat},
                {"version", kFormatVersion},
                {"layout", layout_to_json(layout)},
                {"samples", data.samples()},
                {"files", Json{{"X", "X.csv"}, {"Y", "Y.csv"}, {"Yhat", "Yhat.csv"}, {"E", "E.csv"}}},
                {"episodes", listing},
                {"provenance", provenance}};
  write_text(dir / "manifest.json", manifest.dump(2) + '\n');
}

Dataset load_dataset(const fs::path& dir) {
  Dataset out;
  out.manifest = parse_json(dir / "manifest.json");
  const Json& m = out.manifest;
  if (m.value("format", "") != kDatasetFormat)
    throw IoError((dir / "manifest.json").string() + ": not a dataset manifest");
  out.data.layout = layout_from_json(m.at("layout"));
  const auto& layout = out.data.layout;
  const Json& files = m.at("files");
  out.data.X = read_samples_csv(dir / files.at("X").get<std::string>(), feature_header(layout));
  out.data.Y = read_samples_csv(dir / files.at("Y").get<std::string>(),
                                behavior_header("y", layout.behavior_dim()));
  out.data.Yhat = read_samples_csv(dir / files.at("Yhat").get<std::string>(),
                                   behavior_header("yhat", layout.behavior_dim()));
  out.data.E = read_samples_csv(dir / files.at("E").get<std::string>(), difference_header(layout));
  try {
    out.data.validate();
  } catch (const DimensionMismatch& e) {
    throw IoError(dir.string() + ": " + e.what());
  }
  if (m.contains("samples") && m["samples"].get<int>() != out.data.samples())
    throw IoError(dir.string() + ": manifest sample count disagrees with the CSV files");
  return out;
}

ModelFile model_from_fit(const FitResult& fit, const FitOptions& options, Json provenance) {
  ModelFile m{fit.W, fit.U, options, fit.converged, fit.iterations,
              fit.trace.empty() ? ObjectiveBreakdown{} : fit.trace.back(),
              provenance.is_null() ? Json::object() : std::move(provenance)};
  return m;
}

std::string model_to_string(const ModelFile& model) {
  const auto& o = model.options;
  Json j{{"format", kModelFormat},
         {"version", kFormatVersion},
         {"layout", layout_to_json(model.W.layout())},
         {"options", Json{{"lambda1", o.lambda1},
                          {"lambda2", o.lambda2},
                          {"eps", o.eps},
                          {"ridge", o.ridge},
                          {"tol", o.tol},
                          {"max_iters", o.max_iters},
                          {"seed", o.seed},
                          {"random_init", o.random_init}}},
         {"convergence", Json{{"converged", model.converged},
                              {"iterations", model.iterations},
                              {"objective", breakdown_to_json(model.final_objective)}}},
         {"W", matrix_to_json(model.W.values())},
         {"U", matrix_to_json(model.U.values())},
         {"provenance", model.provenance}};
  return j.dump(1) + '\n';
}

void save_model(const fs::path& path, const ModelFile& model) {
  write_text(path, model_to_string(model));
}

ModelFile load_model(const fs::path& path) {
  const Json j = parse_json(path);
  if (j.value("format", "") != kModelFormat) throw IoError(path.string() + ": not a model file");
  try {
    const ModalityLayout layout = layout_from_json(j.at("layout"));
    const Json& o = j.at("options");
    FitOptions opts;
    opts.lambda1 = o.at("lambda1").get<double>();
    opts.lambda2 = o.at("lambda2").get<double>();
    opts.eps = o.at("eps").get<double>();
    opts.ridge = o.at("ridge").get<double>();
    opts.tol = o.at("tol").get<double>();
    opts.max_iters = o.at("max_iters").get<int>();
    opts.seed = o.at("seed").get<std::uint64_t>();
    opts.random_init = o.at("random_init").get<bool>();
    const Json& c = j.at("convergence");
    ModelFile m{WeightW(layout, matrix_from_json(j.at("W"), layout.feature_dim(),
                                                 layout.behavior_dim(), "W")),
                WeightU(layout, matrix_from_json(j.at("U"), layout.difference_dim(),
                                                 layout.behavior_dim(), "U")),
                opts,
                c.at("converged").get<bool>(),
                c.at("iterations").get<int>(),
                breakdown_from_json(c.at("objective")),
                j.value("provenance", Json::object())};
    return m;
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const DimensionMismatch& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string trace_to_csv(const std::vector<ObjectiveBreakdown>& trace) {
  std::string text = "iter,loss,modality_penalty,temporal_penalty,total\n";
  for (std::size_t s = 0; s < trace.size(); ++s) {
    const auto& b = trace[s];
    text += std::to_string(s) + ',' + format_double(b.loss) + ',' +
            format_double(b.modality_penalty) + ',' + format_double(b.temporal_penalty) + ',' +
            format_double(b.total) + '\n';
  }
  return text;
}

void save_trace(const fs::path& path, const std::vector<ObjectiveBreakdown>& trace) {
  write_text(path, trace_to_csv(trace));
}

std::vector<ObjectiveBreakdown> load_trace(const fs::path& path) {
  const Matrix m = read_samples_csv(
      path, {"iter", "loss", "modality_penalty", "temporal_penalty", "total"});
  std::vector<ObjectiveBreakdown> trace;
  for (Eigen::Index s = 0; s < m.cols(); ++s) trace.push_back({m(1, s), m(2, s), m(3, s), m(4, s)});
  return trace;
}

Json profile_to_json(const sim::TerrainProfile& profile) {
  Json segments = Json::array();
  for (const auto& s : profile.segments) {
    segments.push_back(Json{
        {"name", s.name},
        {"length", s.length},
        {"features", Json{{"texture_freq", s.features.texture_freq},
                          {"texture_amp", s.features.texture_amp},
                          {"shape_level", s.features.shape_level}}},
        {"setback", Json{{"slip", s.setback.slip},
                         {"drag", s.setback.drag},
                         {"roughness", s.setback.roughness},
                         {"noise_std", s.setback.noise_std},
                         {"inertia", s.setback.inertia}}}});
  }
  return Json{{"name", profile.name},
              {"terrain_seed", profile.terrain_seed},
              {"noise_modality", profile.noise_modality},
              {"sensor_noise", profile.sensor_noise},
              {"segments", segments}};
}

sim::TerrainProfile profile_from_json(const Json& j) {
  try {
    sim::TerrainProfile p;
    p.name = j.value("name", std::string("custom"));
    p.terrain_seed = j.value("terrain_seed", std::uint64_t{1});
    p.noise_modality = j.value("noise_modality", -1);
    p.sensor_noise = j.value("sensor_noise", 0.01);
    for (const auto& s : j.at("segments")) {
      sim::TerrainSegment seg;
      seg.name = s.value("name", std::string());
      seg.length = s.at("length").get<double>();
      if (s.contains("features")) {
        const Json& f = s["features"];
        seg.features.texture_freq = f.value("texture_freq", seg.features.texture_freq);
        seg.features.texture_amp = f.value("texture_amp", seg.features.texture_amp);
        seg.features.shape_level = f.value("shape_level", seg.features.shape_level);
      }
      if (s.contains("setback")) {
        const Json& b = s["setback"];
        seg.setback.slip = b.value("slip", 0.0);
        seg.setback.drag = b.value("drag", 0.0);
        seg.setback.roughness = b.value("roughness", 0.0);
        seg.setback.noise_std = b.value("noise_std", std::vector<double>{0.0, 0.0});
        seg.setback.inertia = b.value("inertia", 0.0);
      }
      p.segments.push_back(std::move(seg));
    }
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw InvalidProfile(std::string("bad profile: ") + e.what());
  }
}

sim::TerrainProfile load_profile(const fs::path& path) { return profile_from_json(parse_json(path)); }

Json summary_to_json(const metrics::Summary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"runs", s.runs},
              {"failures", s.failures},
              {"failure_rate", s.failure_rate},
              {"traversal_time", opt(s.traversal_time)},
              {"inconsistency", opt(s.inconsistency)},
              {"jerkiness", opt(s.jerkiness)}};
}

std::vector<std::string> validate(const Json& doc, const Json& schema) {
  std::vector<std::string> errors;
  validate_into(doc, schema, "$", errors);
  return errors;
}

const Json& config_schema() {
  static const Json schema = Json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "offsetnav experiment config",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "layout": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "widths": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "history": {"type": "integer", "minimum": 1},
        "behavior_dim": {"type": "integer", "enum": [2]}
      }
    },
    "lambda1": {"type": ["number", "array"], "items": {"type": "number", "minimum": 0}, "minimum": 0},
    "lambda2": {"type": ["number", "array"], "items": {"type": "number", "minimum": 0}, "minimum": 0},
    "solver": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "eps": {"type": "number", "minimum": 0},
        "ridge": {"type": "number", "minimum": 0},
        "tol": {"type": "number", "minimum": 0},
        "max_iters": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "random_init": {"type": "boolean"}
      }
    },
    "train": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "presets": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "episodes_per_preset": {"type": "integer", "minimum": 1},
        "steps": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "expert": {"type": "string", "enum": ["terrain_speed", "cautious"]},
        "noise_modality": {"type": "integer", "minimum": -1}
      }
    },
    "eval": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "preset": {"type": "string"},
        "profile": {"type": ["string", "null"]},
        "slip": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "modes": {"type": "array", "items": {"type": "string", "enum": ["feedforward", "with_offset"]}, "minItems": 1},
        "runs": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "steps": {"type": "integer", "minimum": 1},
        "inverse": {"type": "string", "enum": ["strict", "pseudo_inverse"]},
        "inverse_cutoff": {"type": "number", "minimum": 0}
      }
    },
    "out": {"type": "string"}
  }
})");
  return schema;
}

const Json& summary_schema() {
  static const Json schema = Json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "offsetnav evaluation summary",
  "type": "object",
  "additionalProperties": false,
  "required": ["profile", "runs", "seed0", "steps", "model", "modes"],
  "properties": {
    "profile": {"type": "string"},
    "runs": {"type": "integer", "minimum": 1},
    "seed0": {"type": "integer", "minimum": 0},
    "steps": {"type": "integer", "minimum": 1},
    "model": {"type": "string"},
    "modes": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["mode", "summary"],
        "properties": {
          "mode": {"type": "string", "enum": ["feedforward", "with_offset"]},
          "summary": {
            "type": "object",
            "additionalProperties": false,
            "required": ["runs", "failures", "failure_rate", "traversal_time", "inconsistency", "jerkiness"],
            "properties": {
              "runs": {"type": "integer", "minimum": 1},
              "failures": {"type": "integer", "minimum": 0},
              "failure_rate": {"type": "number", "minimum": 0, "maximum": 1},
              "traversal_time": {"type": ["number", "null"], "minimum": 0},
              "inconsistency": {"type": ["number", "null"], "minimum": 0},
              "jerkiness": {"type": ["number", "null"], "minimum": 0}
            }
          }
        }
      }
    }
  }
})");
  return schema;
}

}  // namespace offsetnav::io
