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


#include "offsetnav/cli.hpp"

#include <cstdio>
#include <stdexcept>

#include "offsetnav/errors.hpp"
#include "offsetnav/metrics.hpp"
#include "offsetnav/oracle.hpp"

namespace offsetnav::cli {

namespace {

using io::Json;

const char* inverse_name(InverseMode mode) {
  return mode == InverseMode::kStrict ? "strict" : "pseudo_inverse";
}

InverseMode parse_inverse(const std::string& name) {
  if (name == "strict") return InverseMode::kStrict;
  if (name == "pseudo_inverse") return InverseMode::kPseudoInverse;
  throw std::invalid_argument("unknown inverse mode '" + name + "'");
}

std::vector<double> number_list(const Json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  return {j.get<double>()};
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

ModalityLayout ExperimentConfig::layout() const {
  return ModalityLayout(widths, history, behavior_dim);
}

void ExperimentConfig::validate() const {
  const ModalityLayout l = layout();
  if (behavior_dim != sim::kBehaviorDim)
    throw std::invalid_argument("the simulator needs behavior_dim = 2");
  if (lambda1.empty() || lambda2.empty())
    throw std::invalid_argument("lambda1 and lambda2 need at least one value");
  for (double v : lambda1)
    if (!(v >= 0.0)) throw std::invalid_argument("lambda1 values must be >= 0");
  for (double v : lambda2)
    if (!(v >= 0.0)) throw std::invalid_argument("lambda2 values must be >= 0");
  solver.validate();
  if (train_presets.empty()) throw std::invalid_argument("need at least one training preset");
  for (const auto& name : train_presets) sim::preset(name);
  if (episodes_per_preset < 1) throw std::invalid_argument("episodes_per_preset must be >= 1");
  if (train_steps < history)
    throw InvalidProfile("train steps (" + std::to_string(train_steps) +
                         ") must be at least the history length c = " +
                         std::to_string(history));
  sim::ExpertPolicy::by_id(expert);
  if (noise_modality < -1 || noise_modality >= l.modalities())
    throw std::invalid_argument("noise_modality must be -1 or a modality index");
  if (eval_profile.empty()) sim::preset(eval_preset);
  if (eval_slip && !(*eval_slip >= 0.0 && *eval_slip <= 1.0))
    throw std::invalid_argument("eval slip must lie in [0, 1]");
  if (modes.empty()) throw std::invalid_argument("need at least one mode");
  for (const auto& m : modes) sim::parse_mode(m);
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (eval_steps < 1) throw std::invalid_argument("eval steps must be >= 1");
  if (!(inverse_cutoff >= 0.0)) throw std::invalid_argument("inverse_cutoff must be >= 0");
}

Json ExperimentConfig::to_json() const {
  return Json{
      {"layout", Json{{"widths", widths}, {"history", history}, {"behavior_dim", behavior_dim}}},
      {"lambda1", lambda1},
      {"lambda2", lambda2},
      {"solver", Json{{"eps", solver.eps},
                      {"ridge", solver.ridge},
                      {"tol", solver.tol},
                      {"max_iters", solver.max_iters},
                      {"seed", solver.seed},
                      {"random_init", solver.random_init}}},
      {"train", Json{{"presets", train_presets},
                     {"episodes_per_preset", episodes_per_preset},
                     {"steps", train_steps},
                     {"seed", train_seed},
                     {"expert", expert},
                     {"noise_modality", noise_modality}}},
      {"eval", Json{{"preset", eval_preset},
                    {"profile", eval_profile.empty() ? Json(nullptr) : Json(eval_profile)},
                    {"slip", eval_slip ? Json(*eval_slip) : Json(nullptr)},
                    {"modes", modes},
                    {"runs", runs},
                    {"seed", eval_seed},
                    {"steps", eval_steps},
                    {"inverse", inverse_name(inverse)},
                    {"inverse_cutoff", inverse_cutoff}}},
      {"out", out}};
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  const auto errors = io::validate(j, io::config_schema());
  if (!errors.empty()) {
    std::string msg = "config does not match the schema:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw IoError(msg);
  }
  ExperimentConfig c;
  if (j.contains("layout")) {
    const Json& l = j["layout"];
    c.widths = l.value("widths", c.widths);
    c.history = l.value("history", c.history);
    c.behavior_dim = l.value("behavior_dim", c.behavior_dim);
  }
  if (j.contains("lambda1")) c.lambda1 = number_list(j["lambda1"]);
  if (j.contains("lambda2")) c.lambda2 = number_list(j["lambda2"]);
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    c.solver.eps = s.value("eps", c.solver.eps);
    c.solver.ridge = s.value("ridge", c.solver.ridge);
    c.solver.tol = s.value("tol", c.solver.tol);
    c.solver.max_iters = s.value("max_iters", c.solver.max_iters);
    c.solver.seed = s.value("seed", c.solver.seed);
    c.solver.random_init = s.value("random_init", c.solver.random_init);
  }
  if (j.contains("train")) {
    const Json& t = j["train"];
    c.train_presets = t.value("presets", c.train_presets);
    c.episodes_per_preset = t.value("episodes_per_preset", c.episodes_per_preset);
    c.train_steps = t.value("steps", c.train_steps);
    c.train_seed = t.value("seed", c.train_seed);
    c.expert = t.value("expert", c.expert);
    c.noise_modality = t.value("noise_modality", c.noise_modality);
  }
  if (j.contains("eval")) {
    const Json& e = j["eval"];
    c.eval_preset = e.value("preset", c.eval_preset);
    if (e.contains("profile"))
      c.eval_profile = e["profile"].is_null() ? "" : e["profile"].get<std::string>();
    if (e.contains("slip"))
      c.eval_slip = e["slip"].is_null() ? std::nullopt : std::optional(e["slip"].get<double>());
    c.modes = e.value("modes", c.modes);
    c.runs = e.value("runs", c.runs);
    c.eval_seed = e.value("seed", c.eval_seed);
    c.eval_steps = e.value("steps", c.eval_steps);
    if (e.contains("inverse")) c.inverse = parse_inverse(e["inverse"].get<std::string>());
    c.inverse_cutoff = e.value("inverse_cutoff", c.inverse_cutoff);
  }
  c.out = j.value("out", c.out);
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  io::Json j;
  try {
    j = io::Json::parse(io::read_text(path));
  } catch (const io::Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

std::vector<sim::Episode> generate_episodes(const ExperimentConfig& config) {
  const ModalityLayout layout = config.layout();
  const auto expert = sim::ExpertPolicy::by_id(config.expert);
  std::vector<sim::Episode> episodes;
  std::uint64_t seed = config.train_seed;
  for (const auto& name : config.train_presets) {
    auto profile = sim::preset(name);
    profile.noise_modality = config.noise_modality;
    for (int i = 0; i < config.episodes_per_preset; ++i)
      episodes.push_back(sim::generate_episode(profile, layout, expert, config.train_steps,
                                               sim::kDefaultDt, seed++));
  }
  return episodes;
}

TrainingSet training_set(const ExperimentConfig& config) {
  return sim::episodes_to_training_set(generate_episodes(config), config.layout());
}

sim::TerrainProfile eval_profile(const ExperimentConfig& config) {
  sim::TerrainProfile profile =
      config.eval_profile.empty() ? sim::preset(config.eval_preset) : io::load_profile(config.eval_profile);
  if (config.noise_modality >= 0) profile.noise_modality = config.noise_modality;
  if (config.eval_slip) profile = sim::with_slip(std::move(profile), *config.eval_slip);
  return profile;
}

sim::ClosedLoopOptions closed_loop_options(const ExperimentConfig& config) {
  sim::ClosedLoopOptions opts;
  opts.inverse = config.inverse;
  opts.inverse_cutoff = config.inverse_cutoff;
  opts.reference = sim::ExpertPolicy::by_id(config.expert);
  return opts;
}

GenerateResult cmd_generate(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  const auto episodes = generate_episodes(config);
  const TrainingSet data = sim::episodes_to_training_set(episodes, config.layout());

  Json presets = Json::array();
  for (const auto& name : config.train_presets)
    for (int i = 0; i < config.episodes_per_preset; ++i) presets.push_back(name);
  Json settings = config.to_json();
  settings.erase("out");
  io::save_dataset(out_dir, data, episodes,
                   Json{{"generator", "offsetnav generate"},
                        {"episode_presets", presets},
                        {"config", settings}});
  return {static_cast<int>(episodes.size()), data.samples()};
}

TrainResult cmd_train(const ExperimentConfig& config, const fs::path& dataset_dir,
                      const fs::path& out_dir, bool verify_oracle) {
  config.validate();
  const io::Dataset dataset = io::load_dataset(dataset_dir);
  const bool sweep = config.lambda1.size() * config.lambda2.size() > 1;

  TrainResult result;
  for (double l1 : config.lambda1) {
    for (double l2 : config.lambda2) {
      FitOptions opts = config.solver;
      opts.lambda1 = l1;
      opts.lambda2 = l2;
      const FitResult fit = offsetnav::fit(dataset.data, opts);

      TrainedModel m;
      m.lambda1 = l1;
      m.lambda2 = l2;
      const std::string suffix =
          sweep ? "_l1-" + short_number(l1) + "_l2-" + short_number(l2) : std::string();
      m.model_path = out_dir / ("model" + suffix + ".json");
      m.trace_path = out_dir / ("trace" + suffix + ".csv");
      m.converged = fit.converged;
      m.iterations = fit.iterations;
      m.objective = fit.trace.back().total;

      Json provenance{{"samples", dataset.data.samples()},
                      {"dataset", dataset.manifest.value("provenance", Json::object())}};
      if (verify_oracle) {
        const OracleResult oracle = oracle_fit(dataset.data, l1, l2);
        const double scale = std::max(std::abs(oracle.objective), 1e-300);
        m.oracle_gap = std::abs(m.objective - oracle.objective) / scale;
        provenance["oracle"] = Json{{"objective", oracle.objective},
                                    {"iterations", oracle.iterations},
                                    {"relative_gap", *m.oracle_gap}};
        if (*m.oracle_gap > kOracleGapLimit) result.verification_failed = true;
      }
      io::save_model(m.model_path, io::model_from_fit(fit, opts, std::move(provenance)));
      io::save_trace(m.trace_path, fit.trace);
      result.models.push_back(std::move(m));
    }
  }
  return result;
}

EvalResult cmd_eval(const ExperimentConfig& config, const fs::path& model_path,
                    const fs::path& out_dir) {
  config.validate();
  const io::ModelFile model = io::load_model(model_path);
  const sim::TerrainProfile profile = eval_profile(config);
  const sim::ClosedLoopOptions opts = closed_loop_options(config);

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < config.runs; ++i) seeds.push_back(config.eval_seed + i);

  Json modes = Json::array();
  std::vector<std::pair<std::string, metrics::Summary>> rows;
  std::string runs_csv = "mode,seed,failed,failure_reason,steps,traversal_time,inconsistency,jerkiness\n";
  for (const auto& name : config.modes) {
    const sim::Mode mode = sim::parse_mode(name);
    const auto runs = sim::closed_loop_batch(profile, model.W, model.U, mode, config.eval_steps,
                                             sim::kDefaultDt, seeds, opts);
    std::vector<metrics::RunMetrics> per_run;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto m = metrics::evaluate(runs[i]);
      per_run.push_back(m);
      runs_csv += name + ',' + std::to_string(seeds[i]) + ',' + (m.failed ? "1" : "0") + ',' +
                  csv_quote(runs[i].failure_reason) + ',' +
                  std::to_string(runs[i].actual_poses.size()) + ',' +
                  (m.failed ? "" : io::format_double(m.traversal_time)) + ',' +
                  (m.failed ? "" : io::format_double(m.inconsistency)) + ',' +
                  (m.failed ? "" : io::format_double(m.jerkiness)) + '\n';
    }
    const auto summary = metrics::aggregate(per_run);
    modes.push_back(Json{{"mode", name}, {"summary", io::summary_to_json(summary)}});
    rows.emplace_back(name, summary);
  }

  EvalResult result;
  result.summary = Json{{"profile", profile.name},
                        {"runs", config.runs},
                        {"seed0", config.eval_seed},
                        {"steps", config.eval_steps},
                        {"model", model_path.filename().string()},
                        {"modes", modes}};
  result.table = metrics::format_table(rows);
  io::write_text(out_dir / "summary.json", result.summary.dump(2) + '\n');
  io::write_text(out_dir / "summary.txt", result.table);
  io::write_text(out_dir / "runs.csv", runs_csv);
  return result;
}

}  // namespace offsetnav::cli
