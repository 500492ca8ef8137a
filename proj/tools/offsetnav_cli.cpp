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


// offsetnav: generate demonstrations, train models, evaluate closed loop.
//
//   offsetnav generate --out data
//   offsetnav train --dataset data --out models [--lambda1 0.01,0.1,1] [--verify-oracle]
//   offsetnav eval --model models/model.json --out eval [--modes feedforward,with_offset]
//   offsetnav schema config|summary
//
// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 verification failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "offsetnav/cli.hpp"
#include "offsetnav/errors.hpp"

namespace {

using offsetnav::cli::ExperimentConfig;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  int c = 0;
  std::vector<double> lambda1, lambda2;
  std::string preset;
  std::vector<std::string> modes;
  int runs = 0;
  std::string out;
  double slip = 0.0;
  std::string profile;
};

struct Shared {
  CLI::Option* seed = nullptr;
  CLI::Option* c = nullptr;
  CLI::Option* lambda1 = nullptr;
  CLI::Option* lambda2 = nullptr;
  CLI::Option* preset = nullptr;
  CLI::Option* modes = nullptr;
  CLI::Option* runs = nullptr;
  CLI::Option* out = nullptr;
};

Shared add_shared(CLI::App* app, Flags& f) {
  Shared s;
  app->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  s.seed = app->add_option("--seed", f.seed, "base seed (episodes, solver init, or eval runs)");
  s.c = app->add_option("--c", f.c, "history length c")->check(CLI::PositiveNumber);
  s.lambda1 = app->add_option("--lambda1", f.lambda1, "modality weight(s), comma separated")
                  ->delimiter(',');
  s.lambda2 = app->add_option("--lambda2", f.lambda2, "temporal weight(s), comma separated")
                  ->delimiter(',');
  s.preset = app->add_option("--preset", f.preset, "terrain preset");
  s.modes = app->add_option("--modes", f.modes, "feedforward,with_offset")->delimiter(',');
  s.runs = app->add_option("--runs", f.runs, "closed-loop runs per mode")->check(CLI::PositiveNumber);
  s.out = app->add_option("--out", f.out, "output directory");
  return s;
}

enum class Command { kGenerate, kTrain, kEval };

ExperimentConfig resolve(const Flags& f, const Shared& s, Command cmd) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : offsetnav::cli::load_config(f.config);
  if (s.seed->count()) {
    if (cmd == Command::kGenerate) cfg.train_seed = f.seed;
    if (cmd == Command::kTrain) cfg.solver.seed = f.seed;
    if (cmd == Command::kEval) cfg.eval_seed = f.seed;
  }
  if (s.c->count()) cfg.history = f.c;
  if (s.lambda1->count()) cfg.lambda1 = f.lambda1;
  if (s.lambda2->count()) cfg.lambda2 = f.lambda2;
  if (s.preset->count()) {
    if (cmd == Command::kGenerate) cfg.train_presets = {f.preset};
    else cfg.eval_preset = f.preset;
  }
  if (s.modes->count()) cfg.modes = f.modes;
  if (s.runs->count()) cfg.runs = f.runs;
  if (s.out->count()) cfg.out = f.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offsetnav: consistent behavior generation experiments"};
  app.require_subcommand(1);

  Flags gen_flags, train_flags, eval_flags;
  auto* gen = app.add_subcommand("generate", "simulate demonstrations and write a dataset");
  const Shared gen_shared = add_shared(gen, gen_flags);

  auto* train = app.add_subcommand("train", "fit W and U on a dataset");
  const Shared train_shared = add_shared(train, train_flags);
  std::string dataset;
  bool verify = false;
  train->add_option("--dataset", dataset, "dataset directory")->required()->check(CLI::ExistingDirectory);
  train->add_flag("--verify-oracle", verify, "cross-check every fit against the proximal-gradient oracle");

  auto* eval = app.add_subcommand("eval", "closed-loop evaluation of a trained model");
  const Shared eval_shared = add_shared(eval, eval_flags);
  std::string model;
  eval->add_option("--model", model, "model JSON")->required()->check(CLI::ExistingFile);
  auto* slip_opt = eval->add_option("--slip", eval_flags.slip, "override the slip of every segment")
                       ->check(CLI::Range(0.0, 1.0));
  auto* profile_opt = eval->add_option("--profile", eval_flags.profile, "terrain profile JSON")
                          ->check(CLI::ExistingFile);

  std::string schema_name;
  auto* schema = app.add_subcommand("schema", "print a published JSON schema");
  schema->add_option("name", schema_name, "config | summary")
      ->required()
      ->check(CLI::IsMember({"config", "summary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? offsetnav::cli::kOk : offsetnav::cli::kUsage;
  }

  try {
    if (*schema) {
      const auto& s = schema_name == "config" ? offsetnav::io::config_schema()
                                              : offsetnav::io::summary_schema();
      std::cout << s.dump(2) << '\n';
      return offsetnav::cli::kOk;
    }
    if (*gen) {
      const auto cfg = resolve(gen_flags, gen_shared, Command::kGenerate);
      const auto r = offsetnav::cli::cmd_generate(cfg, cfg.out);
      std::printf("wrote %d episodes, %d samples to %s\n", r.episodes, r.samples, cfg.out.c_str());
      return offsetnav::cli::kOk;
    }
    if (*train) {
      const auto cfg = resolve(train_flags, train_shared, Command::kTrain);
      const auto r = offsetnav::cli::cmd_train(cfg, dataset, cfg.out, verify);
      for (const auto& m : r.models) {
        std::printf("lambda1=%g lambda2=%g converged=%s iterations=%d objective=%.10g",
                    m.lambda1, m.lambda2, m.converged ? "true" : "false", m.iterations,
                    m.objective);
        if (m.oracle_gap) std::printf(" oracle_gap=%.3e", *m.oracle_gap);
        std::printf(" -> %s\n", m.model_path.string().c_str());
      }
      if (r.verification_failed) {
        std::fprintf(stderr, "oracle verification failed: relative gap above %g\n",
                     offsetnav::cli::kOracleGapLimit);
        return offsetnav::cli::kVerification;
      }
      return offsetnav::cli::kOk;
    }
    auto cfg = resolve(eval_flags, eval_shared, Command::kEval);
    if (slip_opt->count()) cfg.eval_slip = eval_flags.slip;
    if (profile_opt->count()) cfg.eval_profile = eval_flags.profile;
    const auto r = offsetnav::cli::cmd_eval(cfg, model, cfg.out);
    std::cout << r.table;
    return offsetnav::cli::kOk;
  } catch (const offsetnav::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return offsetnav::cli::kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return offsetnav::cli::kUsage;
  }
}
