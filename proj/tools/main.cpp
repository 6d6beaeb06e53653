// Copyright 2026 The densim Authors
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

#include <CLI11.hpp>
#include <iostream>

#include "densim/io.hpp"
#include "densim/version.hpp"
#include "experiments.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

int do_validate(const std::string& path) {
  const auto diags = densim::cli::validate_config_file(path);
  for (const auto& d : diags) std::cerr << path << ": " << d << "\n";
  return diags.empty() ? 0 : kExitValidation;
}

int do_run(const std::string& path, const std::optional<std::int64_t>& seed,
           const std::optional<std::string>& out_prefix, const std::optional<int>& threads) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(densim::read_file(path));
  } catch (const std::exception& e) {
    std::cerr << path << ": parse error: " << e.what() << "\n";
    return kExitValidation;
  }
  if (seed) doc["seed"] = *seed;
  if (out_prefix) doc["output"] = *out_prefix;
  if (threads) doc["threads"] = *threads;

  const auto diags = densim::cli::validate_config(doc);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << path << ": " << d << "\n";
    return kExitValidation;
  }
  try {
    const densim::cli::ExperimentConfig config = densim::cli::load_config(doc);
    const densim::cli::RunManifest manifest = densim::cli::run_experiment(config);
    for (const auto& [file, digest] : manifest.outputs)
      std::cout << file << "  sha256:" << digest.substr(0, 12) << "\n";
    std::cout << config.output << ".manifest.json\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "experiment '" << doc.value("kind", "?") << "' failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"densim: density-operator measurement and dynamics experiments"};
  app.set_version_flag("--version", densim::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::int64_t> seed;
  std::optional<std::string> out_prefix;
  std::optional<int> threads;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config,config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_prefix, "override the output path prefix");
  run->add_option("--threads", threads, "worker threads for ensembles and sweeps");

  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config,config", config_path, "experiment config (JSON)")->required();

  CLI::App* list = app.add_subcommand("list-kinds", "print available experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (list->parsed()) {
    for (const auto& kind : densim::cli::experiment_kinds()) std::cout << kind << "\n";
    return 0;
  }
  if (validate->parsed()) return do_validate(config_path);
  return do_run(config_path, seed, out_prefix, threads);
}
