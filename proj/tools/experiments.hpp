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

#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace densim::cli {

/// Declarative description of one batch experiment.
struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  std::string output;            // path prefix for all emitted files
  nlohmann::json parameters = nlohmann::json::object();
  int threads = 1;
};

const std::vector<std::string>& experiment_kinds();

/// Parses and fully validates a config document. Diagnostics are
/// field-level messages; an empty list means the config is runnable.
std::vector<std::string> validate_config(const nlohmann::json& doc);

/// Parse from a file; parse errors surface as diagnostics too.
std::vector<std::string> validate_config_file(const std::string& path);

/// Loads a validated config (throws std::invalid_argument with the first
/// diagnostic if validation fails).
ExperimentConfig load_config(const nlohmann::json& doc);

struct RunManifest {
  nlohmann::json config_echo;
  std::string version;
  double duration_seconds = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256

  nlohmann::json to_json() const;
};

/// Executes the experiment, writes its data files plus
/// `<output>.manifest.json`, and returns the manifest. Identical config
/// (seed included) reproduces byte-identical data files.
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace densim::cli
