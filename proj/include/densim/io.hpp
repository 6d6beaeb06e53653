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
#include <string>
#include <vector>

#include "densim/qcore.hpp"
#include "densim/tomography.hpp"

namespace densim {

/// Complex matrices serialize as {"dim": N, "entries": [[re, im], ...]}
/// in row-major order.
nlohmann::json matrix_to_json(const CMat& m);
CMat matrix_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const DensityOperator& rho);
DensityOperator state_from_json(const nlohmann::json& j,
                                const Tolerances& tol = default_tolerances());

/// Formats a double so that parsing it back recovers the bits
/// (shortest round-trip form); all emitted files go through this.
std::string format_double(double x);

struct CsvColumn {
  std::string name;
  std::string type;  // "integer" | "number" | "string"
  std::string description;
};

/// Writes rows of preformatted cells plus the sidecar schema descriptor
/// `<path>.schema.json`.
void write_csv(const std::string& path, const std::vector<CsvColumn>& columns,
               const std::vector<std::vector<std::string>>& rows);

/// FrequencyTable as CSV (test-index, frequency, sample-size with
/// "exact" for exact probabilities) plus sidecar.
void write_frequency_table(const std::string& path, const FrequencyTable& table);
FrequencyTable read_frequency_table(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace densim
