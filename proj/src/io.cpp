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

#include "densim/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace densim {

nlohmann::json matrix_to_json(const CMat& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"dim", m.rows()}, {"entries", entries}};
}

CMat matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  const auto& entries = j.at("entries");
  if (static_cast<Eigen::Index>(entries.size()) != dim * dim)
    throw std::invalid_argument("matrix_from_json: entry count != dim^2");
  CMat m(dim, dim);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index jj = 0; jj < dim; ++jj, ++k)
      m(i, jj) = Cplx(entries[k][0].get<double>(), entries[k][1].get<double>());
  return m;
}

nlohmann::json state_to_json(const DensityOperator& rho) { return matrix_to_json(rho.entries()); }

DensityOperator state_from_json(const nlohmann::json& j, const Tolerances& tol) {
  return DensityOperator(matrix_from_json(j), tol);
}

std::string format_double(double x) {
  char buf[64];
  // %.17g round-trips; try shorter forms first for readable files.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  return buf;
}

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c)
    os << columns[c].name << (c + 1 < columns.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("write_csv: row width != column count");
    for (std::size_t c = 0; c < row.size(); ++c)
      os << row[c] << (c + 1 < row.size() ? "," : "\n");
  }
  write_file(path, os.str());

  nlohmann::json schema;
  schema["columns"] = nlohmann::json::array();
  for (const auto& col : columns)
    schema["columns"].push_back(
        {{"name", col.name}, {"type", col.type}, {"description", col.description}});
  write_file(path + ".schema.json", schema.dump(2) + "\n");
}

void write_frequency_table(const std::string& path, const FrequencyTable& table) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    const auto& n = table.sample_sizes[i];
    rows.push_back({std::to_string(i), format_double(table.values[i]),
                    n ? std::to_string(*n) : "exact"});
  }
  write_csv(path,
            {{"test-index", "integer", "position in the standard test suite ordering"},
             {"frequency", "number", "observed or exact test probability"},
             {"sample-size", "string", "repetitions, or 'exact' for exact probabilities"}},
            rows);
}

FrequencyTable read_frequency_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_frequency_table: cannot open " + path);
  FrequencyTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_frequency_table: empty file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string index, freq, size;
    if (!std::getline(row, index, ',') || !std::getline(row, freq, ',') ||
        !std::getline(row, size, ','))
      throw std::runtime_error("read_frequency_table: malformed row '" + line + "'");
    const double value = std::strtod(freq.c_str(), nullptr);
    if (value < 0.0 || value > 1.0)
      throw std::runtime_error("read_frequency_table: frequency " + freq + " outside [0, 1]");
    table.values.push_back(value);
    if (size == "exact")
      table.sample_sizes.push_back(std::nullopt);
    else
      table.sample_sizes.push_back(std::strtoull(size.c_str(), nullptr, 10));
  }
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_file: cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_file: cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("write_file: failed writing " + path);
}

std::string sha256_file(const std::string& path) {
  const std::string bytes = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256_file: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace densim
