// Copyright 2026 The GDP Authors
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

#include "gdp/csv.h"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace gdp {

std::optional<int> CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

int CsvTable::RequireColumn(std::string_view name) const {
  if (const auto c = Column(name)) return *c;
  std::string available;
  for (const auto& h : header) available += (available.empty() ? "" : ", ") + h;
  throw std::invalid_argument(fmt::format(
      "no column '{}' (available: {})", name, available));
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(begin));
      return out;
    }
    out.emplace_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw std::runtime_error(
        fmt::format("{} is empty (no header row)", path.string()));
  }
  table.header = SplitCsvLine(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = SplitCsvLine(line);
    if (row.size() != table.header.size()) {
      throw std::runtime_error(fmt::format(
          "{}: row {} has {} fields, header has {}", path.string(),
          table.rows.size() + 1, row.size(), table.header.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string CsvField(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == ',') c = ';';
    if (c == '"') c = '\'';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace gdp
