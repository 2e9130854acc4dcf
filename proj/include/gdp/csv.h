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

#ifndef GDP_CSV_H_
#define GDP_CSV_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gdp {

// Plain comma-separated table with a header row. Fields never contain
// commas or quotes; writers replace them.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<int> Column(std::string_view name) const;
  // Throws std::invalid_argument naming the available columns.
  int RequireColumn(std::string_view name) const;
};

std::vector<std::string> SplitCsvLine(std::string_view line);
// Throws std::runtime_error when the file is missing or has no header.
CsvTable ReadCsv(const std::filesystem::path& path);
// Makes text safe for a CSV field.
std::string CsvField(std::string_view text);

}  // namespace gdp

#endif  // GDP_CSV_H_
