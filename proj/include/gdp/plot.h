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

#ifndef GDP_PLOT_H_
#define GDP_PLOT_H_

#include <filesystem>
#include <string>

#include "gdp/csv.h"

namespace gdp {

struct PlotSpec {
  std::string x;
  std::string y;
  std::string group_by;  // optional
  std::string title;
};

// Line chart of y against x with one series per group. Rows sharing a
// (group, x) pair are averaged. Columns named <y>_lo and <y>_hi, when
// present, are drawn as a shaded band. Throws on missing columns,
// non-numeric x or y, or a table without usable rows.
std::string RenderLineChart(const CsvTable& table, const PlotSpec& spec);

// Reads the results file and writes the SVG. Nothing is written on error.
void PlotResults(const std::filesystem::path& csv, const PlotSpec& spec,
                 const std::filesystem::path& svg);

}  // namespace gdp

#endif  // GDP_PLOT_H_
