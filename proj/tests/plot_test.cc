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


#include <filesystem>
#include <fstream>
#include <string>
#include <utility>

#include <gtest/gtest.h>

#include "gdp/plot.h"

namespace gdp {
namespace {

namespace fs = std::filesystem;

PlotSpec Spec(std::string x, std::string y, std::string group_by = "",
              std::string title = "") {
  PlotSpec spec;
  spec.x = std::move(x);
  spec.y = std::move(y);
  spec.group_by = std::move(group_by);
  spec.title = std::move(title);
  return spec;
}

CsvTable Table() {
  CsvTable t;
  t.header = {"steps", "strategy", "sliced_w1", "sliced_w1_lo",
              "sliced_w1_hi"};
  t.rows = {{"2", "ddpm", "0.4", "0.3", "0.5"},
            {"5", "ddpm", "0.2", "0.1", "0.3"},
            {"5", "ddpm", "0.4", "0.3", "0.5"},
            {"2", "gdp", "0.1", "0.05", "0.15"},
            {"5", "gdp", "", "", ""}};
  return t;
}

int Count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto p = text.find(needle); p != std::string::npos;
       p = text.find(needle, p + 1)) {
    ++n;
  }
  return n;
}

TEST(PlotTest, OneSeriesPerGroupWithBands) {
  const std::string svg =
      RenderLineChart(Table(), Spec("steps", "sliced_w1", "strategy", "a<b"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(Count(svg, "<polyline"), 2);
  EXPECT_EQ(Count(svg, "<polygon"), 2);
  EXPECT_NE(svg.find(">strategy=ddpm<"), std::string::npos);
  EXPECT_NE(svg.find(">strategy=gdp<"), std::string::npos);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
}

TEST(PlotTest, UngroupedChartHasOneSeries) {
  const std::string svg = RenderLineChart(Table(), Spec("steps", "sliced_w1"));
  EXPECT_EQ(Count(svg, "<polyline"), 1);
}

TEST(PlotTest, Errors) {
  EXPECT_THROW(RenderLineChart(Table(), Spec("steps", "nope")),
               std::invalid_argument);
  EXPECT_THROW(RenderLineChart(Table(), Spec("strategy", "sliced_w1")),
               std::invalid_argument);
  CsvTable empty = Table();
  for (auto& row : empty.rows) row[2] = "";
  EXPECT_THROW(RenderLineChart(empty, Spec("steps", "sliced_w1")),
               std::invalid_argument);
}

TEST(PlotTest, WritesNothingOnError) {
  const fs::path dir = fs::temp_directory_path() / "gdp_plot_test";
  fs::create_directories(dir);
  const fs::path csv = dir / "r.csv";
  {
    std::ofstream out(csv);
    out << "steps,sliced_w1\n2,0.5\n5,0.25\n";
  }
  const fs::path bad = dir / "bad.svg";
  fs::remove(bad);
  EXPECT_THROW(PlotResults(csv, Spec("steps", "energy"), bad),
               std::invalid_argument);
  EXPECT_FALSE(fs::exists(bad));
  EXPECT_THROW(
      PlotResults(dir / "missing.csv", Spec("steps", "sliced_w1"), bad),
               std::runtime_error);
  EXPECT_FALSE(fs::exists(bad));
  const fs::path good = dir / "good.svg";
  PlotResults(csv, Spec("steps", "sliced_w1"), good);
  EXPECT_TRUE(fs::exists(good));
  EXPECT_GT(fs::file_size(good), 100u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace gdp
