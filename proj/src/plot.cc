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

#include "gdp/plot.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

namespace gdp {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::optional<double> ToNumber(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Accumulator {
  double y = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

struct Point {
  double x, y, lo, hi;
};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string RenderLineChart(const CsvTable& table, const PlotSpec& spec) {
  const int xc = table.RequireColumn(spec.x);
  const int yc = table.RequireColumn(spec.y);
  const int gc =
      spec.group_by.empty() ? -1 : table.RequireColumn(spec.group_by);
  const auto loc = table.Column(spec.y + "_lo");
  const auto hic = table.Column(spec.y + "_hi");
  const bool band = loc.has_value() && hic.has_value();

  std::map<std::string, std::map<double, Accumulator>> series;
  for (const auto& row : table.rows) {
    const auto y = ToNumber(row[yc]);
    if (!y) continue;  // failed cells leave metrics empty
    const auto x = ToNumber(row[xc]);
    if (!x) {
      throw std::invalid_argument(fmt::format(
          "column '{}' has non-numeric value '{}'", spec.x, row[xc]));
    }
    Accumulator& acc = series[gc >= 0 ? row[gc] : spec.y][*x];
    acc.y += *y;
    if (band) {
      acc.lo += ToNumber(row[*loc]).value_or(*y);
      acc.hi += ToNumber(row[*hic]).value_or(*y);
    }
    ++acc.n;
  }
  if (series.empty()) {
    throw std::invalid_argument(
        fmt::format("no rows with a numeric '{}' to plot", spec.y));
  }

  std::map<std::string, std::vector<Point>> points;
  double x_min = INFINITY, x_max = -INFINITY;
  double y_min = INFINITY, y_max = -INFINITY;
  for (const auto& [group, by_x] : series) {
    for (const auto& [x, acc] : by_x) {
      Point p{x, acc.y / acc.n, acc.lo / acc.n, acc.hi / acc.n};
      if (!band) p.lo = p.hi = p.y;
      points[group].push_back(p);
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min({y_min, p.y, p.lo});
      y_max = std::max({y_max, p.y, p.hi});
    }
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max == y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double y) {
    return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" "
      "height=\"{1}\" viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"{0}\" height=\"{1}\" "
      "fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 4.0;
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}"
        "</text>\n",
        sx(xv), kHeight - kBottom + 18, xv);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
        kLeft - 6, sy(yv) + 4, yv);
  }
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
      kLeft + plot_w / 2, kHeight - 10, Escape(spec.x));
  svg += fmt::format(
      "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
      kTop + plot_h / 2, kTop + plot_h / 2, Escape(spec.y));
  if (!spec.title.empty()) {
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" "
        "font-size=\"14\">{}</text>\n",
        kLeft + plot_w / 2, Escape(spec.title));
  }

  int index = 0;
  for (const auto& [group, pts] : points) {
    const char* color = kPalette[index % kPalette.size()];
    if (band) {
      std::string poly;
      for (const auto& p : pts) {
        poly += fmt::format("{:.1f},{:.1f} ", sx(p.x), sy(p.hi));
      }
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        poly += fmt::format("{:.1f},{:.1f} ", sx(it->x), sy(it->lo));
      }
      svg += fmt::format(
          "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" "
          "stroke=\"none\"/>\n",
          poly, color);
    }
    std::string line;
    for (const auto& p : pts) {
      line += fmt::format("{:.1f},{:.1f} ", sx(p.x), sy(p.y));
    }
    svg += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        line, color);
    for (const auto& p : pts) {
      svg += fmt::format(
          "<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n",
          sx(p.x), sy(p.y), color);
    }
    const double ly = kTop + 12 + 18 * index;
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" "
        "stroke=\"{3}\" stroke-width=\"2\"/>\n<text x=\"{4:.1f}\" "
        "y=\"{5:.1f}\">{6}</text>\n",
        kWidth - kRight + 10, ly, kWidth - kRight + 30, color,
        kWidth - kRight + 36, ly + 4,
        Escape(spec.group_by.empty() ? group
                                     : spec.group_by + "=" + group));
    ++index;
  }
  svg += "</svg>\n";
  return svg;
}

void PlotResults(const std::filesystem::path& csv, const PlotSpec& spec,
                 const std::filesystem::path& svg) {
  const std::string text = RenderLineChart(ReadCsv(csv), spec);
  std::ofstream out(svg);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write {}", svg.string()));
  }
  out << text;
}

}  // namespace gdp
