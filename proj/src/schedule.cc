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

#include "gdp/schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace gdp {

Schedule::Schedule(ScheduleKind kind, std::vector<double> alphas, double p0,
                   double p1)
    : kind_(kind), alphas_(std::move(alphas)), param0_(p0), param1_(p1) {
  alpha_bars_.resize(alphas_.size() + 1);
  alpha_bars_[0] = 1.0;
  for (std::size_t t = 1; t <= alphas_.size(); ++t) {
    alpha_bars_[t] = alpha_bars_[t - 1] * alphas_[t - 1];
  }
}

Schedule Schedule::Cosine(int num_steps, double offset) {
  if (num_steps < 1) {
    throw std::invalid_argument("cosine schedule needs T >= 1");
  }
  const auto f = [&](int t) {
    const double c = std::cos((static_cast<double>(t) / num_steps + offset) /
                              (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  const double f0 = f(0);
  std::vector<double> alphas(num_steps);
  double prev = 1.0;
  for (int t = 1; t <= num_steps; ++t) {
    const double bar = f(t) / f0;
    const double beta = std::clamp(1.0 - bar / prev, 0.0, kMaxBeta);
    alphas[t - 1] = 1.0 - beta;
    prev = bar;
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument("cosine schedule: degenerate alpha for T=" +
                                  std::to_string(num_steps));
    }
  }
  return Schedule(ScheduleKind::kCosine, std::move(alphas), offset, 0.0);
}

Schedule Schedule::Linear(int num_steps, double beta_start, double beta_end) {
  if (num_steps < 1) {
    throw std::invalid_argument("linear schedule needs T >= 1");
  }
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw std::invalid_argument(
        "linear schedule needs 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> alphas(num_steps);
  for (int t = 0; t < num_steps; ++t) {
    const double frac =
        num_steps == 1 ? 0.0 : static_cast<double>(t) / (num_steps - 1);
    alphas[t] = 1.0 - (beta_start + frac * (beta_end - beta_start));
  }
  return Schedule(ScheduleKind::kLinear, std::move(alphas), beta_start,
                  beta_end);
}

double Schedule::alpha(int t) const {
  if (t < 1 || t > num_steps()) {
    throw std::out_of_range("alpha index out of range");
  }
  return alphas_[t - 1];
}

double Schedule::alpha_bar(int t) const {
  if (t < 0 || t > num_steps()) {
    throw std::out_of_range("alpha_bar index out of range");
  }
  return alpha_bars_[t];
}

std::string Schedule::ToRecord() const {
  if (kind_ == ScheduleKind::kCosine) {
    return fmt::format("schedule kind=cosine T={} offset={:.17g}",
                       num_steps(), param0_);
  }
  return fmt::format("schedule kind=linear T={} beta_start={:.17g} "
                     "beta_end={:.17g}",
                     num_steps(), param0_, param1_);
}

Schedule Schedule::FromRecord(std::string_view record) {
  std::istringstream in{std::string(record)};
  std::string word;
  in >> word;
  if (word != "schedule") {
    throw std::invalid_argument("not a schedule record");
  }
  std::string kind;
  int steps = -1;
  double offset = kCosineOffset, beta_start = -1.0, beta_end = -1.0;
  while (in >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("malformed schedule field: " + word);
    }
    const std::string key = word.substr(0, eq);
    const std::string value = word.substr(eq + 1);
    if (key == "kind") {
      kind = value;
    } else if (key == "T") {
      steps = std::stoi(value);
    } else if (key == "offset") {
      offset = std::stod(value);
    } else if (key == "beta_start") {
      beta_start = std::stod(value);
    } else if (key == "beta_end") {
      beta_end = std::stod(value);
    } else {
      throw std::invalid_argument("unknown schedule field: " + key);
    }
  }
  if (kind == "cosine") return Cosine(steps, offset);
  if (kind == "linear") return Linear(steps, beta_start, beta_end);
  throw std::invalid_argument("unknown schedule kind: " + kind);
}

TimeGrid MakeGrid(const Schedule& schedule, int delta, int t_min, int t_max) {
  if (delta < 1) throw std::invalid_argument("grid needs delta >= 1");
  if (t_min < 0 || t_max > schedule.num_steps()) {
    throw std::invalid_argument("grid endpoints outside [0, T]");
  }
  if (t_min >= t_max) throw std::invalid_argument("grid needs t_min < t_max");
  const int span = t_max - t_min;
  if (delta > span) {
    throw std::invalid_argument("grid delta larger than t_max - t_min");
  }
  TimeGrid grid;
  grid.indices.resize(delta + 1);
  for (int j = 0; j <= delta; ++j) {
    // round((t_min * delta + j * span) / delta), half up, in integers.
    const long numerator = static_cast<long>(t_min) * delta +
                           static_cast<long>(j) * span;
    grid.indices[j] = static_cast<int>((2 * numerator + delta) / (2L * delta));
  }
  // Re-spread collisions. None occur while span >= delta.
  for (int j = 1; j <= delta; ++j) {
    if (grid.indices[j] <= grid.indices[j - 1]) {
      grid.indices[j] = grid.indices[j - 1] + 1;
    }
  }
  for (int j = delta - 1; j >= 0; --j) {
    if (grid.indices[j] >= grid.indices[j + 1]) {
      grid.indices[j] = grid.indices[j + 1] - 1;
    }
  }
  return grid;
}

TimeGrid MakeEvaluationGrid(const Schedule& schedule, int delta, int t_min,
                            int t_max) {
  if (t_min < 1) {
    throw std::invalid_argument("evaluation grid needs t_min >= 1");
  }
  TimeGrid grid;
  if (delta == 1) {
    if (t_max > schedule.num_steps()) {
      throw std::invalid_argument("grid endpoints outside [0, T]");
    }
    grid.indices = {0, t_max};
    return grid;
  }
  grid = MakeGrid(schedule, delta - 1, t_min, t_max);
  grid.indices.insert(grid.indices.begin(), 0);
  return grid;
}

TimeGrid FullGrid(const Schedule& schedule) {
  return MakeGrid(schedule, schedule.num_steps(), 0, schedule.num_steps());
}

TimeGrid GridFromIndices(const Schedule& schedule, std::vector<int> indices) {
  if (indices.size() < 2) {
    throw std::invalid_argument("grid needs at least two timesteps");
  }
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] > schedule.num_steps()) {
      throw std::invalid_argument("grid timestep outside [0, T]");
    }
    if (j > 0 && indices[j] <= indices[j - 1]) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }
  return TimeGrid{std::move(indices)};
}

int FirstStepWithAlphaBarAtLeast(const Schedule& schedule, double threshold) {
  for (int t = 1; t <= schedule.num_steps(); ++t) {
    if (schedule.alpha_bar(t) >= threshold) return t;
  }
  throw std::invalid_argument("no timestep reaches the alpha_bar threshold");
}

}  // namespace gdp
