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

#ifndef GDP_SCHEDULE_H_
#define GDP_SCHEDULE_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdp {

enum class ScheduleKind { kCosine, kLinear };

// Discrete forward-noising schedule. alpha(t) for t in 1..T, alpha_bar(t)
// for t in 0..T with alpha_bar(0) = 1 and alpha_bar(t) the running product
// of alpha(1..t). Immutable once built.
class Schedule {
 public:
  static constexpr double kCosineOffset = 0.008;
  static constexpr double kMaxBeta = 0.999;

  // Improved-DDPM cosine schedule; beta clamped to kMaxBeta.
  static Schedule Cosine(int num_steps, double offset = kCosineOffset);
  // beta linearly spaced in [beta_start, beta_end].
  static Schedule Linear(int num_steps, double beta_start, double beta_end);

  int num_steps() const { return static_cast<int>(alphas_.size()); }
  ScheduleKind kind() const { return kind_; }
  double alpha(int t) const;
  double alpha_bar(int t) const;
  std::span<const double> alphas() const { return alphas_; }
  std::span<const double> alpha_bars() const { return alpha_bars_; }

  // Single-line text form, e.g. "schedule kind=cosine T=100 offset=0.008".
  std::string ToRecord() const;
  static Schedule FromRecord(std::string_view record);

 private:
  Schedule(ScheduleKind kind, std::vector<double> alphas, double p0,
           double p1);

  ScheduleKind kind_;
  std::vector<double> alphas_;      // index 0 holds alpha_1
  std::vector<double> alpha_bars_;  // index t holds alpha_bar_t
  double param0_;                   // offset, or beta_start
  double param1_;                   // unused, or beta_end
};

inline Schedule MakeCosineSchedule(int num_steps) {
  return Schedule::Cosine(num_steps);
}
inline Schedule MakeLinearSchedule(int num_steps, double beta_start,
                                   double beta_end) {
  return Schedule::Linear(num_steps, beta_start, beta_end);
}

// Inference time grid t_0 < t_1 < ... < t_delta. Denoising runs from
// t_delta down to t_0.
struct TimeGrid {
  std::vector<int> indices;

  int delta() const { return static_cast<int>(indices.size()) - 1; }
  int operator[](int j) const { return indices[j]; }
  int t_min() const { return indices.front(); }
  int t_max() const { return indices.back(); }
};

// Evenly spaced grid of delta + 1 integer timesteps from t_min to t_max
// (rounded half up).
TimeGrid MakeGrid(const Schedule& schedule, int delta, int t_min, int t_max);
// Grid 0 < s_1 < ... < s_delta where the model is evaluated at delta evenly
// spaced timesteps from t_min to t_max (t_min > 0) and the last step lands on
// t = 0. With delta = 1 the single evaluation is at t_max.
TimeGrid MakeEvaluationGrid(const Schedule& schedule, int delta, int t_min,
                            int t_max);
// The full grid 0, 1, ..., T.
TimeGrid FullGrid(const Schedule& schedule);
// Validates an explicit grid against the schedule.
TimeGrid GridFromIndices(const Schedule& schedule, std::vector<int> indices);

// Smallest t >= 1 with alpha_bar(t) >= threshold; throws if none.
int FirstStepWithAlphaBarAtLeast(const Schedule& schedule, double threshold);

}  // namespace gdp

#endif  // GDP_SCHEDULE_H_
