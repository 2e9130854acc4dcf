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

#ifndef GDP_METRICS_H_
#define GDP_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gdp/matrix.h"
#include "gdp/noise_model.h"
#include "gdp/sampler.h"
#include "gdp/schedule.h"
#include "gdp/target.h"

namespace gdp {

inline constexpr int kDefaultProjections = 128;
inline constexpr double kDefaultDimensionTolerance = 0.1;

// Sum of clip counts over sum of entries, optionally restricted to steps
// with t_j == t. Throws UndefinedValueError when nothing is selected.
double ClipFrequency(const StepTrace& trace, std::optional<int> t = {});

// Wasserstein-1 between two 1-D empirical distributions (any sizes).
double Wasserstein1D(std::vector<double> a, std::vector<double> b);

// Mean over `projections` seeded random unit directions of the 1-D W1
// between the projected batches.
double SlicedW1(const Matrix& a, const Matrix& b,
                int projections = kDefaultProjections,
                std::uint64_t seed = 0);

enum class EnergyEstimator { kUStatistic, kPlugIn };

// 2 E|A - B| - E|A - A'| - E|B - B'|.
double EnergyDistance(const Matrix& a, const Matrix& b,
                      EnergyEstimator estimator = EnergyEstimator::kUStatistic);

// Fraction of samples whose nearest component mean is k.
std::vector<double> PerModeMass(const Matrix& samples,
                                const GmmTarget& target);

struct DistanceReport {
  double sliced_w1 = 0.0;
  double energy_distance = 0.0;
  std::vector<double> per_mode_mass;
};

DistanceReport CompareToTarget(const Matrix& samples, const Matrix& reference,
                               const GmmTarget& target,
                               int projections = kDefaultProjections,
                               std::uint64_t seed = 0);

struct IntrinsicDimensionResult {
  int dimension = 0;
  int codimension = 0;
  std::vector<double> singular_values;  // descending
};

// Noise-model PCA around x0: evaluate eps at `probes` forward-noised copies
// of x0 at t_probe, center, and count singular values at least
// tol * sqrt(probes), the scale of a direction in which the model echoes the
// injected unit noise. Those directions are normal to the data; the
// estimate is d minus their count. Requires probes >= d.
IntrinsicDimensionResult IntrinsicDimension(
    const NoiseModel& model, std::span<const double> x0,
    const Schedule& schedule, int t_probe, int probes,
    double tol = kDefaultDimensionTolerance, std::uint64_t seed = 0,
    std::span<const double> obs = {});

// Smallest t with alpha_bar(t) >= 0.99.
int DefaultProbeStep(const Schedule& schedule);

}  // namespace gdp

#endif  // GDP_METRICS_H_
