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

#ifndef GDP_STATS_H_
#define GDP_STATS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace gdp {

struct Proportion {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Success fraction with a Wilson score interval (default 95%).
Proportion WilsonInterval(std::int64_t successes, std::int64_t trials,
                          double z = 1.959963984540054);
// From per-episode outcomes. Throws std::invalid_argument when empty.
Proportion SuccessRate(std::span<const bool> outcomes);

// Ranks with ties averaged, 1-based.
std::vector<double> AverageRanks(std::span<const double> v);
double SpearmanRho(std::span<const double> x, std::span<const double> y);

struct TTestResult {
  double mean_difference = 0.0;
  double t = 0.0;
  int dof = 0;
  // P(T >= t) under the null, i.e. evidence that mean(a - b) > 0.
  double p_greater = 1.0;
  double p_two_sided = 1.0;
};

// Paired t-test on the differences a_i - b_i.
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of `counts` against equal cell probabilities.
ChiSquareResult ChiSquareUniformity(std::span<const std::int64_t> counts);

double Mean(std::span<const double> v);
// Unbiased sample variance.
double Variance(std::span<const double> v);

}  // namespace gdp

#endif  // GDP_STATS_H_
