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

#include "gdp/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace gdp {

Proportion WilsonInterval(std::int64_t successes, std::int64_t trials,
                          double z) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("WilsonInterval: need 0 <= k <= n, n > 0");
  }
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

Proportion SuccessRate(std::span<const bool> outcomes) {
  if (outcomes.empty()) {
    throw std::invalid_argument("SuccessRate: no outcomes");
  }
  const auto wins = std::count(outcomes.begin(), outcomes.end(), true);
  return WilsonInterval(wins, static_cast<std::int64_t>(outcomes.size()));
}

std::vector<double> AverageRanks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double SpearmanRho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("SpearmanRho: need two equal-length series");
  }
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  const double mx = Mean(rx);
  const double my = Mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("PairedTTest: need two equal-length series");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  TTestResult r;
  r.dof = static_cast<int>(diff.size()) - 1;
  r.mean_difference = Mean(diff);
  const double se = std::sqrt(Variance(diff) / diff.size());
  if (se == 0.0) {
    r.t = r.mean_difference == 0.0
              ? 0.0
              : std::copysign(INFINITY, r.mean_difference);
    r.p_greater = r.mean_difference > 0.0 ? 0.0 : 1.0;
    r.p_two_sided = r.mean_difference != 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.t = r.mean_difference / se;
  const boost::math::students_t dist(r.dof);
  r.p_greater = boost::math::cdf(boost::math::complement(dist, r.t));
  r.p_two_sided =
      2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

ChiSquareResult ChiSquareUniformity(std::span<const std::int64_t> counts) {
  if (counts.size() < 2) {
    throw std::invalid_argument("ChiSquareUniformity: need two cells");
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) {
    throw std::invalid_argument("ChiSquareUniformity: no observations");
  }
  const double expected = total / counts.size();
  ChiSquareResult r;
  for (std::int64_t c : counts) {
    const double diff = c - expected;
    r.statistic += diff * diff / expected;
  }
  r.dof = static_cast<int>(counts.size()) - 1;
  const boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double Mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("Mean: empty");
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double Variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("Variance: need two values");
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace gdp
