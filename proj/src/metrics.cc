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

#include "gdp/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "gdp/errors.h"
#include "gdp/kernels/kernels.h"
#include "gdp/rng.h"

namespace gdp {
namespace {

constexpr std::uint64_t kProjectionTag = 0x70726f6a;
constexpr std::uint64_t kProbeTag = 0x70726f6265;

// Sum over all pairs (i, j) of |a_i - b_j|.
double PairwiseDistanceSum(const Matrix& a, const Matrix& b) {
  const int d = a.cols();
  double total = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    for (int j = 0; j < b.rows(); ++j) {
      const double* bj = b.row(j).data();
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double r = ai[k] - bj[k];
        s += r * r;
      }
      total += std::sqrt(s);
    }
  }
  return total;
}

}  // namespace

double ClipFrequency(const StepTrace& trace, std::optional<int> t) {
  std::int64_t clipped = 0;
  std::int64_t total = 0;
  for (const auto& s : trace.steps) {
    if (t && s.t != *t) continue;
    clipped += s.clip_count;
    total += s.total_entries;
  }
  if (total == 0) {
    throw UndefinedValueError("clip frequency: no entries selected");
  }
  return static_cast<double>(clipped) / total;
}

double Wasserstein1D(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("Wasserstein1D: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
    return total / a.size();
  }
  // Integrate |Fa^-1(u) - Fb^-1(u)| over the merged quantile breakpoints.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double u = 0.0;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next_a = (i + 1) / na;
    const double next_b = (j + 1) / nb;
    const double next = std::min(next_a, next_b);
    total += (next - u) * std::abs(a[i] - b[j]);
    u = next;
    if (next_a <= next) ++i;
    if (next_b <= next) ++j;
  }
  return total;
}

double SlicedW1(const Matrix& a, const Matrix& b, int projections,
                std::uint64_t seed) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("SlicedW1: dimension mismatch");
  }
  if (a.rows() == 0 || b.rows() == 0) {
    throw std::invalid_argument("SlicedW1: empty batch");
  }
  if (projections < 1) {
    throw std::invalid_argument("SlicedW1: projections must be positive");
  }
  const int d = a.cols();
  const auto& k = kernels::Active();
  std::vector<double> dir(d);
  std::vector<double> pa(a.rows());
  std::vector<double> pb(b.rows());
  double total = 0.0;
  for (int m = 0; m < projections; ++m) {
    KeyedRng rng(StreamKey(seed, kProjectionTag, m));
    double norm = 0.0;
    while (norm == 0.0) {
      rng.FillNormal(dir);
      norm = std::sqrt(k.sum_squares(dir.data(), d));
    }
    for (double& v : dir) v /= norm;
    for (int i = 0; i < a.rows(); ++i) {
      pa[i] = k.dot(a.row(i).data(), dir.data(), d);
    }
    for (int i = 0; i < b.rows(); ++i) {
      pb[i] = k.dot(b.row(i).data(), dir.data(), d);
    }
    total += Wasserstein1D(pa, pb);
  }
  return total / projections;
}

double EnergyDistance(const Matrix& a, const Matrix& b,
                      EnergyEstimator estimator) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("EnergyDistance: dimension mismatch");
  }
  const double n = a.rows();
  const double m = b.rows();
  const bool u_stat = estimator == EnergyEstimator::kUStatistic;
  if (n < (u_stat ? 2 : 1) || m < (u_stat ? 2 : 1)) {
    throw std::invalid_argument("EnergyDistance: batch too small");
  }
  const double ab = PairwiseDistanceSum(a, b) / (n * m);
  const double aa = PairwiseDistanceSum(a, a) / (u_stat ? n * (n - 1) : n * n);
  const double bb = PairwiseDistanceSum(b, b) / (u_stat ? m * (m - 1) : m * m);
  return 2.0 * ab - aa - bb;
}

std::vector<double> PerModeMass(const Matrix& samples,
                                const GmmTarget& target) {
  if (samples.rows() == 0) {
    throw std::invalid_argument("PerModeMass: empty batch");
  }
  if (samples.cols() != target.dim()) {
    throw std::invalid_argument("PerModeMass: dimension mismatch");
  }
  std::vector<double> mass(target.num_components(), 0.0);
  for (int i = 0; i < samples.rows(); ++i) {
    mass[target.NearestMode(samples.row(i))] += 1.0;
  }
  for (double& v : mass) v /= samples.rows();
  return mass;
}

DistanceReport CompareToTarget(const Matrix& samples, const Matrix& reference,
                               const GmmTarget& target, int projections,
                               std::uint64_t seed) {
  DistanceReport report;
  report.sliced_w1 = SlicedW1(samples, reference, projections, seed);
  report.energy_distance = EnergyDistance(samples, reference);
  report.per_mode_mass = PerModeMass(samples, target);
  return report;
}

IntrinsicDimensionResult IntrinsicDimension(
    const NoiseModel& model, std::span<const double> x0,
    const Schedule& schedule, int t_probe, int probes, double tol,
    std::uint64_t seed, std::span<const double> obs) {
  const int d = model.action_dim();
  if (static_cast<int>(x0.size()) != d) {
    throw std::invalid_argument("IntrinsicDimension: x0 width mismatch");
  }
  if (probes < d) {
    throw std::invalid_argument("IntrinsicDimension: need probes >= d");
  }
  if (t_probe < 1 || t_probe > schedule.num_steps()) {
    throw std::invalid_argument("IntrinsicDimension: t_probe out of range");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("IntrinsicDimension: tol must be positive");
  }
  const double a = std::sqrt(schedule.alpha_bar(t_probe));
  const double s = std::sqrt(1.0 - schedule.alpha_bar(t_probe));
  Matrix x(probes, d);
  for (int i = 0; i < probes; ++i) {
    KeyedRng rng(StreamKey(seed, kProbeTag, i));
    auto row = x.row(i);
    rng.FillNormal(row);
    for (int k = 0; k < d; ++k) row[k] = a * x0[k] + s * row[k];
  }
  Matrix eps;
  PredictShared(model, x, t_probe, obs, eps);

  Eigen::MatrixXd stacked(probes, d);
  for (int i = 0; i < probes; ++i) {
    for (int k = 0; k < d; ++k) stacked(i, k) = eps(i, k);
  }
  if (!stacked.allFinite()) {
    throw EstimationError("IntrinsicDimension: non-finite model output");
  }
  stacked.rowwise() -= stacked.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  const Eigen::VectorXd sv = svd.singularValues();
  if (!sv.allFinite()) {
    throw EstimationError("IntrinsicDimension: SVD did not converge");
  }

  IntrinsicDimensionResult result;
  result.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double threshold = tol * std::sqrt(static_cast<double>(probes));
  for (double v : result.singular_values) {
    if (v >= threshold) ++result.codimension;
  }
  result.dimension = d - result.codimension;
  return result;
}

int DefaultProbeStep(const Schedule& schedule) {
  return FirstStepWithAlphaBarAtLeast(schedule, 0.99);
}

}  // namespace gdp
