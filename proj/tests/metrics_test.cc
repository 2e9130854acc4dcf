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


#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gdp/errors.h"
#include "gdp/metrics.h"
#include "gdp/noise_model.h"
#include "gdp/rng.h"
#include "gdp/sampler.h"
#include "gdp/target.h"

namespace gdp {
namespace {

// 2 E|X - Y| - E|X - X'| - E|Y - Y'| for N(0, 1) and N(10, 1).
constexpr double kEnergyShiftedNormals = 17.743241665809567;

std::shared_ptr<const Schedule> Cosine100() {
  static const auto schedule =
      std::make_shared<const Schedule>(Schedule::Cosine(100));
  return schedule;
}

Matrix NormalSamples(int n, int d, double mean, std::uint64_t seed) {
  KeyedRng rng(seed);
  Matrix m(n, d);
  for (double& v : m.flat()) v = mean + rng.Normal();
  return m;
}

TEST(ClipFrequencyTest, AggregatesAndFilters) {
  StepTrace trace;
  StepRecord a;
  a.t = 50;
  a.clip_count = 3;
  a.total_entries = 10;
  StepRecord b;
  b.t = 10;
  b.clip_count = 1;
  b.total_entries = 30;
  trace.steps = {a, b};
  EXPECT_DOUBLE_EQ(ClipFrequency(trace), 0.1);
  EXPECT_DOUBLE_EQ(ClipFrequency(trace, 50), 0.3);
  EXPECT_THROW(ClipFrequency(trace, 77), UndefinedValueError);
  EXPECT_THROW(ClipFrequency(StepTrace{}), UndefinedValueError);
}

TEST(ClipFrequencyTest, MoreStepsClipMoreOnBoundaryTarget) {
  const OracleNoiseModel oracle(
      std::make_shared<const GmmTarget>(GmmTarget::BoundaryCorners(2, 0.01)),
      Cosine100());
  auto frequency = [&](int delta) {
    SamplerConfig c;
    c.schedule = Cosine100();
    c.grid = MakeGrid(*c.schedule, delta, 0, 100);
    return ClipFrequency(Sample(oracle, c, 2000, {}, 4).trace);
  };
  EXPECT_GT(frequency(100), frequency(5));
}

TEST(Wasserstein1DTest, KnownValues) {
  EXPECT_DOUBLE_EQ(Wasserstein1D({0, 1, 2}, {0, 1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(Wasserstein1D({0, 1, 2}, {3, 4, 5}), 3.0);
  EXPECT_DOUBLE_EQ(Wasserstein1D({2, 0, 1}, {1, 2, 0}), 0.0);
  // Point mass at 0 against an even split between 0 and 1.
  EXPECT_DOUBLE_EQ(Wasserstein1D({0}, {0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(Wasserstein1D({0, 0, 0}, {0, 1}), 0.5);
  EXPECT_THROW(Wasserstein1D({}, {1}), std::invalid_argument);
}

TEST(SlicedW1Test, ShiftAndSelfDistance) {
  const Matrix a = NormalSamples(10000, 2, 0.0, 1);
  const Matrix b = NormalSamples(10000, 2, 0.0, 2);
  EXPECT_EQ(SlicedW1(a, a), 0.0);
  const double self = SlicedW1(a, b);
  EXPECT_GT(self, 0.0);
  EXPECT_LT(self, 0.03);
  Matrix shifted = a;
  for (int i = 0; i < shifted.rows(); ++i) shifted(i, 0) += 1.0;
  // Mean of |<(1, 0), u>| over unit u in 2-D is 2 / pi.
  EXPECT_NEAR(SlicedW1(a, shifted, 1024), 2.0 / M_PI, 0.03);
  EXPECT_THROW(SlicedW1(a, Matrix(3, 3)), std::invalid_argument);
}

TEST(EnergyDistanceTest, ShiftedNormals) {
  const Matrix a = NormalSamples(1000, 1, 0.0, 3);
  const Matrix b = NormalSamples(1000, 1, 10.0, 4);
  EXPECT_NEAR(EnergyDistance(a, b), kEnergyShiftedNormals,
              0.05 * kEnergyShiftedNormals);
  EXPECT_NEAR(EnergyDistance(a, b, EnergyEstimator::kPlugIn),
              kEnergyShiftedNormals, 0.05 * kEnergyShiftedNormals);
  const Matrix c = NormalSamples(1000, 1, 0.0, 5);
  EXPECT_LT(std::abs(EnergyDistance(a, c)), 0.02);
  EXPECT_GE(EnergyDistance(a, a, EnergyEstimator::kPlugIn), 0.0);
}

TEST(PerModeMassTest, RecoversWeights) {
  const GmmTarget g = GmmTarget::ThreeMode();
  const auto mass = PerModeMass(g.Sample(100000, 6), g);
  ASSERT_EQ(mass.size(), 3u);
  EXPECT_NEAR(mass[0], 0.5, 0.01);
  EXPECT_NEAR(mass[1], 0.3, 0.01);
  EXPECT_NEAR(mass[2], 0.2, 0.01);
}

TEST(CompareToTargetTest, ReferenceAgainstItselfIsClose) {
  const GmmTarget g = GmmTarget::ThreeMode();
  const DistanceReport r = CompareToTarget(g.Sample(5000, 1),
                                           g.Sample(5000, 2), g);
  EXPECT_LT(r.sliced_w1, 0.05);
  EXPECT_LT(std::abs(r.energy_distance), 0.01);
}

int EstimateDimension(const GmmTarget& target, std::uint64_t seed) {
  auto shared = std::make_shared<const GmmTarget>(target);
  const OracleNoiseModel oracle(shared, Cosine100());
  const Matrix x0 = target.Sample(1, seed);
  const int t = DefaultProbeStep(*Cosine100());
  return IntrinsicDimension(oracle, x0.row(0), *Cosine100(), t,
                            10 * target.dim(), kDefaultDimensionTolerance,
                            seed)
      .dimension;
}

TEST(IntrinsicDimensionTest, SubspaceTargets) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const int two = EstimateDimension(GmmTarget::Subspace(2, 10, 0.5, seed),
                                      seed);
    EXPECT_GE(two, 1);
    EXPECT_LE(two, 3);
    const int full = EstimateDimension(GmmTarget::Diagonal(
        {1.0}, {{0, 0, 0, 0, 0}}, {{0.05, 0.05, 0.05, 0.05, 0.05}}), seed);
    EXPECT_GE(full, 4);
    EXPECT_LE(full, 5);
  }
}

TEST(IntrinsicDimensionTest, InvariantUnderRotation) {
  const int d = 6;
  KeyedRng rng(5);
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.Normal();
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m)
                                .householderQ();
  // Variance along 3 axes, nearly nothing along the rest.
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  cov.diagonal() << 0.1, 0.1, 0.1, 1e-9, 1e-9, 1e-9;
  const Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  const GmmTarget axis = GmmTarget::Full({1.0}, {mean}, {cov});
  const GmmTarget rotated =
      GmmTarget::Full({1.0}, {mean}, {q * cov * q.transpose()});
  for (std::uint64_t seed : {1u, 2u}) {
    EXPECT_EQ(EstimateDimension(axis, seed), 3);
    EXPECT_EQ(EstimateDimension(rotated, seed), 3);
  }
}

class NanModel final : public NoiseModel {
 public:
  int action_dim() const override { return 2; }
  int obs_dim() const override { return 0; }
  void Predict(const Matrix& x, std::span<const int>, const Matrix&,
               Matrix& eps) const override {
    eps = Matrix(x.rows(), x.cols(), std::numeric_limits<double>::infinity());
  }
};

TEST(IntrinsicDimensionTest, RejectsBadInputs) {
  const NanModel nan;
  const std::vector<double> x0 = {0.0, 0.0};
  const Schedule& s = *Cosine100();
  EXPECT_THROW(IntrinsicDimension(nan, x0, s, 1, 10), EstimationError);
  EXPECT_THROW(IntrinsicDimension(nan, x0, s, 1, 1), std::invalid_argument);
  EXPECT_THROW(IntrinsicDimension(nan, x0, s, 0, 10), std::invalid_argument);
  EXPECT_THROW(IntrinsicDimension(nan, x0, s, 1, 10, 0.0),
               std::invalid_argument);
  EXPECT_THROW(IntrinsicDimension(nan, std::vector<double>{0.0}, s, 1, 10),
               std::invalid_argument);
}

}  // namespace
}  // namespace gdp
