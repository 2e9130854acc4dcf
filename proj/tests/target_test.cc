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
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "gdp/noise_model.h"
#include "gdp/rng.h"
#include "gdp/schedule.h"
#include "gdp/target.h"
#include "oracles.h"

namespace gdp {
namespace {

// sqrt(1 - abar_50) * 0.3 / (abar_50 * 0.25 + 1 - abar_50), cosine T = 100.
constexpr double kSingleGaussianEps = 0.33899006288689471;

TEST(GmmTargetTest, SingleGaussianClosedForm) {
  const Schedule s = Schedule::Cosine(100);
  const GmmTarget g = GmmTarget::Diagonal({1.0}, {{0.0}}, {{0.25}});
  const std::vector<double> x = {0.3};
  EXPECT_NEAR(g.OptimalEps(s, x, 50)[0], kSingleGaussianEps, 1e-14);
  for (int t : {1, 10, 50, 99, 100}) {
    const double abar = s.alpha_bar(t);
    const double expected =
        std::sqrt(1.0 - abar) * 0.3 / (abar * 0.25 + 1.0 - abar);
    EXPECT_NEAR(g.OptimalEps(s, x, t)[0], expected, 1e-13) << "t=" << t;
  }
}

TEST(GmmTargetTest, EpsIsScaledScore) {
  const Schedule s = Schedule::Cosine(100);
  const GmmTarget g = GmmTarget::ThreeMode();
  KeyedRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int t = 1 + static_cast<int>(rng.Below(100));
    std::vector<double> x = {rng.Normal() * 0.8, rng.Normal() * 0.8};
    const auto eps = g.OptimalEps(s, x, t);
    const double h = 1e-5;
    for (int k = 0; k < 2; ++k) {
      auto xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double grad =
          (g.LogDensity(s, xp, t) - g.LogDensity(s, xm, t)) / (2 * h);
      const double expected = -eps[k] / std::sqrt(1.0 - s.alpha_bar(t));
      EXPECT_NEAR(grad, expected, 1e-5 * (1.0 + std::abs(expected)))
          << "t=" << t << " k=" << k;
    }
  }
}

TEST(GmmTargetTest, MatchesMonteCarloPosterior) {
  const Schedule s = Schedule::Cosine(100);
  const GmmTarget g = GmmTarget::ThreeMode();
  KeyedRng rng(11);
  for (int t : {2, 20, 60, 95}) {
    const Matrix x0 = g.Sample(1, 100 + t);
    const double abar = s.alpha_bar(t);
    std::vector<double> x(2);
    for (int k = 0; k < 2; ++k) {
      x[k] = std::sqrt(abar) * x0(0, k) + std::sqrt(1 - abar) * rng.Normal();
    }
    const auto exact = g.OptimalEps(s, x, t);
    const auto mc = testing::MonteCarloPosteriorEps(g, s, x, t, 200000, t);
    const double err = std::hypot(exact[0] - mc[0], exact[1] - mc[1]);
    EXPECT_LT(err, 0.03 * std::max(0.1, std::hypot(exact[0], exact[1])))
        << "t=" << t;
  }
}

TEST(GmmTargetTest, SamplingMatchesWeights) {
  const GmmTarget g = GmmTarget::Diagonal({0.5, 0.5}, {{-0.5}, {0.5}},
                                          {{0.01}, {0.01}});
  const Matrix x = g.Sample(100000, 9);
  int left = 0;
  for (int i = 0; i < x.rows(); ++i) left += g.NearestMode(x.row(i)) == 0;
  EXPECT_NEAR(left / 1e5, 0.5, 0.01);
}

TEST(GmmTargetTest, SampleMomentsMatchMarginal) {
  const Schedule s = Schedule::Cosine(100);
  const GmmTarget g = GmmTarget::ThreeMode();
  const Matrix x = g.Sample(200000, 4);
  const Eigen::VectorXd mean = g.MarginalMean(s, 0);
  const Eigen::MatrixXd cov = g.MarginalCov(s, 0);
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  for (int i = 0; i < x.rows(); ++i) m += Eigen::Vector2d(x(i, 0), x(i, 1));
  m /= x.rows();
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (int i = 0; i < x.rows(); ++i) {
    const Eigen::Vector2d d = Eigen::Vector2d(x(i, 0), x(i, 1)) - m;
    c += d * d.transpose();
  }
  c /= x.rows() - 1;
  EXPECT_NEAR((m - mean).norm(), 0.0, 0.005);
  EXPECT_NEAR((c - cov).norm(), 0.0, 0.005);
}

TEST(GmmTargetTest, ValidatesParameters) {
  EXPECT_THROW(GmmTarget::Diagonal({0.5, 0.4}, {{0.0}, {1.0}}, {{1.0}, {1.0}}),
               std::invalid_argument);
  EXPECT_THROW(GmmTarget::Diagonal({1.0}, {{0.0}}, {{-1.0}}),
               std::invalid_argument);
  EXPECT_THROW(GmmTarget::Diagonal({1.0}, {{0.0, 1.0}}, {{1.0}}),
               std::invalid_argument);
  EXPECT_THROW(GmmTarget::Diagonal({1.0}, {{2.0}}, {{1.0}}),
               std::invalid_argument);
  EXPECT_THROW(GmmTarget::BoundaryCorners(0, 0.01), std::invalid_argument);
  EXPECT_THROW(GmmTarget::Subspace(3, 2, 1.0, 0), std::invalid_argument);
}

TEST(GmmTargetTest, FullAndDiagonalAgree) {
  const Schedule s = Schedule::Cosine(100);
  const GmmTarget d = GmmTarget::ThreeMode();
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (int k = 0; k < d.num_components(); ++k) {
    means.push_back(d.component(k).mean);
    covs.push_back(d.component(k).cov);
  }
  const GmmTarget f = GmmTarget::Full(d.weights(), means, covs);
  KeyedRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> x = {rng.Normal(), rng.Normal()};
    const int t = 1 + static_cast<int>(rng.Below(100));
    const auto a = d.OptimalEps(s, x, t);
    const auto b = f.OptimalEps(s, x, t);
    EXPECT_NEAR(a[0], b[0], 1e-10);
    EXPECT_NEAR(a[1], b[1], 1e-10);
  }
}

TEST(GmmTargetTest, BoundaryCornersSitNearTheCubeFaces) {
  const GmmTarget g = GmmTarget::BoundaryCorners(3, 0.01);
  EXPECT_EQ(g.num_components(), 8);
  EXPECT_TRUE(g.boundary());
  for (int k = 0; k < 8; ++k) {
    for (int i = 0; i < 3; ++i) {
      EXPECT_DOUBLE_EQ(std::abs(g.component(k).mean[i]), 0.95);
    }
  }
}

TEST(GmmTargetTest, SubspaceSamplesLieInASubspace) {
  const GmmTarget g = GmmTarget::Subspace(2, 6, 0.5, 3);
  const Matrix x = g.Sample(500, 1);
  Eigen::MatrixXd m(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) m(i, j) = x(i, j);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto sv = svd.singularValues();
  EXPECT_GT(sv[1], 1.0);
  EXPECT_LT(sv[2], 1e-8 * sv[0]);
}

TEST(NoiseModelTest, BatchedPredictEqualsPerRowPredict) {
  auto schedule = std::make_shared<const Schedule>(Schedule::Cosine(100));
  const OracleNoiseModel oracle(
      std::make_shared<const GmmTarget>(GmmTarget::ThreeMode()), schedule);
  const ZeroNoiseModel zero(2);
  KeyedRng rng(12);
  for (const NoiseModel* model :
       {static_cast<const NoiseModel*>(&oracle),
        static_cast<const NoiseModel*>(&zero)}) {
    const int n = 37;
    Matrix x(n, 2);
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rng.Normal();
      x(i, 1) = rng.Normal();
      t[i] = 1 + static_cast<int>(rng.Below(100));
    }
    Matrix batched;
    model->Predict(x, t, Matrix(n, 0), batched);
    for (int i = 0; i < n; ++i) {
      Matrix one;
      model->Predict(x.RowBlock(i, 1), std::span<const int>(&t[i], 1),
                     Matrix(1, 0), one);
      EXPECT_EQ(one(0, 0), batched(i, 0));
      EXPECT_EQ(one(0, 1), batched(i, 1));
    }
  }
}

TEST(NoiseModelTest, TimedModelCountsCalls) {
  const ZeroNoiseModel zero(3);
  const TimedNoiseModel timed(zero);
  Matrix eps;
  const std::vector<int> t = {1, 2};
  timed.Predict(Matrix(2, 3), t, Matrix(2, 0), eps);
  timed.Predict(Matrix(2, 3), t, Matrix(2, 0), eps);
  EXPECT_EQ(timed.calls(), 2);
  EXPECT_GE(timed.nanoseconds(), 0);
  EXPECT_EQ(eps.rows(), 2);
  EXPECT_EQ(eps.cols(), 3);
}

}  // namespace
}  // namespace gdp
