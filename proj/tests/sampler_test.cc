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
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gdp/errors.h"
#include "gdp/metrics.h"
#include "gdp/noise_model.h"
#include "gdp/rng.h"
#include "gdp/sampler.h"
#include "gdp/stats.h"
#include "gdp/target.h"

namespace gdp {
namespace {

// One reverse step re-derived in 40-digit arithmetic for x = (0.3, -1.7, 0.9),
// eps = (0.5, -0.2, 1.1), noise = (0.1, -0.4, 2.0), grid (0, 40, 50), j = 2,
// eta = 1, gamma = 0.7, clip to [-1, 1].
constexpr double kConventionalStep[] = {0.18102073279987327,
                                        -1.0050338196635544,
                                        1.1795781395025529};
constexpr double kLiteralStep[] = {0.23306267094501562, -0.92340739864149057,
                                   0.78754571070349033};

std::shared_ptr<const Schedule> Cosine100() {
  static const auto schedule =
      std::make_shared<const Schedule>(Schedule::Cosine(100));
  return schedule;
}

SamplerConfig MakeConfig(std::vector<int> grid, double eta, double gamma) {
  SamplerConfig c;
  c.schedule = Cosine100();
  c.grid = GridFromIndices(*c.schedule, std::move(grid));
  c.eta = eta;
  c.gamma = gamma;
  return c;
}

std::shared_ptr<const OracleNoiseModel> Oracle(GmmTarget target) {
  return std::make_shared<const OracleNoiseModel>(
      std::make_shared<const GmmTarget>(std::move(target)), Cosine100());
}

// A model whose output is a fixed smooth function of x and t.
class WobbleModel final : public NoiseModel {
 public:
  int action_dim() const override { return 3; }
  int obs_dim() const override { return 0; }
  void Predict(const Matrix& x, std::span<const int> t, const Matrix&,
               Matrix& eps) const override {
    eps.Reset(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) {
      for (int k = 0; k < x.cols(); ++k) {
        eps(i, k) = std::sin(1.3 * x(i, k) + 0.01 * t[i] + k);
      }
    }
  }
};

class NanModel final : public NoiseModel {
 public:
  int action_dim() const override { return 2; }
  int obs_dim() const override { return 0; }
  void Predict(const Matrix& x, std::span<const int>, const Matrix&,
               Matrix& eps) const override {
    eps = Matrix(x.rows(), x.cols(), std::numeric_limits<double>::quiet_NaN());
  }
};

const std::vector<double> kX = {0.3, -1.7, 0.9};
const std::vector<double> kEps = {0.5, -0.2, 1.1};
const std::vector<double> kNoise = {0.1, -0.4, 2.0};

TEST(DdpmStepTest, ConventionalRuleMatchesReference) {
  const SamplerConfig c = MakeConfig({0, 40, 50}, 1.0, 0.7);
  StepRecord record;
  const auto out = DdpmStep(kX, 2, kEps, c, kNoise, &record);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(out[k], kConventionalStep[k], 1e-12);
  EXPECT_EQ(record.clip_count, 1);
  EXPECT_EQ(record.warn_flags, 0u);
}

TEST(DdpmStepTest, LiteralRuleMatchesReferenceAndWarns) {
  SamplerConfig c = MakeConfig({0, 40, 50}, 1.0, 0.7);
  c.sigma_rule = SigmaRule::kLiteral;
  StepRecord record;
  const auto out = DdpmStep(kX, 2, kEps, c, kNoise, &record);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(out[k], kLiteralStep[k], 1e-12);
  EXPECT_TRUE(record.warn_flags & kWarnSigmaNegative);
}

TEST(DdpmStepTest, LastStepReturnsClippedEstimate) {
  const SamplerConfig c = MakeConfig({0, 40, 50}, 1.0, 1.0);
  const auto out = DdpmStep(kX, 1, kEps, c, kNoise);
  const auto x0 = X0Hat(kX, 40, kEps, *c.schedule);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(out[k], std::clamp(x0[k], -1.0, 1.0));
  }
}

TEST(DdpmStepTest, X0HatInvertsForwardProcess) {
  const Schedule& s = *Cosine100();
  const std::vector<double> x0 = {0.2, -0.4};
  const std::vector<double> e = {1.5, 0.3};
  for (int t : {1, 30, 99}) {
    const double a = std::sqrt(s.alpha_bar(t));
    const double b = std::sqrt(1 - s.alpha_bar(t));
    const std::vector<double> xt = {a * x0[0] + b * e[0], a * x0[1] + b * e[1]};
    const auto back = X0Hat(xt, t, e, s);
    EXPECT_NEAR(back[0], x0[0], 1e-9);
    EXPECT_NEAR(back[1], x0[1], 1e-9);
  }
}

TEST(DdpmStepTest, SigmaVanishesForDdimAndClampsWhenLarge) {
  SamplerConfig c = MakeConfig({0, 40, 50}, 0.0, 1.0);
  EXPECT_EQ(ComputeStepCoefficients(c, 2).sigma, 0.0);
  EXPECT_EQ(ComputeStepCoefficients(c, 2).combine.noise_prev, 0.0);
  c = MakeConfig({0, 1, 100}, 1.0, 1.0);
  const auto coeffs = ComputeStepCoefficients(c, 2);
  EXPECT_LE(coeffs.sigma * coeffs.sigma, 1 - c.schedule->alpha_bar(1) + 1e-15);
  EXPECT_THROW(ComputeStepCoefficients(c, 0), std::out_of_range);
  EXPECT_THROW(ComputeStepCoefficients(c, 3), std::out_of_range);
}

TEST(DdpmStepTest, ValidateRejectsBadConfigs) {
  SamplerConfig c = MakeConfig({0, 50, 100}, 1.0, 1.0);
  c.eta = 1.5;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.eta = 1.0;
  c.gamma = -0.1;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.gamma = 1.0;
  c.clip_lo = 1.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.clip_lo = -1.0;
  c.schedule = nullptr;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(SampleTest, DdimIsBitIdenticalAcrossGamma) {
  const WobbleModel model;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Matrix reference;
    for (double gamma : {0.0, 0.5, 1.0}) {
      const SamplerConfig c = MakeConfig({0, 10, 30, 60, 100}, 0.0, gamma);
      const Matrix out = Sample(model, c, 20, {}, seed).samples;
      if (reference.empty()) {
        reference = out;
      } else {
        EXPECT_EQ(out, reference) << "gamma " << gamma;
      }
    }
  }
}

TEST(SampleTest, DeterministicGivenSeed) {
  const WobbleModel model;
  const SamplerConfig c = MakeConfig({0, 25, 50, 75, 100}, 1.0, 1.0);
  EXPECT_EQ(Sample(model, c, 10, {}, 4).samples,
            Sample(model, c, 10, {}, 4).samples);
  EXPECT_NE(Sample(model, c, 10, {}, 4).samples,
            Sample(model, c, 10, {}, 5).samples);
}

TEST(SampleTest, ChunkedModelCallsGiveTheSameSamples) {
  const WobbleModel model;
  SamplerConfig c = MakeConfig({0, 25, 50, 75, 100}, 1.0, 1.0);
  const SampleResult whole = Sample(model, c, 10, {}, 4);
  c.max_batch = 3;
  const SampleResult chunked = Sample(model, c, 10, {}, 4);
  EXPECT_EQ(whole.samples, chunked.samples);
  EXPECT_EQ(whole.trace.nfe, 4);
  EXPECT_EQ(chunked.trace.nfe, 16);
  EXPECT_EQ(whole.trace.model_rows, 40);
}

TEST(SampleTest, TraceCountsEveryStep) {
  const WobbleModel model;
  const SamplerConfig c = MakeConfig({0, 20, 40}, 1.0, 1.0);
  const SampleResult r = Sample(model, c, 7, {}, 1);
  ASSERT_EQ(r.trace.steps.size(), 2u);
  EXPECT_EQ(r.trace.steps[0].t, 40);
  EXPECT_EQ(r.trace.steps[0].t_prev, 20);
  EXPECT_EQ(r.trace.steps[1].t_prev, 0);
  EXPECT_EQ(r.trace.total_entries(), 2 * 7 * 3);
  for (double v : r.samples.flat()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  std::ostringstream csv;
  WriteTraceCsvHeader(csv);
  WriteTraceCsv(csv, "r", r.trace);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(SampleTest, NonFiniteModelOutputThrows) {
  const NanModel model;
  SamplerConfig c = MakeConfig({0, 50, 100}, 1.0, 1.0);
  c.clip_enabled = false;
  EXPECT_THROW(Sample(model, c, 3, {}, 1), NonFiniteError);
}

TEST(SampleTest, RejectsObservationMismatch) {
  const WobbleModel model;
  const SamplerConfig c = MakeConfig({0, 50, 100}, 1.0, 1.0);
  const std::vector<double> obs = {1.0};
  EXPECT_THROW(Sample(model, c, 3, obs, 1), std::invalid_argument);
  EXPECT_THROW(Sample(model, c, 0, {}, 1), std::invalid_argument);
}

// Exact output law of the 100-step eta = 1 chain with the true predictor for
// N(0.1, 0.3^2), from the linear recursion evaluated in closed form. The
// chain loses about 5% of the target spread to discretization.
constexpr double kChainMean = 0.09999999781428441;
constexpr double kChainStddev = 0.2842515753255399;

// Chi-square p-value of the probability integral transform of v under
// N(mean, sd^2), in 20 equiprobable bins.
double NormalFitPValue(std::span<const double> v, double mean, double sd) {
  std::vector<std::int64_t> counts(20, 0);
  for (double x : v) {
    const double u = 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
    ++counts[std::min(19, static_cast<int>(u * 20))];
  }
  return ChiSquareUniformity(counts).p_value;
}

TEST(SampleTest, OracleSamplesOfSingleGaussianFollowTheChainLaw) {
  const auto oracle =
      Oracle(GmmTarget::Diagonal({1.0}, {{0.1}}, {{0.3 * 0.3}}));
  SamplerConfig c;
  c.schedule = Cosine100();
  c.grid = FullGrid(*c.schedule);
  const Matrix x = Sample(*oracle, c, 10000, {}, 21).samples;
  EXPECT_GT(NormalFitPValue(x.flat(), kChainMean, kChainStddev), 1e-3);
  EXPECT_NEAR(Mean(x.flat()), kChainMean, 0.01);
  EXPECT_NEAR(std::sqrt(Variance(x.flat())), kChainStddev, 0.005);
  // The analytic target itself is rejected at this sample size.
  EXPECT_LT(NormalFitPValue(x.flat(), 0.1, 0.3), 1e-3);
}

TEST(SampleTest, ZeroGammaShrinksModeSpread) {
  const auto oracle = Oracle(GmmTarget::ThreeMode());
  auto spread = [&](double gamma) {
    SamplerConfig c = MakeConfig({0, 20, 40, 60, 80, 100}, 1.0, gamma);
    const Matrix x = Sample(*oracle, c, 3000, {}, 8).samples;
    const GmmTarget& g = oracle->target();
    double total = 0.0;
    double worst = 0.0;
    for (int i = 0; i < x.rows(); ++i) {
      const int k = g.NearestMode(x.row(i));
      const auto& comp = g.component(k);
      double z2 = 0.0;
      for (int d = 0; d < 2; ++d) {
        const double r = x(i, d) - comp.mean[d];
        total += r * r;
        z2 = std::max(z2, r * r / comp.variances[d]);
      }
      worst = std::max(worst, z2);
    }
    return std::pair(total / x.rows(), worst);
  };
  const auto [spread0, worst0] = spread(0.0);
  const auto [spread1, worst1] = spread(1.0);
  EXPECT_LT(spread0, spread1);
  EXPECT_LT(worst0, 9.0);  // within three standard deviations
}

TEST(SampleTest, InitialNoiseIsKeyedPerRow) {
  const Matrix a = InitialNoise(5, 2, 3);
  const Matrix b = InitialNoise(8, 2, 3);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(a(i, 0), b(i, 0));
    EXPECT_EQ(a(i, 1), b(i, 1));
  }
}

}  // namespace
}  // namespace gdp
