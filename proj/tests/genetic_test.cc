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

#include "gdp/genetic.h"
#include "gdp/noise_model.h"
#include "gdp/rng.h"
#include "gdp/sampler.h"
#include "gdp/stats.h"
#include "gdp/target.h"

namespace gdp {
namespace {

// softmax(-(0, 10)) evaluated by hand.
constexpr double kSoftmaxHigh = 0.9999546021312976;
constexpr double kSoftmaxLow = 4.5397868702434395e-05;

std::shared_ptr<const Schedule> Cosine100() {
  static const auto schedule =
      std::make_shared<const Schedule>(Schedule::Cosine(100));
  return schedule;
}

SamplerConfig MakeSampler(std::vector<int> grid, double eta, double gamma) {
  SamplerConfig c;
  c.schedule = Cosine100();
  c.grid = GridFromIndices(*c.schedule, std::move(grid));
  c.eta = eta;
  c.gamma = gamma;
  return c;
}

TEST(FitnessTest, SteinIsEpsNorm) {
  const Schedule& s = *Cosine100();
  const std::vector<double> x = {0.0, 0.0};
  const std::vector<double> eps = {3.0, 4.0};
  FitnessSpec spec;
  EXPECT_DOUBLE_EQ(Fitness(x, 10, eps, spec, s), 5.0);
  spec.scaling = FitnessScaling::kSquare;
  EXPECT_DOUBLE_EQ(Fitness(x, 10, eps, spec, s), 25.0);
}

TEST(FitnessTest, ClipIsMeanViolationOfEstimate) {
  const Schedule& s = *Cosine100();
  const std::vector<double> eps = {0.0, 0.0};
  const double a = std::sqrt(s.alpha_bar(10));
  // x0_hat = (1.5, -0.5): violation 0.5 over 2 entries.
  const std::vector<double> x = {1.5 * a, -0.5 * a};
  FitnessSpec spec;
  spec.family = FitnessFamily::kClip;
  EXPECT_NEAR(Fitness(x, 10, eps, spec, s), 0.25, 1e-12);
  const std::vector<double> inside = {0.1, 0.2};
  EXPECT_EQ(Fitness(inside, 10, eps, spec, s), 0.0);
  EXPECT_THROW(Fitness(inside, 10, std::vector<double>{1.0}, spec, s),
               std::invalid_argument);
}

TEST(SelectionWeightsTest, SoftmaxReferenceValues) {
  const std::vector<double> raw = {0.0, 10.0};
  const auto w = SelectionWeights(raw, 1.0);
  EXPECT_NEAR(w[0], kSoftmaxHigh, 1e-15);
  EXPECT_NEAR(w[1], kSoftmaxLow, 1e-18);
}

TEST(SelectionWeightsTest, TemperatureLimits) {
  const std::vector<double> raw = {0.7, 0.2, 1.5, 0.9};
  const auto hot = SelectionWeights(raw, 1e9);
  for (double v : hot) EXPECT_NEAR(v, 0.25, 1e-9);
  const auto cold = SelectionWeights(raw, 1e-6);
  EXPECT_NEAR(cold[1], 1.0, 1e-15);
  EXPECT_NEAR(cold[0] + cold[2] + cold[3], 0.0, 1e-15);
  // The scaled rule reverses the roles of the limits.
  const auto scaled = SelectionWeights(raw, 1e-9, WeightRule::kScaledSoftmax);
  for (double v : scaled) EXPECT_NEAR(v, 0.25, 1e-9);
}

TEST(SelectionWeightsTest, WeightsSumToOneAndFavorLowScores) {
  KeyedRng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> raw(1 + rng.Below(20));
    for (double& r : raw) r = 5 * rng.Uniform();
    const double temp = 0.01 + 5 * rng.Uniform();
    const auto w = SelectionWeights(raw, temp);
    double total = 0.0;
    for (double v : w) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t a = 0; a < raw.size(); ++a) {
      for (std::size_t b = 0; b < raw.size(); ++b) {
        if (raw[a] < raw[b]) {
          EXPECT_GE(w[a], w[b]);
        }
      }
    }
  }
}

TEST(SelectionWeightsTest, NormalizedRuleFavorsHighScores) {
  const std::vector<double> raw = {1.0, 3.0};
  const auto w = SelectionWeights(raw, 2.0, WeightRule::kNormalized);
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[1], 0.75);
}

TEST(SelectionWeightsTest, DegenerateInputsFallBackToUniform) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  const auto w = SelectionWeights(std::vector<double>{nan, nan}, 1.0,
                                  WeightRule::kSoftmax, &degenerate);
  EXPECT_TRUE(degenerate);
  EXPECT_EQ(w, (std::vector<double>{0.5, 0.5}));
  SelectionWeights(std::vector<double>{1.0, nan}, 1.0, WeightRule::kSoftmax,
                   &degenerate);
  EXPECT_FALSE(degenerate);
  EXPECT_THROW(SelectionWeights(std::vector<double>{}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(SelectionWeights(std::vector<double>{1.0}, 0.0),
               std::invalid_argument);
}

TEST(SelectSurvivorsTest, MultinomialIsUniformUnderEqualWeights) {
  const int pop = 16;
  const std::vector<double> raw(pop, 1.0);
  const auto w = SelectionWeights(raw, 1.0);
  std::vector<std::int64_t> counts(pop, 0);
  for (int rep = 0; rep < 12500; ++rep) {
    for (int i : SelectSurvivors(raw, w, 8, SelectorKind::kMultinomial, rep)) {
      ++counts[i];
    }
  }
  EXPECT_GT(ChiSquareUniformity(counts).p_value, 1e-3);
}

TEST(SelectSurvivorsTest, HugeTemperatureIsUniform) {
  const std::vector<double> raw = {0.1, 2.0, 0.5, 3.0, 1.0, 0.0, 0.7, 1.2};
  const auto w = SelectionWeights(raw, 1e6);
  std::vector<std::int64_t> counts(raw.size(), 0);
  for (int rep = 0; rep < 20000; ++rep) {
    for (int i : SelectSurvivors(raw, w, 4, SelectorKind::kMultinomial,
                                 StreamKey(3, rep, 0))) {
      ++counts[i];
    }
  }
  EXPECT_GT(ChiSquareUniformity(counts).p_value, 1e-3);
}

TEST(SelectSurvivorsTest, MultinomialFrequenciesFollowWeights) {
  const std::vector<double> raw = {0.0, 1.0, 2.0};
  const auto w = SelectionWeights(raw, 1.0);
  std::vector<double> freq(3, 0.0);
  const int draws = 100000;
  for (int rep = 0; rep < draws; ++rep) {
    ++freq[SelectSurvivors(raw, w, 1, SelectorKind::kMultinomial, rep)[0]];
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(freq[i] / draws, w[i], 0.005);
}

TEST(SelectSurvivorsTest, TopKKeepsLowestScoresStably) {
  const std::vector<double> raw = {0.5, 0.1, 0.5, 0.0, 0.9};
  const auto got = SelectSurvivors(raw, {}, 3, SelectorKind::kTopK, 0);
  EXPECT_EQ(got, (std::vector<int>{3, 1, 0}));
  EXPECT_THROW(SelectSurvivors(raw, {}, 6, SelectorKind::kTopK, 0),
               std::invalid_argument);
  EXPECT_THROW(SelectSurvivors(raw, {}, 0, SelectorKind::kTopK, 0),
               std::invalid_argument);
}

TEST(SelectSurvivorsTest, ZeroWeightsAreNeverSelected) {
  const std::vector<double> raw = {0.0, 0.0, 0.0};
  const std::vector<double> w = {0.0, 1.0, 0.0};
  for (int rep = 0; rep < 1000; ++rep) {
    for (int i : SelectSurvivors(raw, w, 3, SelectorKind::kMultinomial, rep)) {
      EXPECT_EQ(i, 1);
    }
  }
}

TEST(SelectionEntropyTest, Values) {
  EXPECT_DOUBLE_EQ(SelectionEntropy(std::vector<int>{2, 2, 2}), 0.0);
  EXPECT_NEAR(SelectionEntropy(std::vector<int>{0, 1, 2, 3}), std::log(4.0),
              1e-15);
  EXPECT_EQ(SelectionEntropy(std::vector<int>{}), 0.0);
}

class GdpSampleTest : public ::testing::Test {
 protected:
  std::shared_ptr<const OracleNoiseModel> oracle_ =
      std::make_shared<const OracleNoiseModel>(
          std::make_shared<const GmmTarget>(
              GmmTarget::BoundaryCorners(2, 0.01)),
          Cosine100());
};

TEST_F(GdpSampleTest, SingleMemberReproducesPlainSampling) {
  for (std::uint64_t seed : {1u, 9u, 77u}) {
    for (double gamma : {0.0, 0.2, 1.0}) {
      const SamplerConfig s = MakeSampler({0, 20, 55, 90}, 1.0, gamma);
      GdpConfig g;
      g.population = 1;
      g.survivors = 1;
      const GdpResult gdp = GdpSample(*oracle_, s, g, {}, seed);
      const SampleResult plain = Sample(*oracle_, s, 1, {}, seed);
      EXPECT_EQ(gdp.population, plain.samples);
      EXPECT_EQ(gdp.trace.nfe, plain.trace.nfe);
    }
  }
}

TEST_F(GdpSampleTest, OneModelCallPerStep) {
  const SamplerConfig s = MakeSampler({0, 20, 55, 90}, 1.0, 0.2);
  const GdpResult r = GdpSample(*oracle_, s, GdpConfig{}, {}, 3);
  EXPECT_EQ(r.trace.nfe, 3);
  EXPECT_EQ(r.trace.model_rows, 3 * 16);
  EXPECT_EQ(r.population.rows(), 16);
  ASSERT_EQ(r.history.size(), 3u);
  EXPECT_EQ(r.history[0].t, 90);
  for (const auto& h : r.history) {
    EXPECT_LE(h.min_fitness, h.mean_fitness);
    EXPECT_LE(h.mean_fitness, h.max_fitness);
  }
  std::ostringstream csv;
  WriteFitnessHistoryCsvHeader(csv);
  WriteFitnessHistoryCsv(csv, "x", r.history);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST_F(GdpSampleTest, DeterministicGivenSeed) {
  const SamplerConfig s = MakeSampler({0, 20, 55, 90}, 1.0, 0.2);
  const GdpResult a = GdpSample(*oracle_, s, GdpConfig{}, {}, 3);
  const GdpResult b = GdpSample(*oracle_, s, GdpConfig{}, {}, 3);
  EXPECT_EQ(a.population, b.population);
  EXPECT_EQ(a.action, b.action);
}

TEST_F(GdpSampleTest, BestPickUsesLastStepScores) {
  const SamplerConfig s = MakeSampler({0, 20, 55, 90}, 1.0, 0.2);
  GdpConfig g;
  g.selector.final_pick = FinalPick::kBest;
  const GdpResult r = GdpSample(*oracle_, s, g, {}, 5);
  EXPECT_GE(r.picked, 0);
  EXPECT_LT(r.picked, 16);
  const auto row = r.population.row(r.picked);
  EXPECT_TRUE(std::equal(row.begin(), row.end(), r.action.begin()));
}

TEST_F(GdpSampleTest, SelectionLowersTerminalSteinScore) {
  // Paired against plain sampling of the same P members with the same keys.
  const SamplerConfig s = MakeSampler({20, 55, 90}, 1.0, 0.2);
  const Schedule& schedule = *s.schedule;
  const GdpConfig g;
  double gdp_total = 0.0;
  double plain_total = 0.0;
  FitnessSpec stein;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GdpResult r = GdpSample(*oracle_, s, g, {}, seed);
    const SampleResult p = Sample(*oracle_, s, g.population, {}, seed);
    for (const Matrix* x : {&r.population, &p.samples}) {
      Matrix eps;
      PredictShared(*oracle_, *x, 20, {}, eps);
      std::vector<double> scores;
      PopulationFitness(*x, 20, eps, stein, schedule, -1, 1, scores);
      double mean = 0.0;
      for (double v : scores) mean += v / scores.size();
      (x == &r.population ? gdp_total : plain_total) += mean;
    }
  }
  EXPECT_LT(gdp_total, plain_total);
}

TEST_F(GdpSampleTest, PostSelectionEpsNormNeverExceedsPreOnAverage) {
  const SamplerConfig s = MakeSampler({0, 20, 90}, 1.0, 0.2);
  std::vector<double> pre(2, 0.0), post(2, 0.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GdpResult r = GdpSample(*oracle_, s, GdpConfig{}, {}, seed);
    for (int k = 0; k < 2; ++k) {
      pre[k] += r.history[k].pre_mean_eps_norm;
      post[k] += r.history[k].post_mean_eps_norm;
    }
  }
  for (int k = 0; k < 2; ++k) EXPECT_LE(post[k], pre[k]);
}

TEST_F(GdpSampleTest, RejectsInvalidConfigs) {
  const SamplerConfig s = MakeSampler({0, 50, 100}, 1.0, 1.0);
  GdpConfig g;
  g.survivors = 17;
  EXPECT_THROW(GdpSample(*oracle_, s, g, {}, 0), std::invalid_argument);
  g = GdpConfig{};
  g.fitness.temperature = 0.0;
  EXPECT_THROW(GdpSample(*oracle_, s, g, {}, 0), std::invalid_argument);
  g = GdpConfig{};
  g.population = 1 << 27;
  g.survivors = 1;
  EXPECT_THROW(GdpSample(*oracle_, s, g, {}, 0), std::length_error);
  EXPECT_THROW(GdpSample(*oracle_, s, GdpConfig{}, std::vector<double>{1.0}, 0),
               std::invalid_argument);
}

}  // namespace
}  // namespace gdp
