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
#include <string>

#include <gtest/gtest.h>

#include "gdp/rng.h"
#include "gdp/schedule.h"

namespace gdp {
namespace {

// Reference values evaluated in 40-digit arithmetic.
constexpr double kCosineAlphaBar50 = 0.49384359044063769;
constexpr double kCosineAlphaBar1 = 0.99936871840165853;
constexpr double kCosineAlphaBar100 = 2.4285722793500562e-07;
constexpr double kLinearAlphaBar100 = 0.36356324805549189;

TEST(ScheduleTest, CosineMatchesReferenceValues) {
  const Schedule s = Schedule::Cosine(100);
  EXPECT_NEAR(s.alpha_bar(50), kCosineAlphaBar50, 1e-14);
  EXPECT_NEAR(s.alpha_bar(1), kCosineAlphaBar1, 1e-14);
  EXPECT_NEAR(s.alpha_bar(100), kCosineAlphaBar100, 1e-18);
  EXPECT_LT(s.alpha_bar(100), 1e-3);
}

TEST(ScheduleTest, LinearMatchesReferenceValue) {
  const Schedule s = Schedule::Linear(100, 1e-4, 0.02);
  EXPECT_NEAR(s.alpha_bar(100), kLinearAlphaBar100, 1e-14);
}

TEST(ScheduleTest, AlphaBarIsRunningProduct) {
  for (const Schedule& s :
       {Schedule::Cosine(100), Schedule::Cosine(7), Schedule::Linear(50, 1e-4,
                                                                     0.05)}) {
    EXPECT_EQ(s.alpha_bar(0), 1.0);
    double prod = 1.0;
    for (int t = 1; t <= s.num_steps(); ++t) {
      prod *= s.alpha(t);
      EXPECT_EQ(s.alpha_bar(t), prod) << "t=" << t;
      EXPECT_GT(s.alpha(t), 0.0);
      EXPECT_LT(s.alpha(t), 1.0);
      EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
    }
  }
}

TEST(ScheduleTest, RejectsBadArguments) {
  EXPECT_THROW(Schedule::Cosine(0), std::invalid_argument);
  EXPECT_THROW(Schedule::Linear(10, 0.1, 0.01), std::invalid_argument);
  EXPECT_THROW(Schedule::Linear(10, 0.0, 0.01), std::invalid_argument);
  const Schedule s = Schedule::Cosine(10);
  EXPECT_THROW(s.alpha(0), std::out_of_range);
  EXPECT_THROW(s.alpha_bar(11), std::out_of_range);
}

TEST(ScheduleTest, RecordRoundTrip) {
  const Schedule a = Schedule::Cosine(100);
  const Schedule b = Schedule::FromRecord(a.ToRecord());
  ASSERT_EQ(b.num_steps(), 100);
  for (int t = 0; t <= 100; ++t) EXPECT_EQ(a.alpha_bar(t), b.alpha_bar(t));
  const Schedule c = Schedule::Linear(30, 1e-4, 0.02);
  const Schedule d = Schedule::FromRecord(c.ToRecord());
  EXPECT_EQ(d.kind(), ScheduleKind::kLinear);
  EXPECT_EQ(d.alpha_bar(30), c.alpha_bar(30));
  EXPECT_THROW(Schedule::FromRecord("nonsense"), std::invalid_argument);
}

TEST(GridTest, EvenTwoStepGrid) {
  const Schedule s = Schedule::Cosine(100);
  EXPECT_EQ(MakeGrid(s, 2, 20, 90).indices, (std::vector<int>{20, 55, 90}));
  EXPECT_EQ(MakeGrid(s, 5, 0, 100).indices,
            (std::vector<int>{0, 20, 40, 60, 80, 100}));
  EXPECT_EQ(FullGrid(s).delta(), 100);
}

TEST(GridTest, EvaluationGridStartsAtZero) {
  const Schedule s = Schedule::Cosine(100);
  EXPECT_EQ(MakeEvaluationGrid(s, 2, 20, 90).indices,
            (std::vector<int>{0, 20, 90}));
  EXPECT_EQ(MakeEvaluationGrid(s, 1, 20, 90).indices,
            (std::vector<int>{0, 90}));
  EXPECT_EQ(MakeEvaluationGrid(s, 3, 10, 100).indices,
            (std::vector<int>{0, 10, 55, 100}));
  EXPECT_THROW(MakeEvaluationGrid(s, 2, 0, 90), std::invalid_argument);
}

TEST(GridTest, RejectsInvalidGrids) {
  const Schedule s = Schedule::Cosine(100);
  EXPECT_THROW(MakeGrid(s, 0, 0, 100), std::invalid_argument);
  EXPECT_THROW(MakeGrid(s, 5, 50, 50), std::invalid_argument);
  EXPECT_THROW(MakeGrid(s, 5, 0, 101), std::invalid_argument);
  EXPECT_THROW(MakeGrid(s, 20, 0, 10), std::invalid_argument);
  EXPECT_THROW(GridFromIndices(s, {0, 5, 5}), std::invalid_argument);
  EXPECT_THROW(GridFromIndices(s, {0}), std::invalid_argument);
}

TEST(GridTest, RandomValidTriplesGiveStrictlyIncreasingGrids) {
  const Schedule s = Schedule::Cosine(100);
  KeyedRng rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    const int t_min = static_cast<int>(rng.Below(100));
    const int t_max = t_min + 1 + static_cast<int>(rng.Below(100 - t_min));
    const int delta = 1 + static_cast<int>(rng.Below(t_max - t_min));
    const TimeGrid g = MakeGrid(s, delta, t_min, t_max);
    ASSERT_EQ(static_cast<int>(g.indices.size()), delta + 1);
    EXPECT_EQ(g.t_min(), t_min);
    EXPECT_EQ(g.t_max(), t_max);
    for (int j = 1; j <= delta; ++j) {
      ASSERT_LT(g[j - 1], g[j]) << delta << " " << t_min << " " << t_max;
    }
  }
}

TEST(GridTest, FirstStepWithAlphaBarAtLeast) {
  const Schedule s = Schedule::Cosine(100);
  const int t = FirstStepWithAlphaBarAtLeast(s, 0.99);
  EXPECT_EQ(t, 1);
  EXPECT_GE(s.alpha_bar(t), 0.99);
  EXPECT_THROW(FirstStepWithAlphaBarAtLeast(s, 1.0), std::invalid_argument);
}

}  // namespace
}  // namespace gdp
