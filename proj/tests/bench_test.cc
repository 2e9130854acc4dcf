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


#include <memory>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gdp/bench.h"
#include "gdp/mlp.h"
#include "gdp/schedule.h"

namespace gdp {
namespace {

SamplerConfig BenchSampler() {
  SamplerConfig c;
  c.schedule = std::make_shared<Schedule>(Schedule::Cosine(100));
  c.grid = MakeGrid(*c.schedule, 5, 0, 100);
  return c;
}

BenchConfig SmallBench() {
  BenchConfig b;
  b.populations = {4, 1, 2, 4};
  b.repetitions = 5;
  return b;
}

TEST(BenchTest, RowPerPopulationWithUnitBaseline) {
  MlpConfig mc;
  mc.action_dim = 4;
  mc.obs_dim = 2;
  mc.hidden = {16};
  const MlpDenoiser model(mc, 1);
  const auto rows = BenchOverhead(model, BenchSampler(), SmallBench());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].population, 1);
  EXPECT_EQ(rows[1].population, 2);
  EXPECT_EQ(rows[2].population, 4);
  EXPECT_EQ(rows[0].overhead_ratio, 1.0);
  for (const auto& r : rows) {
    EXPECT_GT(r.nfe_us, 0.0);
    EXPECT_GE(r.step_us, 0.0);
    EXPECT_DOUBLE_EQ(r.total_us, r.nfe_us + r.step_us);
    EXPECT_DOUBLE_EQ(r.overhead_ratio, r.total_us / rows[0].total_us);
  }
}

TEST(BenchTest, BaselineMeasuredEvenWhenNotRequested) {
  BenchConfig b = SmallBench();
  b.populations = {3};
  const auto rows = BenchOverhead(ZeroNoiseModel(2), BenchSampler(), b);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].population, 3);
  EXPECT_GT(rows[0].overhead_ratio, 0.0);
}

TEST(BenchTest, RejectsBadConfigs) {
  const ZeroNoiseModel model(2);
  BenchConfig b = SmallBench();
  b.warmups = 9;
  EXPECT_THROW(BenchOverhead(model, BenchSampler(), b), std::invalid_argument);
  b = SmallBench();
  b.repetitions = 0;
  EXPECT_THROW(BenchOverhead(model, BenchSampler(), b), std::invalid_argument);
  b = SmallBench();
  b.step_index = 6;
  EXPECT_THROW(BenchOverhead(model, BenchSampler(), b), std::invalid_argument);
  b = SmallBench();
  b.populations = {0, 2};
  EXPECT_THROW(BenchOverhead(model, BenchSampler(), b), std::invalid_argument);
}

TEST(BenchTest, CsvLayout) {
  std::ostringstream out;
  WriteBenchCsv(out, {BenchRow{1, 2.0, 1.0, 3.0, 1.0},
                      BenchRow{2, 3.0, 1.5, 4.5, 1.5}});
  EXPECT_EQ(out.str(),
            "population,nfe_us,step_us,total_us,overhead_ratio\n"
            "1,2.0000,1.0000,3.0000,1.0000\n"
            "2,3.0000,1.5000,4.5000,1.5000\n");
}

}  // namespace
}  // namespace gdp
