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

#ifndef GDP_BENCH_H_
#define GDP_BENCH_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "gdp/genetic.h"
#include "gdp/noise_model.h"
#include "gdp/sampler.h"

namespace gdp {

struct BenchConfig {
  std::vector<int> populations = {1, 2, 4, 8, 16, 32};
  int warmups = 10;
  int repetitions = 30;
  // Grid index whose step is timed.
  int step_index = 1;
  FitnessSpec fitness;
  SelectorKind selector = SelectorKind::kMultinomial;
  std::uint64_t seed = 0;
};

struct BenchRow {
  int population = 1;
  double nfe_us = 0.0;    // median batched model call
  double step_us = 0.0;   // median fitness, selection, duplication and step
  double total_us = 0.0;  // nfe_us + step_us
  double overhead_ratio = 1.0;  // total_us / total_us at P = 1
};

// Times one population step per P: the batched model call, and the rest of
// the step, each as a median over repetitions after warmups. The ratio is
// relative to the P = 1 row, which is always measured.
std::vector<BenchRow> BenchOverhead(const NoiseModel& model,
                                    const SamplerConfig& sampler,
                                    const BenchConfig& config,
                                    std::vector<double> obs = {});

void WriteBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace gdp

#endif  // GDP_BENCH_H_
