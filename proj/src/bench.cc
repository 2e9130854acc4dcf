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

#include "gdp/bench.h"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gdp/rng.h"

namespace gdp {
namespace {

using Clock = std::chrono::steady_clock;

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Microseconds(Clock::duration d) {
  return std::chrono::duration<double, std::micro>(d).count();
}

BenchRow TimePopulation(const NoiseModel& model, const SamplerConfig& sampler,
                        const BenchConfig& config,
                        const std::vector<double>& obs, int population) {
  const int j = config.step_index;
  const int t = sampler.grid[j];
  const int keep = std::max(1, population / 2);
  const Matrix x = InitialNoise(population, model.action_dim(), config.seed);
  Matrix eps;
  Matrix dup_x(population, model.action_dim());
  Matrix dup_eps(population, model.action_dim());
  Matrix next;
  std::vector<double> raw;
  std::vector<double> nfe;
  std::vector<double> step;

  for (int rep = 0; rep < config.warmups + config.repetitions; ++rep) {
    const auto t0 = Clock::now();
    PredictShared(model, x, t, obs, eps);
    const auto t1 = Clock::now();
    PopulationFitness(x, t, eps, config.fitness, *sampler.schedule,
                      sampler.clip_lo, sampler.clip_hi, raw);
    const auto weights = SelectionWeights(raw, config.fitness.temperature,
                                          config.fitness.weight_rule);
    const auto survivors = SelectSurvivors(
        raw, weights, keep, config.selector,
        CombineKeys(config.seed, static_cast<std::uint64_t>(rep)));
    for (int i = 0; i < population; ++i) {
      dup_x.SetRow(i, x.row(survivors[i % keep]));
      dup_eps.SetRow(i, eps.row(survivors[i % keep]));
    }
    DenoiseStep(dup_x, j, dup_eps, sampler, config.seed, next);
    const auto t2 = Clock::now();
    if (rep >= config.warmups) {
      nfe.push_back(Microseconds(t1 - t0));
      step.push_back(Microseconds(t2 - t1));
    }
  }
  BenchRow row;
  row.population = population;
  row.nfe_us = Median(nfe);
  row.step_us = Median(step);
  row.total_us = row.nfe_us + row.step_us;
  return row;
}

}  // namespace

std::vector<BenchRow> BenchOverhead(const NoiseModel& model,
                                    const SamplerConfig& sampler,
                                    const BenchConfig& config,
                                    std::vector<double> obs) {
  sampler.Validate();
  if (config.warmups < 10) {
    throw std::invalid_argument("BenchOverhead: need at least 10 warmups");
  }
  if (config.repetitions < 1) {
    throw std::invalid_argument("BenchOverhead: need repetitions >= 1");
  }
  if (config.step_index < 1 || config.step_index > sampler.grid.delta()) {
    throw std::invalid_argument("BenchOverhead: step index out of range");
  }
  if (obs.empty()) obs.assign(model.obs_dim(), 0.0);
  std::vector<int> populations = config.populations;
  std::sort(populations.begin(), populations.end());
  populations.erase(std::unique(populations.begin(), populations.end()),
                    populations.end());
  if (populations.empty() || populations.front() < 1) {
    throw std::invalid_argument("BenchOverhead: populations must be >= 1");
  }
  const BenchRow base = TimePopulation(model, sampler, config, obs, 1);
  std::vector<BenchRow> rows;
  for (int p : populations) {
    BenchRow row =
        p == 1 ? base : TimePopulation(model, sampler, config, obs, p);
    row.overhead_ratio = row.total_us / base.total_us;
    rows.push_back(row);
  }
  return rows;
}

void WriteBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "population,nfe_us,step_us,total_us,overhead_ratio\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{:.4f},{:.4f},{:.4f},{:.4f}\n", r.population,
               r.nfe_us, r.step_us, r.total_us, r.overhead_ratio);
  }
}

}  // namespace gdp
