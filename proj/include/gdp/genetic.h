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

#ifndef GDP_GENETIC_H_
#define GDP_GENETIC_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "gdp/matrix.h"
#include "gdp/noise_model.h"
#include "gdp/sampler.h"
#include "gdp/schedule.h"

namespace gdp {

enum class FitnessFamily { kStein, kClip };
enum class FitnessScaling { kIdentity, kSquare };

// Maps raw scores r (lower is better) to selection probabilities.
enum class WeightRule {
  // exp(-r / T), normalized. Default.
  kSoftmax,
  // exp(-T r), normalized: the temperature as a multiplier on the score.
  kScaledSoftmax,
  // T r / sum(T r): scores used directly as probabilities. Note this favors
  // high scores; kept for auditing only.
  kNormalized,
};

struct FitnessSpec {
  FitnessFamily family = FitnessFamily::kStein;
  FitnessScaling scaling = FitnessScaling::kIdentity;
  double temperature = 1.0;
  WeightRule weight_rule = WeightRule::kSoftmax;
};

enum class SelectorKind { kMultinomial, kTopK };
enum class FinalPick { kFirst, kBest };

struct SelectorSpec {
  SelectorKind kind = SelectorKind::kMultinomial;
  FinalPick final_pick = FinalPick::kFirst;
};

struct GdpConfig {
  int population = 16;
  int survivors = 8;
  FitnessSpec fitness;
  SelectorSpec selector;
};

// Raw out-of-distribution score, lower is better. Stein: f(||eps||_2).
// Clip: f(||x0 - clip(x0)||_1 / d) with x0 the pre-clip estimate.
double Fitness(std::span<const double> x, int t, std::span<const double> eps,
               const FitnessSpec& spec, const Schedule& schedule,
               double clip_lo = -1.0, double clip_hi = 1.0);
// Row-wise Fitness into `out`.
void PopulationFitness(const Matrix& x, int t, const Matrix& eps,
                       const FitnessSpec& spec, const Schedule& schedule,
                       double clip_lo, double clip_hi,
                       std::vector<double>& out);

// Probability vector from raw scores. When no weight can be formed (all
// scores infinite, or a zero total under kNormalized) returns uniform
// weights and sets *degenerate.
std::vector<double> SelectionWeights(std::span<const double> raw,
                                     double temperature,
                                     WeightRule rule = WeightRule::kSoftmax,
                                     bool* degenerate = nullptr);

// Multinomial: `count` i.i.d. draws from `weights` using the stream `key`.
// Top-k: the `count` lowest raw scores, ties to the lower index.
std::vector<int> SelectSurvivors(std::span<const double> raw,
                                 std::span<const double> weights, int count,
                                 SelectorKind kind, std::uint64_t key);

// Entropy (nats) of the empirical distribution of selected indices.
double SelectionEntropy(std::span<const int> selected);

struct FitnessHistoryRow {
  int step = 0;  // grid index j
  int t = 0;
  double min_fitness = 0.0;
  double mean_fitness = 0.0;
  double max_fitness = 0.0;
  double selection_entropy = 0.0;
  // Population means before and after duplication.
  double pre_mean_eps_norm = 0.0;
  double post_mean_eps_norm = 0.0;
  double pre_mean_clip_violation = 0.0;
  double post_mean_clip_violation = 0.0;
  bool degenerate_weights = false;
};

void WriteFitnessHistoryCsvHeader(std::ostream& out);
void WriteFitnessHistoryCsv(std::ostream& out, std::string_view run_id,
                            std::span<const FitnessHistoryRow> history);

struct GdpResult {
  std::vector<double> action;  // the picked member
  int picked = 0;
  Matrix population;           // all members at t_0
  StepTrace trace;
  std::vector<FitnessHistoryRow> history;
};

// Upper bound on population state, in bytes.
inline constexpr std::size_t kMaxPopulationBytes = std::size_t{1} << 30;

// Population denoising with fitness-weighted survivor selection. At each
// grid step the whole population goes through one batched model call; the
// same eps feeds the fitness and the reverse step. Member i continues from
// survivor i mod S with fresh noise keyed by (seed, j, i), so a population of
// one reproduces Sample exactly.
GdpResult GdpSample(const NoiseModel& model, const SamplerConfig& sampler,
                    const GdpConfig& config, std::span<const double> obs,
                    std::uint64_t seed);

}  // namespace gdp

#endif  // GDP_GENETIC_H_
