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

#ifndef GDP_TRAINING_H_
#define GDP_TRAINING_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gdp/matrix.h"
#include "gdp/mlp.h"
#include "gdp/noise_model.h"
#include "gdp/schedule.h"

namespace gdp {

// Aligned (observation, clean action) pairs. obs may have zero columns.
struct PairDataset {
  Matrix obs;
  Matrix actions;

  int size() const { return actions.rows(); }
  PairDataset Subset(std::span<const int> rows) const;
};

// n draws of a 1-D Gaussian with no observation.
PairDataset GaussianDataset(int n, double mean, double stddev,
                            std::uint64_t seed);

// Forward-noised copy of a batch:
// x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps.
struct NoisedBatch {
  Matrix x_t;
  std::vector<int> t;
  Matrix eps;
};

// t ~ Uniform{1..T} and eps ~ N(0, I) per row, keyed by (seed, row).
NoisedBatch NoiseBatch(const Schedule& schedule, const Matrix& x0,
                       std::uint64_t seed);

// Mean over the batch of ||eps_model(x_t, t, o) - eps||^2.
double DdpmLoss(const NoiseModel& model, const Schedule& schedule,
                const PairDataset& batch, std::uint64_t seed);

struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-6;
};

// Adam with decoupled weight decay.
class AdamW {
 public:
  AdamW(std::size_t num_parameters, AdamWConfig config);

  void Step(std::span<double> params, std::span<const double> grad);
  std::int64_t step_count() const { return step_; }

 private:
  AdamWConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t step_ = 0;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 64;
  AdamWConfig optimizer;
  std::uint64_t seed = 0;
};

// Called after each epoch with (epoch, mean loss).
using EpochCallback = std::function<void(int, double)>;

// Minibatch DDPM training. Returns the per-epoch mean loss. Throws
// TrainingError on a non-finite loss or gradient.
std::vector<double> Train(MlpDenoiser& model, const Schedule& schedule,
                          const PairDataset& dataset,
                          const TrainConfig& config,
                          const EpochCallback& on_epoch = {});

// Largest |analytic - central difference| / (|analytic| + 1e-8) over a
// seeded sample of parameters (all of them when there are fewer). Requires
// at most kGradCheckMaxParameters parameters.
inline constexpr int kGradCheckMaxParameters = 10000;
double GradCheck(const MlpDenoiser& model, const Schedule& schedule,
                 const PairDataset& batch, std::uint64_t seed,
                 int num_samples = 100, double step = 1e-5);

}  // namespace gdp

#endif  // GDP_TRAINING_H_
