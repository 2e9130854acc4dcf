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

#ifndef GDP_NOISE_MODEL_H_
#define GDP_NOISE_MODEL_H_

#include <atomic>
#include <cstdint>
#include <span>

#include "gdp/matrix.h"

namespace gdp {

// Conditional noise predictor eps(x, t, o). Implementations must be
// deterministic, and row i of the output may depend only on row i of the
// inputs, so a batched call equals the concatenation of single-row calls.
// Predict must be safe to call concurrently once the model is built.
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;

  // Flattened action-window dimension.
  virtual int action_dim() const = 0;
  // Flattened observation-window dimension, possibly 0.
  virtual int obs_dim() const = 0;

  // x: n x action_dim, t: n timesteps, obs: n x obs_dim (zero columns when
  // obs_dim() == 0). eps is resized to n x action_dim.
  virtual void Predict(const Matrix& x, std::span<const int> t,
                       const Matrix& obs, Matrix& eps) const = 0;
};

// Predicts with the same timestep and observation for every row.
void PredictShared(const NoiseModel& model, const Matrix& x, int t,
                   std::span<const double> obs, Matrix& eps);

// Always predicts zero noise. Useful as a cost-free stub.
class ZeroNoiseModel final : public NoiseModel {
 public:
  explicit ZeroNoiseModel(int action_dim, int obs_dim = 0)
      : action_dim_(action_dim), obs_dim_(obs_dim) {}

  int action_dim() const override { return action_dim_; }
  int obs_dim() const override { return obs_dim_; }
  void Predict(const Matrix& x, std::span<const int> t, const Matrix& obs,
               Matrix& eps) const override;

 private:
  int action_dim_;
  int obs_dim_;
};

// Forwards to another model and accumulates time spent in Predict.
class TimedNoiseModel final : public NoiseModel {
 public:
  explicit TimedNoiseModel(const NoiseModel& inner) : inner_(inner) {}

  int action_dim() const override { return inner_.action_dim(); }
  int obs_dim() const override { return inner_.obs_dim(); }
  void Predict(const Matrix& x, std::span<const int> t, const Matrix& obs,
               Matrix& eps) const override;

  std::int64_t calls() const { return calls_.load(); }
  std::int64_t nanoseconds() const { return nanoseconds_.load(); }

 private:
  const NoiseModel& inner_;
  mutable std::atomic<std::int64_t> calls_{0};
  mutable std::atomic<std::int64_t> nanoseconds_{0};
};

}  // namespace gdp

#endif  // GDP_NOISE_MODEL_H_
