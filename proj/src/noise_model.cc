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

#include "gdp/noise_model.h"

#include <chrono>
#include <stdexcept>
#include <vector>

namespace gdp {

void PredictShared(const NoiseModel& model, const Matrix& x, int t,
                   std::span<const double> obs, Matrix& eps) {
  if (static_cast<int>(obs.size()) != model.obs_dim()) {
    throw std::invalid_argument("observation width does not match the model");
  }
  const std::vector<int> steps(x.rows(), t);
  const Matrix obs_rows = Matrix::Broadcast(x.rows(), obs);
  model.Predict(x, steps, obs_rows, eps);
}

void ZeroNoiseModel::Predict(const Matrix& x, std::span<const int> t,
                             const Matrix& obs, Matrix& eps) const {
  (void)t;
  (void)obs;
  eps.Reset(x.rows(), action_dim_);
}

void TimedNoiseModel::Predict(const Matrix& x, std::span<const int> t,
                              const Matrix& obs, Matrix& eps) const {
  const auto start = std::chrono::steady_clock::now();
  inner_.Predict(x, t, obs, eps);
  const auto stop = std::chrono::steady_clock::now();
  nanoseconds_ += std::chrono::duration_cast<std::chrono::nanoseconds>(
                      stop - start)
                      .count();
  ++calls_;
}

}  // namespace gdp
