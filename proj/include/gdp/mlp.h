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

#ifndef GDP_MLP_H_
#define GDP_MLP_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gdp/matrix.h"
#include "gdp/noise_model.h"

namespace gdp {

struct MlpConfig {
  int action_dim = 1;
  int obs_dim = 0;
  std::vector<int> hidden = {256, 256, 256};
  // Sinusoidal timestep features appended to the input (even).
  int time_features = 32;
};

// Fully connected noise predictor: input [x, obs, time features], SiLU
// hidden layers, linear output. The output layer starts at zero so a fresh
// model predicts eps = 0.
class MlpDenoiser final : public NoiseModel {
 public:
  struct Layer {
    int in = 0;
    int out = 0;
    std::size_t weight_offset = 0;  // out x in, row-major
    std::size_t bias_offset = 0;
  };

  MlpDenoiser(MlpConfig config, std::uint64_t seed);

  int action_dim() const override { return config_.action_dim; }
  int obs_dim() const override { return config_.obs_dim; }
  void Predict(const Matrix& x, std::span<const int> t, const Matrix& obs,
               Matrix& eps) const override;

  const MlpConfig& config() const { return config_; }
  const std::vector<Layer>& layers() const { return layers_; }
  int num_parameters() const { return static_cast<int>(params_.size()); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Mean over rows of ||eps(x, t, obs) - target||^2.
  double Loss(const Matrix& x, std::span<const int> t, const Matrix& obs,
              const Matrix& target) const;
  // Same loss; overwrites grad (num_parameters() entries) with its gradient.
  double LossAndGradient(const Matrix& x, std::span<const int> t,
                         const Matrix& obs, const Matrix& target,
                         std::span<double> grad) const;

  void Save(const std::filesystem::path& path) const;
  static MlpDenoiser Load(const std::filesystem::path& path);

 private:
  struct Activations {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  void Forward(const Matrix& x, std::span<const int> t, const Matrix& obs,
               Activations& acts, Matrix& out) const;
  void CheckInputs(const Matrix& x, std::span<const int> t,
                   const Matrix& obs) const;

  MlpConfig config_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

// [sin(t w_0) .. sin(t w_{k-1}), cos(t w_0) .. cos(t w_{k-1})] with
// w_i = 10000^(-i / k), k = count / 2.
void TimeFeatures(int t, std::span<double> out);

}  // namespace gdp

#endif  // GDP_MLP_H_
