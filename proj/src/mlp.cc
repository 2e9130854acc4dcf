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

#include "gdp/mlp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gdp/binary_record.h"
#include "gdp/kernels/kernels.h"
#include "gdp/rng.h"

namespace gdp {
namespace {

constexpr char kCheckpointTag[] = "GDPDENOISER";
constexpr std::uint32_t kCheckpointVersion = 1;

inline double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double Silu(double z) { return z * Sigmoid(z); }

inline double SiluGrad(double z) {
  const double s = Sigmoid(z);
  return s * (1.0 + z * (1.0 - s));
}

}  // namespace

void TimeFeatures(int t, std::span<double> out) {
  const std::size_t half = out.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double freq =
        std::exp(-std::log(10000.0) * static_cast<double>(i) / half);
    out[i] = std::sin(t * freq);
    out[half + i] = std::cos(t * freq);
  }
}

MlpDenoiser::MlpDenoiser(MlpConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  if (config_.action_dim < 1 || config_.obs_dim < 0 ||
      config_.time_features < 0 || config_.time_features % 2 != 0) {
    throw std::invalid_argument("MlpDenoiser: invalid dimensions");
  }
  std::vector<int> widths;
  widths.push_back(config_.action_dim + config_.obs_dim +
                   config_.time_features);
  for (int h : config_.hidden) {
    if (h < 1) throw std::invalid_argument("MlpDenoiser: empty hidden layer");
    widths.push_back(h);
  }
  widths.push_back(config_.action_dim);

  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    layer.in = widths[l];
    layer.out = widths[l + 1];
    layer.weight_offset = offset;
    offset += static_cast<std::size_t>(layer.in) * layer.out;
    layer.bias_offset = offset;
    offset += layer.out;
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);

  KeyedRng rng(CombineKeys(seed, 0x6d6c70));
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    const std::size_t end = layer.bias_offset + layer.out;
    for (std::size_t i = layer.weight_offset; i < end; ++i) {
      params_[i] = bound * (2.0 * rng.Uniform() - 1.0);
    }
  }
}

void MlpDenoiser::CheckInputs(const Matrix& x, std::span<const int> t,
                              const Matrix& obs) const {
  if (x.cols() != config_.action_dim) {
    throw std::invalid_argument("MlpDenoiser: action width mismatch");
  }
  if (static_cast<int>(t.size()) != x.rows()) {
    throw std::invalid_argument("MlpDenoiser: one timestep per row required");
  }
  if (config_.obs_dim > 0 &&
      (obs.rows() != x.rows() || obs.cols() != config_.obs_dim)) {
    throw std::invalid_argument("MlpDenoiser: observation shape mismatch");
  }
}

void MlpDenoiser::Forward(const Matrix& x, std::span<const int> t,
                          const Matrix& obs, Activations& acts,
                          Matrix& out) const {
  const int n = x.rows();
  const auto& k = kernels::Active();
  acts.inputs.resize(layers_.size());
  acts.pre.resize(layers_.size());

  Matrix& input = acts.inputs[0];
  input.Reset(n, layers_.front().in);
  for (int i = 0; i < n; ++i) {
    auto row = input.row(i);
    std::copy(x.row(i).begin(), x.row(i).end(), row.begin());
    if (config_.obs_dim > 0) {
      std::copy(obs.row(i).begin(), obs.row(i).end(),
                row.begin() + config_.action_dim);
    }
    TimeFeatures(t[i], row.subspan(config_.action_dim + config_.obs_dim));
  }

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    Matrix& pre = acts.pre[l];
    pre.Reset(n, layer.out);
    k.gemm_nt(acts.inputs[l].data(), n, layer.in,
              params_.data() + layer.weight_offset, layer.out,
              params_.data() + layer.bias_offset, pre.data());
    if (l + 1 < layers_.size()) {
      Matrix& next = acts.inputs[l + 1];
      next.Reset(n, layer.out);
      const auto src = pre.flat();
      auto dst = next.flat();
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = Silu(src[i]);
    } else {
      out = pre;
    }
  }
}

void MlpDenoiser::Predict(const Matrix& x, std::span<const int> t,
                          const Matrix& obs, Matrix& eps) const {
  CheckInputs(x, t, obs);
  Activations acts;
  Forward(x, t, obs, acts, eps);
}

double MlpDenoiser::Loss(const Matrix& x, std::span<const int> t,
                         const Matrix& obs, const Matrix& target) const {
  Matrix pred;
  Predict(x, t, obs, pred);
  double total = 0.0;
  const auto p = pred.flat();
  const auto y = target.flat();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p[i] - y[i];
    total += r * r;
  }
  return total / x.rows();
}

double MlpDenoiser::LossAndGradient(const Matrix& x, std::span<const int> t,
                                    const Matrix& obs, const Matrix& target,
                                    std::span<double> grad) const {
  CheckInputs(x, t, obs);
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("LossAndGradient: gradient size mismatch");
  }
  const int n = x.rows();
  const auto& k = kernels::Active();
  Activations acts;
  Matrix out;
  Forward(x, t, obs, acts, out);

  // d loss / d output = 2 (out - target) / n.
  Matrix delta(n, out.cols());
  double total = 0.0;
  {
    const auto o = out.flat();
    const auto y = target.flat();
    auto d = delta.flat();
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double r = o[i] - y[i];
      total += r * r;
      d[i] = 2.0 * r / n;
    }
  }

  std::fill(grad.begin(), grad.end(), 0.0);
  Matrix upstream;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const Matrix& input = acts.inputs[l];
    double* dw = grad.data() + layer.weight_offset;
    double* db = grad.data() + layer.bias_offset;
    for (int o = 0; o < layer.out; ++o) {
      double* dw_row = dw + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < n; ++i) {
        const double g = delta(i, o);
        db[o] += g;
        k.axpy(g, input.row(i).data(), dw_row, layer.in);
      }
    }
    if (l == 0) break;

    // Back through the weights, then the SiLU of layer l - 1.
    upstream.Reset(n, layer.in);
    const double* w = params_.data() + layer.weight_offset;
    for (int i = 0; i < n; ++i) {
      double* up = upstream.row(i).data();
      for (int o = 0; o < layer.out; ++o) {
        k.axpy(delta(i, o), w + static_cast<std::size_t>(o) * layer.in, up,
               layer.in);
      }
    }
    const auto pre = acts.pre[l - 1].flat();
    auto up = upstream.flat();
    for (std::size_t i = 0; i < up.size(); ++i) up[i] *= SiluGrad(pre[i]);
    std::swap(delta, upstream);
  }
  return total / n;
}

void MlpDenoiser::Save(const std::filesystem::path& path) const {
  BinaryRecord record;
  record.tag = BinaryRecord::MakeTag(kCheckpointTag);
  record.version = kCheckpointVersion;
  record.dims = {static_cast<std::uint64_t>(config_.action_dim),
                 static_cast<std::uint64_t>(config_.obs_dim),
                 static_cast<std::uint64_t>(config_.time_features),
                 config_.hidden.size()};
  for (int h : config_.hidden) record.dims.push_back(h);
  record.values = params_;
  WriteBinaryRecord(path, record);
}

MlpDenoiser MlpDenoiser::Load(const std::filesystem::path& path) {
  const BinaryRecord record =
      ReadBinaryRecord(path, kCheckpointTag, kCheckpointVersion);
  if (record.dims.size() < 4 ||
      record.dims.size() != 4 + record.dims[3]) {
    throw std::runtime_error("checkpoint: malformed dimension header");
  }
  MlpConfig config;
  config.action_dim = static_cast<int>(record.dims[0]);
  config.obs_dim = static_cast<int>(record.dims[1]);
  config.time_features = static_cast<int>(record.dims[2]);
  config.hidden.assign(record.dims.begin() + 4, record.dims.end());
  MlpDenoiser model(config, 0);
  if (record.values.size() != model.params_.size()) {
    throw std::runtime_error("checkpoint: parameter count mismatch");
  }
  model.params_ = record.values;
  return model;
}

}  // namespace gdp
