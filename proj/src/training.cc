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

#include "gdp/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gdp/errors.h"
#include "gdp/rng.h"

namespace gdp {
namespace {

constexpr std::uint64_t kNoiseTag = 0x6e6f697365;
constexpr std::uint64_t kShuffleTag = 0x73687566;
constexpr std::uint64_t kGradCheckTag = 0x67636b;

void CheckBatch(const PairDataset& batch) {
  if (batch.size() == 0) {
    throw std::invalid_argument("DDPM loss: empty batch");
  }
  if (batch.obs.cols() > 0 && batch.obs.rows() != batch.actions.rows()) {
    throw std::invalid_argument("DDPM loss: obs/action row mismatch");
  }
}

}  // namespace

PairDataset PairDataset::Subset(std::span<const int> rows) const {
  PairDataset out;
  const int n = static_cast<int>(rows.size());
  out.actions.Reset(n, actions.cols());
  out.obs.Reset(obs.cols() > 0 ? n : 0, obs.cols());
  for (int i = 0; i < n; ++i) {
    out.actions.SetRow(i, actions.row(rows[i]));
    if (obs.cols() > 0) out.obs.SetRow(i, obs.row(rows[i]));
  }
  return out;
}

PairDataset GaussianDataset(int n, double mean, double stddev,
                            std::uint64_t seed) {
  if (n < 1 || !(stddev >= 0.0)) {
    throw std::invalid_argument("GaussianDataset: invalid size or spread");
  }
  PairDataset out;
  out.actions.Reset(n, 1);
  KeyedRng rng(seed);
  for (int i = 0; i < n; ++i) out.actions(i, 0) = mean + stddev * rng.Normal();
  return out;
}

NoisedBatch NoiseBatch(const Schedule& schedule, const Matrix& x0,
                       std::uint64_t seed) {
  NoisedBatch out;
  const int n = x0.rows();
  const int d = x0.cols();
  out.x_t.Reset(n, d);
  out.eps.Reset(n, d);
  out.t.resize(n);
  const auto big_t = static_cast<std::uint64_t>(schedule.num_steps());
  for (int i = 0; i < n; ++i) {
    KeyedRng rng(StreamKey(seed, kNoiseTag, i));
    const int t = 1 + static_cast<int>(rng.Below(big_t));
    out.t[i] = t;
    rng.FillNormal(out.eps.row(i));
    const double a = std::sqrt(schedule.alpha_bar(t));
    const double b = std::sqrt(1.0 - schedule.alpha_bar(t));
    for (int k = 0; k < d; ++k) {
      out.x_t(i, k) = a * x0(i, k) + b * out.eps(i, k);
    }
  }
  return out;
}

double DdpmLoss(const NoiseModel& model, const Schedule& schedule,
                const PairDataset& batch, std::uint64_t seed) {
  CheckBatch(batch);
  const NoisedBatch noised = NoiseBatch(schedule, batch.actions, seed);
  Matrix pred;
  model.Predict(noised.x_t, noised.t, batch.obs, pred);
  double total = 0.0;
  const auto p = pred.flat();
  const auto e = noised.eps.flat();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p[i] - e[i];
    total += r * r;
  }
  return total / batch.size();
}

AdamW::AdamW(std::size_t num_parameters, AdamWConfig config)
    : config_(config), m_(num_parameters, 0.0), v_(num_parameters, 0.0) {}

void AdamW::Step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("AdamW: size mismatch");
  }
  ++step_;
  const double lr = config_.learning_rate;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr * (m_hat / (std::sqrt(v_hat) + config_.epsilon) +
                       config_.weight_decay * params[i]);
  }
}

std::vector<double> Train(MlpDenoiser& model, const Schedule& schedule,
                          const PairDataset& dataset,
                          const TrainConfig& config,
                          const EpochCallback& on_epoch) {
  if (config.batch_size < 1 || config.epochs < 0) {
    throw std::invalid_argument("Train: invalid batch size or epochs");
  }
  if (dataset.size() < config.batch_size) {
    throw std::invalid_argument("Train: dataset smaller than one batch");
  }
  AdamW optimizer(model.parameters().size(), config.optimizer);
  std::vector<double> grad(model.parameters().size());
  std::vector<int> order(dataset.size());
  std::vector<double> curve;
  curve.reserve(config.epochs);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    KeyedRng shuffle(StreamKey(config.seed, kShuffleTag, epoch));
    std::shuffle(order.begin(), order.end(), shuffle);

    double epoch_total = 0.0;
    int seen = 0;
    int batch_index = 0;
    for (int begin = 0; begin < dataset.size();
         begin += config.batch_size, ++batch_index) {
      const int count = std::min(config.batch_size, dataset.size() - begin);
      const PairDataset batch = dataset.Subset(
          std::span<const int>(order).subspan(begin, count));
      const std::uint64_t key = CombineKeys(
          config.seed, (static_cast<std::uint64_t>(epoch) << 32) |
                           static_cast<std::uint64_t>(batch_index));
      const NoisedBatch noised = NoiseBatch(schedule, batch.actions, key);
      const double loss = model.LossAndGradient(noised.x_t, noised.t,
                                                batch.obs, noised.eps, grad);
      const bool grad_finite = std::all_of(
          grad.begin(), grad.end(), [](double g) { return std::isfinite(g); });
      if (!std::isfinite(loss) || !grad_finite) {
        throw TrainingError("non-finite loss or gradient", epoch,
                            batch_index);
      }
      optimizer.Step(model.parameters(), grad);
      epoch_total += loss * count;
      seen += count;
    }
    curve.push_back(epoch_total / seen);
    if (on_epoch) on_epoch(epoch, curve.back());
  }
  return curve;
}

double GradCheck(const MlpDenoiser& model, const Schedule& schedule,
                 const PairDataset& batch, std::uint64_t seed,
                 int num_samples, double step) {
  CheckBatch(batch);
  if (model.num_parameters() > kGradCheckMaxParameters) {
    throw std::invalid_argument("GradCheck: model too large");
  }
  const NoisedBatch noised = NoiseBatch(schedule, batch.actions, seed);
  std::vector<double> grad(model.num_parameters());
  model.LossAndGradient(noised.x_t, noised.t, batch.obs, noised.eps, grad);

  std::vector<int> indices(model.num_parameters());
  std::iota(indices.begin(), indices.end(), 0);
  if (num_samples < model.num_parameters()) {
    KeyedRng rng(CombineKeys(seed, kGradCheckTag));
    std::shuffle(indices.begin(), indices.end(), rng);
    indices.resize(num_samples);
  }

  MlpDenoiser probe = model;
  auto params = probe.parameters();
  double worst = 0.0;
  for (int i : indices) {
    const double original = params[i];
    params[i] = original + step;
    const double up = probe.Loss(noised.x_t, noised.t, batch.obs, noised.eps);
    params[i] = original - step;
    const double down =
        probe.Loss(noised.x_t, noised.t, batch.obs, noised.eps);
    params[i] = original;
    const double numeric = (up - down) / (2.0 * step);
    const double rel =
        std::abs(grad[i] - numeric) / (std::abs(grad[i]) + 1e-8);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace gdp
