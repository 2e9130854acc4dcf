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

#include "gdp/sampler.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gdp/errors.h"
#include "gdp/rng.h"

namespace gdp {
namespace {

double RowNorm(std::span<const double> v) {
  return std::sqrt(kernels::Active().sum_squares(v.data(), v.size()));
}

}  // namespace

void SamplerConfig::Validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("sampler: eta must lie in [0, 1]");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("sampler: gamma must be >= 0");
  }
  if (!(clip_lo < clip_hi)) {
    throw std::invalid_argument("sampler: clip_lo must be below clip_hi");
  }
  if (!schedule) throw std::invalid_argument("sampler: missing schedule");
  if (grid.indices.size() < 2) {
    throw std::invalid_argument("sampler: grid needs at least one step");
  }
  GridFromIndices(*schedule, grid.indices);
  if (grid.t_max() < 1) throw std::invalid_argument("sampler: empty grid");
  if (max_batch < 0) throw std::invalid_argument("sampler: max_batch < 0");
}

double StepRecord::mean_eps_norm() const {
  return rows > 0 ? eps_norm_sum / rows : 0.0;
}

double StepRecord::mean_injected_noise_norm() const {
  return rows > 0 ? injected_noise_norm_sum / rows : 0.0;
}

double StepRecord::clip_frequency() const {
  return total_entries > 0
             ? static_cast<double>(clip_count) / total_entries
             : 0.0;
}

void StepRecord::Merge(const StepRecord& other) {
  clip_count += other.clip_count;
  total_entries += other.total_entries;
  rows += other.rows;
  eps_norm_sum += other.eps_norm_sum;
  injected_noise_norm_sum += other.injected_noise_norm_sum;
  warn_flags |= other.warn_flags;
}

std::int64_t StepTrace::clip_count() const {
  std::int64_t total = 0;
  for (const auto& s : steps) total += s.clip_count;
  return total;
}

std::int64_t StepTrace::total_entries() const {
  std::int64_t total = 0;
  for (const auto& s : steps) total += s.total_entries;
  return total;
}

double StepTrace::clip_frequency() const {
  const std::int64_t total = total_entries();
  return total > 0 ? static_cast<double>(clip_count()) / total : 0.0;
}

unsigned StepTrace::warn_flags() const {
  unsigned flags = 0;
  for (const auto& s : steps) flags |= s.warn_flags;
  return flags;
}

void StepTrace::Merge(const StepTrace& other) {
  if (steps.empty()) {
    steps = other.steps;
  } else {
    if (steps.size() != other.steps.size()) {
      throw std::invalid_argument("StepTrace::Merge: grid mismatch");
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
      steps[k].Merge(other.steps[k]);
    }
  }
  nfe += other.nfe;
  model_rows += other.model_rows;
}

void WriteTraceCsvHeader(std::ostream& out) {
  out << "run_id,t_j,clip_count,total_entries,mean_eps_norm,warn_flags\n";
}

void WriteTraceCsv(std::ostream& out, std::string_view run_id,
                   const StepTrace& trace) {
  for (const auto& s : trace.steps) {
    fmt::print(out, "{},{},{},{},{:.17g},{}\n", run_id, s.t, s.clip_count,
               s.total_entries, s.mean_eps_norm(), s.warn_flags);
  }
}

std::vector<double> X0Hat(std::span<const double> x, int t,
                          std::span<const double> eps,
                          const Schedule& schedule) {
  if (x.size() != eps.size()) {
    throw std::invalid_argument("X0Hat: size mismatch");
  }
  const double abar = schedule.alpha_bar(t);
  std::vector<double> out(x.size());
  kernels::Active().x0_hat(x.data(), eps.data(), out.data(), x.size(),
                           std::sqrt(1.0 - abar), 1.0 / std::sqrt(abar));
  return out;
}

void X0HatRows(const Matrix& x, int t, const Matrix& eps,
               const Schedule& schedule, Matrix& out) {
  if (x.rows() != eps.rows() || x.cols() != eps.cols()) {
    throw std::invalid_argument("X0HatRows: shape mismatch");
  }
  const double abar = schedule.alpha_bar(t);
  out.Reset(x.rows(), x.cols());
  kernels::Active().x0_hat(x.data(), eps.data(), out.data(), x.size(),
                           std::sqrt(1.0 - abar), 1.0 / std::sqrt(abar));
}

StepCoefficients ComputeStepCoefficients(const SamplerConfig& config, int j) {
  if (j < 1 || j > config.grid.delta()) {
    throw std::out_of_range("sampler: grid index out of range");
  }
  const Schedule& schedule = *config.schedule;
  const int t = config.grid[j];
  const int s = config.grid[j - 1];
  const double abar_t = schedule.alpha_bar(t);
  const double abar_s = schedule.alpha_bar(s);

  StepCoefficients out;
  auto& c = out.combine;
  c.eps_scale = std::sqrt(1.0 - abar_t);
  c.inv_signal = 1.0 / std::sqrt(abar_t);
  c.clip = config.clip_enabled;
  c.lo = config.clip_lo;
  c.hi = config.clip_hi;

  if (s == 0) {
    // abar_0 = 1: the step returns clip(x0_hat) itself.
    c.signal_prev = 1.0;
    return out;
  }

  const double eta2 = config.eta * config.eta;
  double sigma2 = 0.0;
  if (config.sigma_rule == SigmaRule::kConventional) {
    sigma2 = eta2 * (1.0 - abar_s) / (1.0 - abar_t) * (1.0 - abar_t / abar_s);
  } else {
    sigma2 = eta2 * (1.0 - abar_s) * (abar_s - schedule.alpha(t)) /
             (abar_s * (1.0 - abar_t));
    if (sigma2 < 0.0) {
      sigma2 = 0.0;
      out.warn_flags |= kWarnSigmaNegative;
    }
  }
  if (sigma2 > 1.0 - abar_s) {
    sigma2 = 1.0 - abar_s;
    out.warn_flags |= kWarnSigmaClamped;
  }
  out.sigma = std::sqrt(sigma2);
  c.signal_prev = std::sqrt(abar_s);
  c.eps_prev = std::sqrt(std::max(0.0, 1.0 - abar_s - sigma2));
  c.noise_prev = config.gamma * out.sigma;
  return out;
}

StepRecord DdpmStep(const Matrix& x, int j, const Matrix& eps,
                    const SamplerConfig& config, const Matrix* noise,
                    Matrix& out) {
  if (x.rows() != eps.rows() || x.cols() != eps.cols()) {
    throw std::invalid_argument("DdpmStep: x/eps shape mismatch");
  }
  const StepCoefficients coeffs = ComputeStepCoefficients(config, j);
  const bool inject = coeffs.combine.noise_prev != 0.0 && noise != nullptr;
  if (inject && (noise->rows() != x.rows() || noise->cols() != x.cols())) {
    throw std::invalid_argument("DdpmStep: noise shape mismatch");
  }

  StepRecord record;
  record.t = config.grid[j];
  record.t_prev = config.grid[j - 1];
  record.warn_flags = coeffs.warn_flags;
  record.rows = x.rows();
  record.total_entries = static_cast<std::int64_t>(x.size());

  out.Reset(x.rows(), x.cols());
  const auto& k = kernels::Active();
  for (int i = 0; i < x.rows(); ++i) {
    record.eps_norm_sum += RowNorm(eps.row(i));
    if (inject) {
      record.injected_noise_norm_sum +=
          coeffs.combine.noise_prev * RowNorm(noise->row(i));
    }
  }
  record.clip_count = k.denoise_combine(
      x.data(), eps.data(), inject ? noise->data() : nullptr, out.data(),
      x.size(), coeffs.combine);
  return record;
}

std::vector<double> DdpmStep(std::span<const double> x, int j,
                             std::span<const double> eps,
                             const SamplerConfig& config,
                             std::span<const double> noise,
                             StepRecord* record) {
  const int d = static_cast<int>(x.size());
  const Matrix xm = Matrix::Broadcast(1, x);
  const Matrix em = Matrix::Broadcast(1, eps);
  Matrix nm;
  if (!noise.empty()) nm = Matrix::Broadcast(1, noise);
  Matrix out;
  const StepRecord r =
      DdpmStep(xm, j, em, config, noise.empty() ? nullptr : &nm, out);
  if (record != nullptr) *record = r;
  return std::vector<double>(out.data(), out.data() + d);
}

Matrix InitialNoise(int n, int dim, std::uint64_t seed) {
  Matrix x(n, dim);
  for (int i = 0; i < n; ++i) {
    KeyedRng rng(StreamKey(seed, kInitStreamTag, i));
    rng.FillNormal(x.row(i));
  }
  return x;
}

StepRecord DenoiseStep(const Matrix& x, int j, const Matrix& eps,
                       const SamplerConfig& config, std::uint64_t seed,
                       Matrix& out) {
  const StepCoefficients coeffs = ComputeStepCoefficients(config, j);
  Matrix noise;
  const Matrix* noise_ptr = nullptr;
  if (coeffs.combine.noise_prev != 0.0) {
    noise.Reset(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) {
      KeyedRng rng(StreamKey(seed, static_cast<std::uint64_t>(j), i));
      rng.FillNormal(noise.row(i));
    }
    noise_ptr = &noise;
  }
  const StepRecord record = DdpmStep(x, j, eps, config, noise_ptr, out);
  for (double v : out.flat()) {
    if (!std::isfinite(v)) {
      throw NonFiniteError(fmt::format(
          "sampler: non-finite value at grid index {} (t={})", j,
          config.grid[j]));
    }
  }
  return record;
}

int PredictBatched(const NoiseModel& model, const SamplerConfig& config,
                   const Matrix& x, int t, std::span<const double> obs,
                   Matrix& eps) {
  const int n = x.rows();
  const int chunk = config.max_batch > 0 ? config.max_batch : n;
  if (chunk >= n) {
    PredictShared(model, x, t, obs, eps);
    return 1;
  }
  eps.Reset(n, x.cols());
  int calls = 0;
  Matrix part_eps;
  for (int begin = 0; begin < n; begin += chunk, ++calls) {
    const int count = std::min(chunk, n - begin);
    PredictShared(model, x.RowBlock(begin, count), t, obs, part_eps);
    std::copy(part_eps.flat().begin(), part_eps.flat().end(),
              eps.data() + static_cast<std::size_t>(begin) * x.cols());
  }
  return calls;
}

SampleResult Sample(const NoiseModel& model, const SamplerConfig& config,
                    int n, std::span<const double> obs, std::uint64_t seed) {
  config.Validate();
  if (n < 1) throw std::invalid_argument("Sample: n must be positive");
  if (static_cast<int>(obs.size()) != model.obs_dim()) {
    throw std::invalid_argument("Sample: observation width mismatch");
  }
  const int dim = model.action_dim();
  SampleResult result;
  Matrix x = InitialNoise(n, dim, seed);
  Matrix eps;
  Matrix next;
  for (int j = config.grid.delta(); j >= 1; --j) {
    result.trace.nfe += PredictBatched(model, config, x, config.grid[j], obs,
                                       eps);
    result.trace.model_rows += n;
    result.trace.steps.push_back(
        DenoiseStep(x, j, eps, config, seed, next));
    std::swap(x, next);
  }
  result.samples = std::move(x);
  return result;
}

}  // namespace gdp
