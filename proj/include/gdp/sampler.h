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

#ifndef GDP_SAMPLER_H_
#define GDP_SAMPLER_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "gdp/kernels/kernels.h"
#include "gdp/matrix.h"
#include "gdp/noise_model.h"
#include "gdp/schedule.h"

namespace gdp {

// How sigma^2 is computed for a step (t, s) with s < t.
enum class SigmaRule {
  // eta^2 (1 - abar_s) / (1 - abar_t) (1 - abar_t / abar_s)
  kConventional,
  // eta^2 (1 - abar_s) (abar_s - alpha_t) / (abar_s (1 - abar_t)), with the
  // single-step alpha_t. Negative values are clamped to 0 and flagged.
  kLiteral,
};

// Step warning bits recorded in StepRecord::warn_flags.
inline constexpr unsigned kWarnSigmaClamped = 1u;   // sigma^2 > 1 - abar_s
inline constexpr unsigned kWarnSigmaNegative = 2u;  // literal rule < 0

struct SamplerConfig {
  double eta = 1.0;
  double gamma = 1.0;
  bool clip_enabled = true;
  double clip_lo = -1.0;
  double clip_hi = 1.0;
  SigmaRule sigma_rule = SigmaRule::kConventional;
  std::shared_ptr<const Schedule> schedule;
  TimeGrid grid;
  // Rows per model call; 0 means all rows at once.
  int max_batch = 0;

  // Throws std::invalid_argument on out-of-range settings.
  void Validate() const;
};

// Diagnostics for one grid step, accumulated as order-independent sums.
struct StepRecord {
  int t = 0;
  int t_prev = 0;
  std::int64_t clip_count = 0;
  std::int64_t total_entries = 0;
  std::int64_t rows = 0;
  double eps_norm_sum = 0.0;
  double injected_noise_norm_sum = 0.0;
  unsigned warn_flags = 0;

  double mean_eps_norm() const;
  double mean_injected_noise_norm() const;
  double clip_frequency() const;
  void Merge(const StepRecord& other);
};

struct StepTrace {
  // steps[k] is the k-th step taken, i.e. grid index delta - k.
  std::vector<StepRecord> steps;
  std::int64_t nfe = 0;          // batched model calls
  std::int64_t model_rows = 0;   // rows passed through the model

  std::int64_t clip_count() const;
  std::int64_t total_entries() const;
  // Fraction of x0-hat entries outside the clip box over all steps.
  double clip_frequency() const;
  unsigned warn_flags() const;
  // Adds another trace of the same grid step by step.
  void Merge(const StepTrace& other);
};

// Columns: run_id,t_j,clip_count,total_entries,mean_eps_norm,warn_flags
void WriteTraceCsvHeader(std::ostream& out);
void WriteTraceCsv(std::ostream& out, std::string_view run_id,
                   const StepTrace& trace);

// Pre-clip denoised estimate (x - sqrt(1 - abar_t) eps) / sqrt(abar_t).
std::vector<double> X0Hat(std::span<const double> x, int t,
                          std::span<const double> eps,
                          const Schedule& schedule);
void X0HatRows(const Matrix& x, int t, const Matrix& eps,
               const Schedule& schedule, Matrix& out);

struct StepCoefficients {
  kernels::CombineCoefficients combine;
  double sigma = 0.0;
  unsigned warn_flags = 0;
};

// Coefficients for the step from grid index j to j - 1.
StepCoefficients ComputeStepCoefficients(const SamplerConfig& config, int j);

// One reverse step on every row: x at t_j to x at t_{j-1}. `noise` holds one
// standard-normal row per x row, or is null (then no noise is injected).
StepRecord DdpmStep(const Matrix& x, int j, const Matrix& eps,
                    const SamplerConfig& config, const Matrix* noise,
                    Matrix& out);
// Single-vector form.
std::vector<double> DdpmStep(std::span<const double> x, int j,
                             std::span<const double> eps,
                             const SamplerConfig& config,
                             std::span<const double> noise,
                             StepRecord* record = nullptr);

// Initial draw at t_delta: row i uses the stream (seed, init, i).
Matrix InitialNoise(int n, int dim, std::uint64_t seed);

// Reverse step with fresh noise keyed by (seed, j, row). Throws
// NonFiniteError if the result is not finite.
StepRecord DenoiseStep(const Matrix& x, int j, const Matrix& eps,
                       const SamplerConfig& config, std::uint64_t seed,
                       Matrix& out);

// Calls the model on x at timestep t in chunks of config.max_batch rows.
// Returns the number of model calls.
int PredictBatched(const NoiseModel& model, const SamplerConfig& config,
                   const Matrix& x, int t, std::span<const double> obs,
                   Matrix& eps);

struct SampleResult {
  Matrix samples;
  StepTrace trace;
};

// Draws n samples by denoising from t_delta down to t_0 on config.grid.
SampleResult Sample(const NoiseModel& model, const SamplerConfig& config,
                    int n, std::span<const double> obs, std::uint64_t seed);

}  // namespace gdp

#endif  // GDP_SAMPLER_H_
