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

#include "gdp/genetic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gdp/kernels/kernels.h"
#include "gdp/rng.h"

namespace gdp {
namespace {

double Scale(double v, FitnessScaling scaling) {
  return scaling == FitnessScaling::kSquare ? v * v : v;
}

double RawScore(const double* x, const double* eps, std::size_t d, int t,
                const FitnessSpec& spec, const Schedule& schedule, double lo,
                double hi, std::vector<double>& scratch) {
  const auto& k = kernels::Active();
  if (spec.family == FitnessFamily::kStein) {
    return Scale(std::sqrt(k.sum_squares(eps, d)), spec.scaling);
  }
  const double abar = schedule.alpha_bar(t);
  scratch.resize(d);
  k.x0_hat(x, eps, scratch.data(), d, std::sqrt(1.0 - abar),
           1.0 / std::sqrt(abar));
  return Scale(k.clip_violation_l1(scratch.data(), d, lo, hi) / d,
               spec.scaling);
}

double MeanEpsNorm(const Matrix& eps) {
  const auto& k = kernels::Active();
  double total = 0.0;
  for (int i = 0; i < eps.rows(); ++i) {
    total += std::sqrt(k.sum_squares(eps.row(i).data(), eps.cols()));
  }
  return total / eps.rows();
}

double MeanClipViolation(const Matrix& x, int t, const Matrix& eps,
                         const SamplerConfig& cfg) {
  Matrix x0;
  X0HatRows(x, t, eps, *cfg.schedule, x0);
  const auto& k = kernels::Active();
  double total = 0.0;
  for (int i = 0; i < x0.rows(); ++i) {
    total += k.clip_violation_l1(x0.row(i).data(), x0.cols(), cfg.clip_lo,
                                 cfg.clip_hi) /
             x0.cols();
  }
  return total / x0.rows();
}

}  // namespace

double Fitness(std::span<const double> x, int t, std::span<const double> eps,
               const FitnessSpec& spec, const Schedule& schedule,
               double clip_lo, double clip_hi) {
  if (x.size() != eps.size() || x.empty()) {
    throw std::invalid_argument("Fitness: size mismatch");
  }
  std::vector<double> scratch;
  return RawScore(x.data(), eps.data(), x.size(), t, spec, schedule, clip_lo,
                  clip_hi, scratch);
}

void PopulationFitness(const Matrix& x, int t, const Matrix& eps,
                       const FitnessSpec& spec, const Schedule& schedule,
                       double clip_lo, double clip_hi,
                       std::vector<double>& out) {
  out.resize(x.rows());
  std::vector<double> scratch;
  for (int i = 0; i < x.rows(); ++i) {
    out[i] = RawScore(x.row(i).data(), eps.row(i).data(), x.cols(), t, spec,
                      schedule, clip_lo, clip_hi, scratch);
  }
}

std::vector<double> SelectionWeights(std::span<const double> raw,
                                     double temperature, WeightRule rule,
                                     bool* degenerate) {
  if (raw.empty()) throw std::invalid_argument("SelectionWeights: empty");
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("SelectionWeights: temperature must be > 0");
  }
  const std::size_t n = raw.size();
  std::vector<double> w(n);
  if (degenerate != nullptr) *degenerate = false;
  auto uniform = [&] {
    std::fill(w.begin(), w.end(), 1.0 / n);
    if (degenerate != nullptr) *degenerate = true;
    return w;
  };

  if (rule == WeightRule::kNormalized) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::isfinite(raw[i]) ? std::max(0.0, temperature * raw[i]) : 0.0;
      total += w[i];
    }
    if (!(total > 0.0)) return uniform();
    for (double& v : w) v /= total;
    return w;
  }

  // Logits -r/T or -T r, shifted by their maximum.
  const bool scaled = rule == WeightRule::kScaledSoftmax;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = scaled ? -temperature * raw[i] : -raw[i] / temperature;
    if (std::isnan(w[i])) w[i] = -std::numeric_limits<double>::infinity();
    best = std::max(best, w[i]);
  }
  if (!std::isfinite(best)) return uniform();
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - best);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<int> SelectSurvivors(std::span<const double> raw,
                                 std::span<const double> weights, int count,
                                 SelectorKind kind, std::uint64_t key) {
  const int n = static_cast<int>(raw.size());
  if (count < 1 || count > n) {
    throw std::invalid_argument("SelectSurvivors: need 1 <= S <= P");
  }
  std::vector<int> out(count);
  if (kind == SelectorKind::kTopK) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return raw[a] < raw[b]; });
    std::copy_n(order.begin(), count, out.begin());
    return out;
  }
  if (static_cast<int>(weights.size()) != n) {
    throw std::invalid_argument("SelectSurvivors: weight size mismatch");
  }
  std::vector<double> cdf(n);
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  KeyedRng rng(key);
  for (int s = 0; s < count; ++s) {
    const double u = rng.Uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int idx = static_cast<int>(it - cdf.begin());
    if (idx >= n) idx = n - 1;
    // Never land on a zero-weight index through rounding.
    while (weights[idx] <= 0.0 && idx > 0) --idx;
    out[s] = idx;
  }
  return out;
}

double SelectionEntropy(std::span<const int> selected) {
  if (selected.empty()) return 0.0;
  std::vector<int> sorted(selected.begin(), selected.end());
  std::sort(sorted.begin(), sorted.end());
  double h = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double p = (j - i) / n;
    h -= p * std::log(p);
    i = j;
  }
  return h;
}

void WriteFitnessHistoryCsvHeader(std::ostream& out) {
  out << "run_id,step,t_j,min_fitness,mean_fitness,max_fitness,"
         "selection_entropy,pre_mean_eps_norm,post_mean_eps_norm,"
         "pre_mean_clip_violation,post_mean_clip_violation,"
         "degenerate_weights\n";
}

void WriteFitnessHistoryCsv(std::ostream& out, std::string_view run_id,
                            std::span<const FitnessHistoryRow> history) {
  for (const auto& h : history) {
    fmt::print(out, "{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
               "{:.17g},{:.17g},{:.17g},{}\n",
               run_id, h.step, h.t, h.min_fitness, h.mean_fitness,
               h.max_fitness, h.selection_entropy, h.pre_mean_eps_norm,
               h.post_mean_eps_norm, h.pre_mean_clip_violation,
               h.post_mean_clip_violation, h.degenerate_weights ? 1 : 0);
  }
}

GdpResult GdpSample(const NoiseModel& model, const SamplerConfig& sampler,
                    const GdpConfig& config, std::span<const double> obs,
                    std::uint64_t seed) {
  sampler.Validate();
  const int pop = config.population;
  const int keep = config.survivors;
  if (pop < 1 || keep < 1 || keep > pop) {
    throw std::invalid_argument("GdpSample: need P >= S >= 1");
  }
  if (!(config.fitness.temperature > 0.0)) {
    throw std::invalid_argument("GdpSample: temperature must be > 0");
  }
  if (static_cast<int>(obs.size()) != model.obs_dim()) {
    throw std::invalid_argument("GdpSample: observation width mismatch");
  }
  const int dim = model.action_dim();
  // x, eps, duplicated copies and the next state.
  const std::size_t bytes =
      std::size_t{5} * static_cast<std::size_t>(pop) * dim * sizeof(double);
  if (bytes / pop / dim != 5 * sizeof(double) || bytes > kMaxPopulationBytes) {
    throw std::length_error(
        fmt::format("GdpSample: population state of {} x {} exceeds {} bytes",
                    pop, dim, kMaxPopulationBytes));
  }

  const Schedule& schedule = *sampler.schedule;
  GdpResult result;
  Matrix x = InitialNoise(pop, dim, seed);
  Matrix eps;
  Matrix dup_x(pop, dim);
  Matrix dup_eps(pop, dim);
  Matrix next;
  std::vector<double> raw;
  std::vector<double> last_raw;
  std::vector<int> last_survivors;

  for (int j = sampler.grid.delta(); j >= 1; --j) {
    const int t = sampler.grid[j];
    result.trace.nfe += PredictBatched(model, sampler, x, t, obs, eps);
    result.trace.model_rows += pop;

    PopulationFitness(x, t, eps, config.fitness, schedule, sampler.clip_lo,
                      sampler.clip_hi, raw);
    FitnessHistoryRow row;
    row.step = j;
    row.t = t;
    row.min_fitness = *std::min_element(raw.begin(), raw.end());
    row.max_fitness = *std::max_element(raw.begin(), raw.end());
    row.mean_fitness = std::accumulate(raw.begin(), raw.end(), 0.0) / pop;

    const std::vector<double> weights =
        SelectionWeights(raw, config.fitness.temperature,
                         config.fitness.weight_rule, &row.degenerate_weights);
    const std::vector<int> survivors = SelectSurvivors(
        raw, weights, keep, config.selector.kind,
        StreamKey(seed, kSelectionStreamTag, static_cast<std::uint64_t>(j)));
    row.selection_entropy = SelectionEntropy(survivors);

    for (int i = 0; i < pop; ++i) {
      const int parent = survivors[i % keep];
      dup_x.SetRow(i, x.row(parent));
      dup_eps.SetRow(i, eps.row(parent));
    }
    row.pre_mean_eps_norm = MeanEpsNorm(eps);
    row.post_mean_eps_norm = MeanEpsNorm(dup_eps);
    row.pre_mean_clip_violation = MeanClipViolation(x, t, eps, sampler);
    row.post_mean_clip_violation =
        MeanClipViolation(dup_x, t, dup_eps, sampler);
    result.history.push_back(row);

    result.trace.steps.push_back(
        DenoiseStep(dup_x, j, dup_eps, sampler, seed, next));
    std::swap(x, next);
    last_raw = raw;
    last_survivors = survivors;
  }

  result.picked = 0;
  if (config.selector.final_pick == FinalPick::kBest) {
    // Rank members by their parent's score at the last step.
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pop; ++i) {
      const double score = last_raw[last_survivors[i % keep]];
      if (score < best) {
        best = score;
        result.picked = i;
      }
    }
  }
  result.action.assign(x.row(result.picked).begin(),
                       x.row(result.picked).end());
  result.population = std::move(x);
  return result;
}

}  // namespace gdp
