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

#include "gdp/sweep.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <future>
#include <set>
#include <stdexcept>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gdp/csv.h"
#include "gdp/genetic.h"
#include "gdp/metrics.h"
#include "gdp/rng.h"
#include "gdp/sampler.h"
#include "gdp/stats.h"
#include "gdp/target.h"
#include "gdp/thread_pool.h"
#include "gdp/toyenv.h"

namespace gdp {
namespace {

constexpr std::uint64_t kReferenceTag = 0x726566;
constexpr std::uint64_t kMemberTag = 0x6d656d;

std::string Timestamp() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     fmt::gmtime(std::time(nullptr)));
}

SamplerConfig CellSampler(const SweepConfig& config, const SweepCell& cell,
                          std::shared_ptr<const Schedule> schedule) {
  SamplerConfig s;
  s.schedule = std::move(schedule);
  s.grid = MakeCellGrid(*s.schedule, cell);
  s.gamma = cell.gamma;
  s.eta = cell.strategy == SweepStrategy::kDdim ? 0.0 : cell.eta;
  s.sigma_rule = config.sigma_rule;
  return s;
}

GdpConfig CellGdp(const SweepConfig& config, const SweepCell& cell) {
  GdpConfig g;
  g.population = cell.population;
  g.survivors = cell.effective_survivors();
  g.fitness.family = cell.fitness;
  g.fitness.scaling = cell.scaling;
  g.fitness.temperature = cell.temperature;
  g.fitness.weight_rule = config.weight_rule;
  g.selector.kind = cell.selector;
  g.selector.final_pick = cell.final_pick;
  return g;
}

using Clock = std::chrono::steady_clock;

// Splits time spent sampling into model calls and everything else.
void SetTiming(const TimedNoiseModel& model, const StepTrace& trace,
               Clock::duration sampling, CellResult& out) {
  if (trace.nfe == 0) return;
  const double model_us = model.nanoseconds() * 1e-3;
  const double total_us =
      std::chrono::duration<double, std::micro>(sampling).count();
  out.time_per_nfe_us = model_us / model.calls();
  out.time_per_step_us = std::max(0.0, total_us - model_us) / trace.nfe;
}

// Mean with a normal-approximation 95% band.
void MeanBand(const std::vector<double>& v, double& mean, double& lo,
              double& hi) {
  mean = Mean(v);
  const double half =
      v.size() > 1 ? 1.959963984540054 * std::sqrt(Variance(v) / v.size())
                   : 0.0;
  lo = mean - half;
  hi = mean + half;
}

void RunGmmCell(const SweepConfig& config, const SweepCell& cell,
                CellResult& out) {
  auto schedule = std::make_shared<const Schedule>(config.MakeSchedule());
  auto target = std::make_shared<const GmmTarget>(MakeTarget(config.target));
  const OracleNoiseModel oracle(target, schedule);
  const TimedNoiseModel model(oracle);
  const SamplerConfig sampler = CellSampler(config, cell, schedule);
  const GdpConfig gdp = CellGdp(config, cell);
  const Matrix reference = target->Sample(
      config.reference_samples, CombineKeys(config.seed, kReferenceTag));

  std::vector<double> w1;
  std::vector<double> energy;
  std::vector<double> mass(target->num_components(), 0.0);
  StepTrace trace;
  std::int64_t samples = 0;
  Clock::duration sampling{};
  for (int r = 0; r < config.seeds; ++r) {
    const std::uint64_t seed = ReplicateSeed(config, cell, r);
    Matrix drawn;
    const auto start = Clock::now();
    if (cell.strategy == SweepStrategy::kGdp) {
      drawn.Reset(config.samples, target->dim());
      for (int i = 0; i < config.samples; ++i) {
        GdpResult g =
            GdpSample(model, sampler, gdp, {}, StreamKey(seed, kMemberTag, i));
        drawn.SetRow(i, g.action);
        trace.Merge(g.trace);
      }
    } else {
      SampleResult s = Sample(model, sampler, config.samples, {}, seed);
      drawn = std::move(s.samples);
      trace.Merge(s.trace);
    }
    sampling += Clock::now() - start;
    samples += config.samples;
    w1.push_back(SlicedW1(drawn, reference, config.projections, config.seed));
    energy.push_back(EnergyDistance(drawn, reference));
    const auto m = PerModeMass(drawn, *target);
    for (std::size_t k = 0; k < m.size(); ++k) mass[k] += m[k] / config.seeds;
  }
  MeanBand(w1, out.sliced_w1, out.sliced_w1_lo, out.sliced_w1_hi);
  out.energy_distance = Mean(energy);
  out.mode_mass = mass;
  out.clip_frequency = trace.clip_frequency();
  const double runs =
      cell.strategy == SweepStrategy::kGdp ? static_cast<double>(samples)
                                           : static_cast<double>(config.seeds);
  out.nfe_per_sample = trace.nfe / runs;
  out.model_rows_per_sample = static_cast<double>(trace.model_rows) / samples;
  SetTiming(model, trace, sampling, out);
}

void RunEnvCell(const SweepConfig& config, const SweepCell& cell,
                CheckpointCache& cache, CellResult& out) {
  auto schedule = std::make_shared<const Schedule>(config.MakeSchedule());
  const auto trained = cache.Get(config.CheckpointFor(cell.horizon));
  const TimedNoiseModel model(*trained);
  const GatedReachEnv env;
  PolicyConfig policy;
  policy.strategy = cell.strategy == SweepStrategy::kGdp ? Strategy::kGdp
                                                         : Strategy::kPlain;
  policy.sampler = CellSampler(config, cell, schedule);
  policy.gdp = CellGdp(config, cell);
  policy.h_obs = config.h_obs;
  policy.h_action = cell.horizon;
  policy.h_exec = config.h_exec > 0 ? config.h_exec
                                    : std::max(1, cell.horizon / 2);

  std::int64_t wins = 0;
  std::int64_t steps = 0;
  std::int64_t plans = 0;
  StepTrace trace;
  const auto start = Clock::now();
  for (int r = 0; r < config.seeds; ++r) {
    const RolloutResult res =
        PolicyRollout(env, model, policy, ReplicateSeed(config, cell, r));
    wins += res.success;
    steps += res.steps;
    plans += res.trace.steps.empty()
                 ? 0
                 : res.trace.steps.front().rows /
                       (policy.strategy == Strategy::kGdp
                            ? policy.gdp.population
                            : 1);
    trace.Merge(res.trace);
  }
  const auto sampling = Clock::now() - start;
  const Proportion p = WilsonInterval(wins, config.seeds);
  out.success_rate = p.mean;
  out.success_rate_lo = p.lo;
  out.success_rate_hi = p.hi;
  out.mean_episode_steps = static_cast<double>(steps) / config.seeds;
  out.clip_frequency = trace.clip_frequency();
  out.nfe_per_sample = plans > 0 ? static_cast<double>(trace.nfe) / plans : 0;
  out.model_rows_per_sample =
      plans > 0 ? static_cast<double>(trace.model_rows) / plans : 0;
  SetTiming(model, trace, sampling, out);
}

}  // namespace

const std::vector<std::string>& ResultColumns() {
  static const std::vector<std::string> kColumns = {
      "schema_version", "sweep", "run_hash", "cell_hash", "task",
      "strategy", "steps", "grid", "t_min", "t_max", "eta", "gamma",
      "horizon", "population", "survivors", "temperature", "fitness",
      "scaling", "selector", "final_pick", "weight_rule", "sigma_rule",
      "schedule", "diffusion_steps", "target", "target_dim",
      "target_variance", "samples", "reference_samples", "projections",
      "checkpoint", "h_obs", "h_exec", "seeds", "base_seed", "paired_seeds",
      "success_rate", "success_rate_lo", "success_rate_hi",
      "mean_episode_steps", "sliced_w1", "sliced_w1_lo", "sliced_w1_hi",
      "energy_distance", "mode_mass", "clip_frequency", "nfe_per_sample",
      "model_rows_per_sample", "wall_time_s", "time_per_nfe_us",
      "time_per_step_us", "timestamp", "error"};
  return kColumns;
}

std::shared_ptr<const MlpDenoiser> CheckpointCache::Get(
    const std::string& path) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = models_.find(path);
  if (it != models_.end()) return it->second;
  auto model = std::make_shared<const MlpDenoiser>(MlpDenoiser::Load(path));
  models_.emplace(path, model);
  return model;
}

std::uint64_t ReplicateSeed(const SweepConfig& config, const SweepCell& cell,
                            int replicate) {
  if (config.paired_seeds) {
    return config.seed + static_cast<std::uint64_t>(replicate);
  }
  return StreamKey(config.seed, cell.Hash(),
                   static_cast<std::uint64_t>(replicate));
}

CellResult RunCell(const SweepConfig& config, const SweepCell& cell,
                   CheckpointCache& cache) {
  CellResult out;
  out.cell = cell;
  out.replicates = config.seeds;
  const auto start = Clock::now();
  try {
    if (config.task == SweepTask::kGmm) {
      RunGmmCell(config, cell, out);
    } else {
      RunEnvCell(config, cell, cache, out);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.wall_time_s =
      std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

std::uint64_t RunHash(const SweepConfig& config, const SweepCell& cell) {
  const std::string key = fmt::format(
      "{}|task={};seed={};seeds={};paired={};schedule={}:{}:{:.17g}:{:.17g};"
      "sigma={};weights={};target={}:{}:{:.17g};samples={};reference={};"
      "projections={};checkpoint={};h_obs={};h_exec={}",
      cell.Key(), Name(config.task), config.seed, config.seeds,
      config.paired_seeds, config.schedule, config.diffusion_steps,
      config.beta_start, config.beta_end, Name(config.sigma_rule),
      Name(config.weight_rule), config.target.kind, config.target.dim,
      config.target.variance, config.samples, config.reference_samples,
      config.projections, config.CheckpointFor(cell.horizon), config.h_obs,
      config.h_exec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

std::string FormatResultRow(const SweepConfig& config,
                            const CellResult& r, std::string_view timestamp) {
  const SweepCell& c = r.cell;
  const bool ok = r.error.empty();
  const bool env = config.task == SweepTask::kEnv;
  auto num = [&](double v, bool show) {
    return show ? fmt::format("{:.10g}", v) : std::string();
  };
  std::string mass;
  for (double m : r.mode_mass) {
    mass += (mass.empty() ? "" : ";") + fmt::format("{:.6g}", m);
  }
  const std::vector<std::string> fields = {
      std::to_string(kResultsSchemaVersion),
      CsvField(config.name),
      fmt::format("{:016x}", RunHash(config, c)),
      fmt::format("{:016x}", c.Hash()),
      std::string(Name(config.task)),
      std::string(Name(c.strategy)),
      std::to_string(c.steps),
      std::string(Name(c.grid)),
      std::to_string(c.t_min),
      std::to_string(c.t_max),
      fmt::format("{:.10g}", c.strategy == SweepStrategy::kDdim ? 0.0 : c.eta),
      fmt::format("{:.10g}", c.gamma),
      std::to_string(c.horizon),
      std::to_string(c.population),
      std::to_string(c.effective_survivors()),
      fmt::format("{:.10g}", c.temperature),
      std::string(Name(c.fitness)),
      std::string(Name(c.scaling)),
      std::string(Name(c.selector)),
      std::string(Name(c.final_pick)),
      std::string(Name(config.weight_rule)),
      std::string(Name(config.sigma_rule)),
      CsvField(config.schedule),
      std::to_string(config.diffusion_steps),
      env ? std::string() : CsvField(config.target.kind),
      env ? std::string() : std::to_string(config.target.dim),
      env ? std::string() : fmt::format("{:.10g}", config.target.variance),
      env ? std::string() : std::to_string(config.samples),
      env ? std::string() : std::to_string(config.reference_samples),
      env ? std::string() : std::to_string(config.projections),
      env ? CsvField(config.CheckpointFor(c.horizon)) : std::string(),
      env ? std::to_string(config.h_obs) : std::string(),
      env ? std::to_string(config.h_exec > 0 ? config.h_exec
                                             : std::max(1, c.horizon / 2))
          : std::string(),
      std::to_string(config.seeds),
      std::to_string(config.seed),
      config.paired_seeds ? "1" : "0",
      num(r.success_rate, ok && env),
      num(r.success_rate_lo, ok && env),
      num(r.success_rate_hi, ok && env),
      num(r.mean_episode_steps, ok && env),
      num(r.sliced_w1, ok && !env),
      num(r.sliced_w1_lo, ok && !env),
      num(r.sliced_w1_hi, ok && !env),
      num(r.energy_distance, ok && !env),
      ok && !env ? mass : std::string(),
      num(r.clip_frequency, ok),
      num(r.nfe_per_sample, ok),
      num(r.model_rows_per_sample, ok),
      fmt::format("{:.6f}", r.wall_time_s),
      num(r.time_per_nfe_us, ok),
      num(r.time_per_step_us, ok),
      std::string(timestamp),
      CsvField(r.error)};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  return line;
}

SweepSummary RunSweep(const SweepConfig& config,
                      const SweepOptions& options) {
  const std::int64_t total = config.NumCells();
  if (total > config.max_cells && !options.confirmed) {
    throw std::invalid_argument(fmt::format(
        "sweep has {} cells (limit {}); confirm to run it", total,
        config.max_cells));
  }
  const std::vector<SweepCell> cells = config.Cells();

  // Rows already present from an earlier, interrupted run.
  std::set<std::string> done;
  const bool exists = std::filesystem::exists(config.output) &&
                      std::filesystem::file_size(config.output) > 0;
  if (exists) {
    const CsvTable table = ReadCsv(config.output);
    if (table.header != ResultColumns()) {
      throw std::runtime_error(fmt::format(
          "{} has a different results schema; refusing to append",
          config.output.string()));
    }
    const int hash_col = table.RequireColumn("run_hash");
    const int error_col = table.RequireColumn("error");
    for (const auto& row : table.rows) {
      if (row[error_col].empty()) done.insert(row[hash_col]);
    }
  }

  std::ofstream out(config.output, std::ios::app);
  if (!out) {
    throw std::runtime_error(
        fmt::format("cannot write {}", config.output.string()));
  }
  if (!exists) {
    const auto& cols = ResultColumns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i > 0 ? "," : "") << cols[i];
    }
    out << '\n';
  }

  SweepSummary summary;
  summary.cells = total;
  CheckpointCache cache;
  ThreadPool pool(std::max(1, config.threads));
  std::vector<std::future<CellResult>> pending;
  std::vector<bool> skip(cells.size(), false);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (done.count(fmt::format("{:016x}", RunHash(config, cells[i])))) {
      skip[i] = true;
      ++summary.skipped;
      pending.emplace_back();
      continue;
    }
    pending.push_back(pool.Submit(
        [&config, &cache, cell = cells[i]] {
          return RunCell(config, cell, cache);
        }));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (skip[i]) continue;
    const CellResult result = pending[i].get();
    if (!result.error.empty()) ++summary.failed;
    out << FormatResultRow(config, result, Timestamp()) << '\n';
    out.flush();
    if (options.log != nullptr) {
      fmt::print(*options.log, "[{}/{}] {}{}\n", i + 1, cells.size(),
                 cells[i].Key(),
                 result.error.empty() ? "" : " ERROR: " + result.error);
    }
  }
  return summary;
}

}  // namespace gdp
