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

// Command-line front end: train, sample, rollout, sweep, bench, plot,
// intrinsic-dim. Every verb takes --seed, --out and --config; for verbs other
// than sweep, --config names a YAML mapping of option names to values that
// the command line overrides.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <yaml-cpp/yaml.h>

#include "gdp/bench.h"
#include "gdp/errors.h"
#include "gdp/genetic.h"
#include "gdp/kernels/kernels.h"
#include "gdp/metrics.h"
#include "gdp/mlp.h"
#include "gdp/plot.h"
#include "gdp/rng.h"
#include "gdp/sampler.h"
#include "gdp/stats.h"
#include "gdp/sweep.h"
#include "gdp/sweep_config.h"
#include "gdp/target.h"
#include "gdp/toyenv.h"
#include "gdp/training.h"

namespace gdp {
namespace {

// Stream tag for per-sample GDP seeds.
constexpr std::uint64_t kSampleTag = 0x53414d504c45ULL;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Base random seed");
  app->add_option("--out", c.out, "Output path");
  app->add_option("--config", c.config, "YAML file of option values");
}

struct SamplerFlags {
  std::string strategy = "ddpm";
  int steps = 10;
  int t_min = 0;
  int t_max = -1;  // -1 means T
  std::string grid = "even";
  double gamma = 1.0;
  double eta = 1.0;
  bool no_clip = false;
  std::string sigma_rule = "conventional";
  int diffusion_steps = 100;
  int max_batch = 0;
  int population = 16;
  int survivors = 0;
  double temperature = 1.0;
  std::string fitness = "stein";
  std::string scaling = "identity";
  std::string selector = "multinomial";
  std::string final_pick = "first";
  std::string weight_rule = "softmax";
};

void AddSamplerFlags(CLI::App* app, SamplerFlags& f) {
  app->add_option("--strategy", f.strategy, "ddpm | ddim | gdp");
  app->add_option("--steps", f.steps, "Denoising steps delta");
  app->add_option("--t-min", f.t_min, "Smallest grid timestep");
  app->add_option("--t-max", f.t_max, "Largest grid timestep (default T)");
  app->add_option("--grid", f.grid, "even | evaluation");
  app->add_option("--gamma", f.gamma, "Injected noise scale");
  app->add_option("--eta", f.eta, "DDIM (0) to DDPM (1)");
  app->add_flag("--no-clip", f.no_clip, "Disable x0 clipping");
  app->add_option("--sigma-rule", f.sigma_rule, "conventional | literal");
  app->add_option("--diffusion-steps", f.diffusion_steps,
                  "Training horizon T of the cosine schedule");
  app->add_option("--max-batch", f.max_batch, "Rows per model call (0: all)");
  app->add_option("--population", f.population, "GDP population P");
  app->add_option("--survivors", f.survivors, "GDP survivors S (0: P/2)");
  app->add_option("--temperature", f.temperature, "Selection temperature");
  app->add_option("--fitness", f.fitness, "stein | clip");
  app->add_option("--scaling", f.scaling, "identity | square");
  app->add_option("--selector", f.selector, "multinomial | top_k");
  app->add_option("--final-pick", f.final_pick, "first | best");
  app->add_option("--weight-rule", f.weight_rule,
                  "softmax | scaled_softmax | normalized");
}

SweepCell CellFromFlags(const SamplerFlags& f, int t_max) {
  SweepCell c;
  c.strategy = ParseStrategy(f.strategy);
  c.steps = f.steps;
  c.t_min = f.t_min;
  c.t_max = t_max;
  c.grid = ParseGridKind(f.grid);
  c.gamma = f.gamma;
  c.eta = f.eta;
  c.population = f.population;
  c.survivors = f.survivors;
  c.temperature = f.temperature;
  c.fitness = ParseFitnessFamily(f.fitness);
  c.scaling = ParseFitnessScaling(f.scaling);
  c.selector = ParseSelectorKind(f.selector);
  c.final_pick = ParseFinalPick(f.final_pick);
  return c;
}

struct BuiltSampler {
  SweepCell cell;
  SamplerConfig sampler;
  GdpConfig gdp;
};

BuiltSampler BuildSampler(const SamplerFlags& f,
                          std::shared_ptr<const Schedule> schedule) {
  BuiltSampler b;
  b.cell = CellFromFlags(f, f.t_max < 0 ? schedule->num_steps() : f.t_max);
  b.sampler.schedule = schedule;
  b.sampler.grid = MakeCellGrid(*schedule, b.cell);
  b.sampler.gamma = f.gamma;
  b.sampler.eta = b.cell.strategy == SweepStrategy::kDdim ? 0.0 : f.eta;
  b.sampler.clip_enabled = !f.no_clip;
  b.sampler.sigma_rule = ParseSigmaRule(f.sigma_rule);
  b.sampler.max_batch = f.max_batch;
  b.sampler.Validate();
  b.gdp.population = b.cell.population;
  b.gdp.survivors = b.cell.effective_survivors();
  b.gdp.fitness.family = b.cell.fitness;
  b.gdp.fitness.scaling = b.cell.scaling;
  b.gdp.fitness.temperature = b.cell.temperature;
  b.gdp.fitness.weight_rule = ParseWeightRule(f.weight_rule);
  b.gdp.selector.kind = b.cell.selector;
  b.gdp.selector.final_pick = b.cell.final_pick;
  return b;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path));
  return out;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::string item = text.substr(
        begin, comma == std::string::npos ? std::string::npos : comma - begin);
    if (!item.empty()) out.push_back(std::stod(item));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  Common common;
  std::string task = "env";
  int epochs = 150;
  double lr = 1e-3;
  double weight_decay = 1e-6;
  int batch = 64;
  int diffusion_steps = 100;
  std::string hidden = "256,256,256";
  // env task
  int episodes = 200;
  int h_obs = 2;
  int h_action = 8;
  double expert_noise = 0.1;
  bool include_padded = false;
  std::string dataset_out;
  // gaussian task
  int samples = 4096;
  double mean = 0.2;
  double stddev = 0.15;
  std::string curve;
};

int RunTrain(const TrainFlags& f) {
  if (f.common.out.empty()) throw std::invalid_argument("train needs --out");
  const Schedule schedule = Schedule::Cosine(f.diffusion_steps);
  PairDataset data;
  MlpConfig mc;
  mc.hidden.clear();
  for (double h : ParseList(f.hidden)) mc.hidden.push_back(static_cast<int>(h));
  if (f.task == "env") {
    const GatedReachEnv env;
    DatasetConfig dc;
    dc.episodes = f.episodes;
    dc.h_obs = f.h_obs;
    dc.h_action = f.h_action;
    dc.noise_std = f.expert_noise;
    const EpisodeDataset ds = BuildDataset(env, dc, f.common.seed);
    if (!f.dataset_out.empty()) ds.Save(f.dataset_out);
    data = ds.TrainingPairs(f.include_padded);
    mc.action_dim = ActionDim(f.h_action);
    mc.obs_dim = ObservationDim(f.h_obs);
    fmt::print("dataset: {} episodes, {} windows ({} used)\n", ds.episodes,
               ds.size(), data.size());
  } else if (f.task == "gaussian") {
    data = GaussianDataset(f.samples, f.mean, f.stddev, f.common.seed);
    mc.action_dim = 1;
    mc.obs_dim = 0;
  } else {
    throw std::invalid_argument("--task must be env or gaussian");
  }
  MlpDenoiser model(mc, f.common.seed);
  TrainConfig tc;
  tc.epochs = f.epochs;
  tc.batch_size = f.batch;
  tc.optimizer.learning_rate = f.lr;
  tc.optimizer.weight_decay = f.weight_decay;
  tc.seed = f.common.seed;
  const auto curve = Train(model, schedule, data, tc, [](int e, double l) {
    if ((e + 1) % 10 == 0) fmt::print("epoch {:4d}  loss {:.6f}\n", e + 1, l);
  });
  model.Save(f.common.out);
  if (!f.curve.empty()) {
    auto out = OpenOut(f.curve);
    out << "epoch,loss\n";
    for (std::size_t e = 0; e < curve.size(); ++e) {
      fmt::print(out, "{},{:.10g}\n", e + 1, curve[e]);
    }
  }
  fmt::print("saved {} ({} parameters)\n", f.common.out,
             model.num_parameters());
  return 0;
}

// --------------------------------------------------------------- sample

struct SampleFlags {
  Common common;
  SamplerFlags sampler;
  std::string target = "three_mode";
  int dim = 2;
  double variance = 0.05;
  std::string checkpoint;
  std::string obs;
  int n = 1000;
  int reference = 10000;
  std::string trace;
  std::string history;
};

int RunSample(const SampleFlags& f) {
  auto schedule = std::make_shared<const Schedule>(
      Schedule::Cosine(f.sampler.diffusion_steps));
  const BuiltSampler b = BuildSampler(f.sampler, schedule);
  std::shared_ptr<const NoiseModel> model;
  std::shared_ptr<const GmmTarget> target;
  if (!f.checkpoint.empty()) {
    model = std::make_shared<const MlpDenoiser>(
        MlpDenoiser::Load(f.checkpoint));
  } else {
    target = std::make_shared<const GmmTarget>(
        MakeTarget({f.target, f.dim, f.variance}));
    model = std::make_shared<const OracleNoiseModel>(target, schedule);
  }
  const std::vector<double> obs = ParseList(f.obs);

  Matrix samples;
  StepTrace trace;
  std::vector<FitnessHistoryRow> history;
  if (b.cell.strategy == SweepStrategy::kGdp) {
    samples.Reset(f.n, model->action_dim());
    for (int i = 0; i < f.n; ++i) {
      GdpResult r = GdpSample(*model, b.sampler, b.gdp, obs,
                              StreamKey(f.common.seed, kSampleTag, i));
      samples.SetRow(i, r.action);
      trace.Merge(r.trace);
      for (auto& h : r.history) history.push_back(h);
    }
  } else {
    SampleResult r = Sample(*model, b.sampler, f.n, obs, f.common.seed);
    samples = std::move(r.samples);
    trace = std::move(r.trace);
  }

  std::string grid;
  for (int t : b.sampler.grid.indices) grid += fmt::format(" {}", t);
  fmt::print("grid:{}\nclip frequency: {:.6f}\nNFE: {}\n", grid,
             trace.clip_frequency(), trace.nfe);
  if (target) {
    const Matrix ref = target->Sample(f.reference, f.common.seed + 1);
    const DistanceReport d = CompareToTarget(samples, ref, *target);
    std::string mass;
    for (double m : d.per_mode_mass) mass += fmt::format(" {:.4f}", m);
    fmt::print("sliced W1: {:.6f}\nenergy distance: {:.6f}\nmode mass:{}\n",
               d.sliced_w1, d.energy_distance, mass);
  }
  if (!f.common.out.empty()) {
    auto out = OpenOut(f.common.out);
    for (int k = 0; k < samples.cols(); ++k) {
      out << (k > 0 ? "," : "") << "x" << k;
    }
    out << '\n';
    for (int i = 0; i < samples.rows(); ++i) {
      for (int k = 0; k < samples.cols(); ++k) {
        fmt::print(out, "{}{:.17g}", k > 0 ? "," : "", samples(i, k));
      }
      out << '\n';
    }
  }
  if (!f.trace.empty()) {
    auto out = OpenOut(f.trace);
    WriteTraceCsvHeader(out);
    WriteTraceCsv(out, fmt::format("seed{}", f.common.seed), trace);
  }
  if (!f.history.empty()) {
    auto out = OpenOut(f.history);
    WriteFitnessHistoryCsvHeader(out);
    WriteFitnessHistoryCsv(out, fmt::format("seed{}", f.common.seed),
                           history);
  }
  return 0;
}

// -------------------------------------------------------------- rollout

struct RolloutFlags {
  Common common;
  SamplerFlags sampler;
  std::string checkpoint;
  int h_obs = 2;
  int h_action = 8;
  int h_exec = 0;
  int seeds = 100;
  std::string svg;
};

int RunRollout(const RolloutFlags& f) {
  if (f.checkpoint.empty()) {
    throw std::invalid_argument("rollout needs --checkpoint");
  }
  auto schedule = std::make_shared<const Schedule>(
      Schedule::Cosine(f.sampler.diffusion_steps));
  const BuiltSampler b = BuildSampler(f.sampler, schedule);
  const MlpDenoiser model = MlpDenoiser::Load(f.checkpoint);
  const GatedReachEnv env;
  PolicyConfig pc;
  pc.strategy = b.cell.strategy == SweepStrategy::kGdp ? Strategy::kGdp
                                                       : Strategy::kPlain;
  pc.sampler = b.sampler;
  pc.gdp = b.gdp;
  pc.h_obs = f.h_obs;
  pc.h_action = f.h_action;
  pc.h_exec = f.h_exec > 0 ? f.h_exec : std::max(1, f.h_action / 2);

  std::optional<std::ofstream> out;
  if (!f.common.out.empty()) {
    out = OpenOut(f.common.out);
    *out << "seed,success,steps,gate,wall_violation,clip_frequency\n";
  }
  std::vector<std::vector<Vec2>> paths;
  std::vector<bool> outcomes;
  for (int s = 0; s < f.seeds; ++s) {
    const std::uint64_t seed = f.common.seed + static_cast<std::uint64_t>(s);
    const RolloutResult r = PolicyRollout(env, model, pc, seed);
    outcomes.push_back(r.success);
    paths.push_back(r.path);
    if (out) {
      fmt::print(*out, "{},{},{},{},{},{:.6f}\n", seed, r.success ? 1 : 0,
                 r.steps, r.gate, r.wall_violation ? 1 : 0,
                 r.trace.clip_frequency());
    }
  }
  const auto wins = std::count(outcomes.begin(), outcomes.end(), true);
  const Proportion p = WilsonInterval(wins, f.seeds);
  fmt::print("success rate {:.3f}  95% CI [{:.3f}, {:.3f}]  ({}/{})\n",
             p.mean, p.lo, p.hi, wins, f.seeds);
  if (!f.svg.empty()) {
    auto ok = std::make_unique<bool[]>(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) ok[i] = outcomes[i];
    WriteTrajectorySvg(f.svg, env, paths,
                       std::span<const bool>(ok.get(), outcomes.size()));
  }
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
  Common common;
  bool yes = false;
  int threads = -1;
};

int RunSweepVerb(const SweepFlags& f) {
  if (f.common.config.empty()) {
    throw std::invalid_argument("sweep needs --config");
  }
  SweepConfig config = LoadSweepConfig(f.common.config);
  if (!f.common.out.empty()) config.output = f.common.out;
  if (f.threads >= 0) config.threads = f.threads;
  const std::int64_t cells = config.NumCells();
  fmt::print("sweep '{}': {} cells x {} seeds -> {}\n", config.name, cells,
             config.seeds, config.output.string());
  if (cells > config.max_cells && !f.yes) {
    fmt::print(std::cerr,
               "refusing to run {} cells (max_cells {}); pass --yes to "
               "confirm\n",
               cells, config.max_cells);
    return 2;
  }
  SweepOptions options;
  options.confirmed = f.yes;
  options.log = &std::cout;
  const SweepSummary s = RunSweep(config, options);
  fmt::print("done: {} cells, {} skipped, {} failed\n", s.cells, s.skipped,
             s.failed);
  return s.failed > 0 ? 1 : 0;
}

// ---------------------------------------------------------------- bench

struct BenchFlags {
  Common common;
  SamplerFlags sampler;
  std::string model = "mlp";
  std::string checkpoint;
  std::string populations = "1,2,4,8,16,32";
  int warmups = 10;
  int reps = 30;
  int h_action = 8;
  int h_obs = 2;
};

int RunBench(const BenchFlags& f) {
  auto schedule = std::make_shared<const Schedule>(
      Schedule::Cosine(f.sampler.diffusion_steps));
  const BuiltSampler b = BuildSampler(f.sampler, schedule);
  std::shared_ptr<const NoiseModel> model;
  if (f.model == "zero") {
    model = std::make_shared<const ZeroNoiseModel>(ActionDim(f.h_action));
  } else if (f.model == "oracle") {
    model = std::make_shared<const OracleNoiseModel>(
        std::make_shared<const GmmTarget>(GmmTarget::ThreeMode()), schedule);
  } else if (f.model == "mlp") {
    if (!f.checkpoint.empty()) {
      model = std::make_shared<const MlpDenoiser>(
          MlpDenoiser::Load(f.checkpoint));
    } else {
      MlpConfig mc;
      mc.action_dim = ActionDim(f.h_action);
      mc.obs_dim = ObservationDim(f.h_obs);
      model = std::make_shared<const MlpDenoiser>(mc, f.common.seed);
    }
  } else {
    throw std::invalid_argument("--model must be zero, oracle or mlp");
  }
  BenchConfig bc;
  bc.populations.clear();
  for (double p : ParseList(f.populations)) {
    bc.populations.push_back(static_cast<int>(p));
  }
  bc.warmups = f.warmups;
  bc.repetitions = f.reps;
  bc.fitness = b.gdp.fitness;
  bc.selector = b.gdp.selector.kind;
  bc.seed = f.common.seed;
  const auto rows = BenchOverhead(*model, b.sampler, bc);
  fmt::print("kernels: {}\n", kernels::IsaName(kernels::ActiveIsa()));
  WriteBenchCsv(std::cout, rows);
  if (!f.common.out.empty()) {
    auto out = OpenOut(f.common.out);
    WriteBenchCsv(out, rows);
  }
  return 0;
}

// ----------------------------------------------------------------- plot

struct PlotFlags {
  Common common;
  std::string in;
  PlotSpec spec;
};

int RunPlot(const PlotFlags& f) {
  if (f.in.empty() || f.common.out.empty()) {
    throw std::invalid_argument("plot needs --in and --out");
  }
  PlotResults(f.in, f.spec, f.common.out);
  fmt::print("wrote {}\n", f.common.out);
  return 0;
}

// -------------------------------------------------------- intrinsic-dim

struct DimFlags {
  Common common;
  int k = 2;
  int d = 10;
  double scale = 0.5;
  std::string checkpoint;
  std::string obs;
  int t_probe = 0;  // 0 means the default
  int probes = 0;   // 0 means 10 d
  double tol = kDefaultDimensionTolerance;
  int diffusion_steps = 100;
};

int RunIntrinsicDim(const DimFlags& f) {
  auto schedule = std::make_shared<const Schedule>(
      Schedule::Cosine(f.diffusion_steps));
  std::shared_ptr<const NoiseModel> model;
  std::vector<double> x0;
  if (!f.checkpoint.empty()) {
    model = std::make_shared<const MlpDenoiser>(
        MlpDenoiser::Load(f.checkpoint));
    x0.assign(model->action_dim(), 0.0);
  } else {
    auto target = std::make_shared<const GmmTarget>(
        GmmTarget::Subspace(f.k, f.d, f.scale, f.common.seed));
    model = std::make_shared<const OracleNoiseModel>(target, schedule);
    const Matrix draw = target->Sample(1, f.common.seed);
    x0.assign(draw.row(0).begin(), draw.row(0).end());
  }
  const int t = f.t_probe > 0 ? f.t_probe : DefaultProbeStep(*schedule);
  const int probes = f.probes > 0 ? f.probes : 10 * model->action_dim();
  const auto r = IntrinsicDimension(*model, x0, *schedule, t, probes, f.tol,
                                    f.common.seed, ParseList(f.obs));
  fmt::print("t_probe {}  probes {}  tol {}\n", t, probes, f.tol);
  std::string sv;
  for (double v : r.singular_values) sv += fmt::format(" {:.4g}", v);
  fmt::print("singular values:{}\n", sv);
  fmt::print("intrinsic dimension {} (codimension {})\n", r.dimension,
             r.codimension);
  return 0;
}

// Turns a YAML mapping into "--key value" arguments.
std::vector<std::string> ConfigArgs(const std::string& path) {
  const YAML::Node root = YAML::LoadFile(path);
  if (!root.IsMap()) {
    throw std::invalid_argument(
        fmt::format("{}: expected a mapping of option names", path));
  }
  std::vector<std::string> args;
  for (const auto& kv : root) {
    const std::string key = "--" + kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (v.IsSequence()) {
      std::string joined;
      for (const auto& item : v) {
        joined += (joined.empty() ? "" : ",") + item.as<std::string>();
      }
      args.insert(args.end(), {key, joined});
    } else if (v.as<std::string>() == "true") {
      args.push_back(key);
    } else if (v.as<std::string>() != "false") {
      args.insert(args.end(), {key, v.as<std::string>()});
    }
  }
  return args;
}

}  // namespace
}  // namespace gdp

int main(int argc, char** argv) {
  CLI::App app{"Genetic diffusion policy experiments", "gdp"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  gdp::TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train an MLP denoiser");
  gdp::AddCommon(train_cmd, train.common);
  train_cmd->add_option("--task", train.task, "env | gaussian");
  train_cmd->add_option("--epochs", train.epochs);
  train_cmd->add_option("--lr", train.lr);
  train_cmd->add_option("--weight-decay", train.weight_decay);
  train_cmd->add_option("--batch", train.batch);
  train_cmd->add_option("--diffusion-steps", train.diffusion_steps);
  train_cmd->add_option("--hidden", train.hidden, "Comma-separated widths");
  train_cmd->add_option("--episodes", train.episodes);
  train_cmd->add_option("--h-obs", train.h_obs);
  train_cmd->add_option("--h-action", train.h_action);
  train_cmd->add_option("--expert-noise", train.expert_noise);
  train_cmd->add_flag("--include-padded", train.include_padded);
  train_cmd->add_option("--dataset-out", train.dataset_out);
  train_cmd->add_option("--samples", train.samples);
  train_cmd->add_option("--mean", train.mean);
  train_cmd->add_option("--stddev", train.stddev);
  train_cmd->add_option("--curve", train.curve, "Per-epoch loss CSV");

  gdp::SampleFlags sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw samples");
  gdp::AddCommon(sample_cmd, sample.common);
  gdp::AddSamplerFlags(sample_cmd, sample.sampler);
  sample_cmd->add_option("--target", sample.target, "three_mode | boundary");
  sample_cmd->add_option("--dim", sample.dim);
  sample_cmd->add_option("--variance", sample.variance);
  sample_cmd->add_option("--checkpoint", sample.checkpoint);
  sample_cmd->add_option("--obs", sample.obs, "Comma-separated observation");
  sample_cmd->add_option("--n", sample.n);
  sample_cmd->add_option("--reference", sample.reference);
  sample_cmd->add_option("--trace", sample.trace, "Step trace CSV");
  sample_cmd->add_option("--history", sample.history, "Fitness history CSV");

  gdp::RolloutFlags rollout;
  auto* rollout_cmd =
      app.add_subcommand("rollout", "Closed-loop episodes in the toy env");
  gdp::AddCommon(rollout_cmd, rollout.common);
  gdp::AddSamplerFlags(rollout_cmd, rollout.sampler);
  rollout_cmd->add_option("--checkpoint", rollout.checkpoint);
  rollout_cmd->add_option("--h-obs", rollout.h_obs);
  rollout_cmd->add_option("--h-action", rollout.h_action);
  rollout_cmd->add_option("--h-exec", rollout.h_exec, "0: h_action / 2");
  rollout_cmd->add_option("--seeds", rollout.seeds);
  rollout_cmd->add_option("--svg", rollout.svg, "Trajectory overlay");

  gdp::SweepFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a sweep config");
  gdp::AddCommon(sweep_cmd, sweep.common);
  sweep_cmd->add_flag("--yes", sweep.yes, "Confirm a large sweep");
  sweep_cmd->add_option("--threads", sweep.threads);

  gdp::BenchFlags bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "Population overhead per step");
  gdp::AddCommon(bench_cmd, bench.common);
  gdp::AddSamplerFlags(bench_cmd, bench.sampler);
  bench_cmd->add_option("--model", bench.model, "zero | oracle | mlp");
  bench_cmd->add_option("--checkpoint", bench.checkpoint);
  bench_cmd->add_option("--populations", bench.populations);
  bench_cmd->add_option("--warmups", bench.warmups);
  bench_cmd->add_option("--reps", bench.reps);
  bench_cmd->add_option("--h-action", bench.h_action);
  bench_cmd->add_option("--h-obs", bench.h_obs);

  gdp::PlotFlags plot;
  auto* plot_cmd = app.add_subcommand("plot", "Chart a results file");
  gdp::AddCommon(plot_cmd, plot.common);
  plot_cmd->add_option("--in", plot.in, "Results CSV");
  plot_cmd->add_option("--x", plot.spec.x)->required();
  plot_cmd->add_option("--y", plot.spec.y)->required();
  plot_cmd->add_option("--group", plot.spec.group_by);
  plot_cmd->add_option("--title", plot.spec.title);

  gdp::DimFlags dim;
  auto* dim_cmd = app.add_subcommand(
      "intrinsic-dim", "Estimate intrinsic dimension from a noise model");
  gdp::AddCommon(dim_cmd, dim.common);
  dim_cmd->add_option("--k", dim.k, "Subspace dimension of the oracle");
  dim_cmd->add_option("--d", dim.d, "Ambient dimension of the oracle");
  dim_cmd->add_option("--scale", dim.scale);
  dim_cmd->add_option("--checkpoint", dim.checkpoint);
  dim_cmd->add_option("--obs", dim.obs);
  dim_cmd->add_option("--t-probe", dim.t_probe);
  dim_cmd->add_option("--probes", dim.probes);
  dim_cmd->add_option("--tol", dim.tol);
  dim_cmd->add_option("--diffusion-steps", dim.diffusion_steps);

  // Splice option values from --config ahead of the command line.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (!args.empty() && args[0] != "sweep") {
      for (std::size_t i = 1; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
          const auto extra = gdp::ConfigArgs(args[i + 1]);
          args.insert(args.begin() + 1, extra.begin(), extra.end());
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_cmd) return gdp::RunTrain(train);
    if (*sample_cmd) return gdp::RunSample(sample);
    if (*rollout_cmd) return gdp::RunRollout(rollout);
    if (*sweep_cmd) return gdp::RunSweepVerb(sweep);
    if (*bench_cmd) return gdp::RunBench(bench);
    if (*plot_cmd) return gdp::RunPlot(plot);
    if (*dim_cmd) return gdp::RunIntrinsicDim(dim);
  } catch (const gdp::TrainingError& e) {
    fmt::print(std::cerr, "error: {} (epoch {}, batch {})\n", e.what(),
               e.epoch(), e.batch());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
