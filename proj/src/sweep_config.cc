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

#include "gdp/sweep_config.h"

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "gdp/rng.h"

namespace gdp {
namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<SweepTask, 2> kTasks = {
    {{SweepTask::kGmm, "gmm"}, {SweepTask::kEnv, "env"}}};
constexpr NameTable<SweepStrategy, 3> kStrategies = {
    {{SweepStrategy::kDdpm, "ddpm"},
     {SweepStrategy::kDdim, "ddim"},
     {SweepStrategy::kGdp, "gdp"}}};
constexpr NameTable<GridKind, 2> kGrids = {
    {{GridKind::kEven, "even"}, {GridKind::kEvaluation, "evaluation"}}};
constexpr NameTable<FitnessFamily, 2> kFamilies = {
    {{FitnessFamily::kStein, "stein"}, {FitnessFamily::kClip, "clip"}}};
constexpr NameTable<FitnessScaling, 2> kScalings = {
    {{FitnessScaling::kIdentity, "identity"},
     {FitnessScaling::kSquare, "square"}}};
constexpr NameTable<SelectorKind, 2> kSelectors = {
    {{SelectorKind::kMultinomial, "multinomial"},
     {SelectorKind::kTopK, "top_k"}}};
constexpr NameTable<FinalPick, 2> kPicks = {
    {{FinalPick::kFirst, "first"}, {FinalPick::kBest, "best"}}};
constexpr NameTable<WeightRule, 3> kWeightRules = {
    {{WeightRule::kSoftmax, "softmax"},
     {WeightRule::kScaledSoftmax, "scaled_softmax"},
     {WeightRule::kNormalized, "normalized"}}};
constexpr NameTable<SigmaRule, 2> kSigmaRules = {
    {{SigmaRule::kConventional, "conventional"},
     {SigmaRule::kLiteral, "literal"}}};

template <typename E, std::size_t N>
std::string_view Lookup(const NameTable<E, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
E Parse(const NameTable<E, N>& table, std::string_view s,
        std::string_view what) {
  std::string accepted;
  for (const auto& [e, name] : table) {
    if (name == s) return e;
    accepted += accepted.empty() ? "" : ", ";
    accepted += name;
  }
  throw std::invalid_argument(
      fmt::format("unknown {} '{}' (expected one of: {})", what, s, accepted));
}

// Reads a scalar or a sequence of scalars.
template <typename T, typename Convert>
std::vector<T> ReadList(const YAML::Node& node, Convert convert) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(convert(item));
  } else {
    out.push_back(convert(node));
  }
  if (out.empty()) throw std::invalid_argument("sweep axis is empty");
  return out;
}

template <typename E, std::size_t N>
std::vector<E> ReadEnumList(const YAML::Node& node,
                            const NameTable<E, N>& table,
                            std::string_view what) {
  return ReadList<E>(node, [&](const YAML::Node& n) {
    return Parse(table, n.as<std::string>(), what);
  });
}

void CheckKeys(const YAML::Node& node, const std::set<std::string>& allowed,
               std::string_view section) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw std::invalid_argument(fmt::format(
          "unknown key '{}' in {} (allowed: {})", key, section, list));
    }
  }
}

}  // namespace

std::string_view Name(SweepTask v) { return Lookup(kTasks, v); }
std::string_view Name(SweepStrategy v) { return Lookup(kStrategies, v); }
std::string_view Name(GridKind v) { return Lookup(kGrids, v); }
std::string_view Name(FitnessFamily v) { return Lookup(kFamilies, v); }
std::string_view Name(FitnessScaling v) { return Lookup(kScalings, v); }
std::string_view Name(SelectorKind v) { return Lookup(kSelectors, v); }
std::string_view Name(FinalPick v) { return Lookup(kPicks, v); }
std::string_view Name(WeightRule v) { return Lookup(kWeightRules, v); }
std::string_view Name(SigmaRule v) { return Lookup(kSigmaRules, v); }

SweepStrategy ParseStrategy(std::string_view s) {
  return Parse(kStrategies, s, "strategy");
}
GridKind ParseGridKind(std::string_view s) { return Parse(kGrids, s, "grid"); }
FitnessFamily ParseFitnessFamily(std::string_view s) {
  return Parse(kFamilies, s, "fitness family");
}
FitnessScaling ParseFitnessScaling(std::string_view s) {
  return Parse(kScalings, s, "fitness scaling");
}
SelectorKind ParseSelectorKind(std::string_view s) {
  return Parse(kSelectors, s, "selector");
}
FinalPick ParseFinalPick(std::string_view s) {
  return Parse(kPicks, s, "final pick");
}
WeightRule ParseWeightRule(std::string_view s) {
  return Parse(kWeightRules, s, "weight rule");
}
SigmaRule ParseSigmaRule(std::string_view s) {
  return Parse(kSigmaRules, s, "sigma rule");
}

std::string SweepCell::Key() const {
  return fmt::format(
      "strategy={};steps={};gamma={:.17g};eta={:.17g};horizon={};"
      "population={};survivors={};temperature={:.17g};fitness={};"
      "scaling={};selector={};final_pick={};t_min={};t_max={};grid={}",
      Name(strategy), steps, gamma, eta, horizon, population, survivors,
      temperature, Name(fitness), Name(scaling), Name(selector),
      Name(final_pick), t_min, t_max, Name(grid));
}

std::uint64_t SweepCell::Hash() const {
  // FNV-1a, then a finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : Key()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

GmmTarget MakeTarget(const TargetSpec& spec) {
  if (spec.kind == "three_mode") return GmmTarget::ThreeMode();
  if (spec.kind == "boundary") {
    return GmmTarget::BoundaryCorners(spec.dim, spec.variance);
  }
  throw std::invalid_argument(fmt::format(
      "unknown target '{}' (expected three_mode or boundary)", spec.kind));
}

std::int64_t SweepConfig::NumCells() const {
  const SweepAxes& a = axes;
  std::int64_t n = 1;
  for (std::size_t size :
       {a.strategy.size(), a.steps.size(), a.gamma.size(), a.eta.size(),
        a.horizon.size(), a.population.size(), a.survivors.size(),
        a.temperature.size(), a.fitness.size(), a.scaling.size(),
        a.selector.size(), a.final_pick.size(), a.t_min.size(),
        a.t_max.size(), a.grid.size()}) {
    n *= static_cast<std::int64_t>(size);
  }
  return n;
}

std::vector<SweepCell> SweepConfig::Cells() const {
  const SweepAxes& a = axes;
  std::vector<SweepCell> cells;
  SweepCell c;
  for (auto strategy : a.strategy)
  for (int steps : a.steps)
  for (double gamma : a.gamma)
  for (double eta : a.eta)
  for (int horizon : a.horizon)
  for (int population : a.population)
  for (int survivors : a.survivors)
  for (double temperature : a.temperature)
  for (auto fitness : a.fitness)
  for (auto scaling : a.scaling)
  for (auto selector : a.selector)
  for (auto final_pick : a.final_pick)
  for (int t_min : a.t_min)
  for (int t_max : a.t_max)
  for (auto grid : a.grid) {
    c.strategy = strategy;
    c.steps = steps;
    c.gamma = gamma;
    c.eta = eta;
    c.horizon = horizon;
    c.population = population;
    c.survivors = survivors;
    c.temperature = temperature;
    c.fitness = fitness;
    c.scaling = scaling;
    c.selector = selector;
    c.final_pick = final_pick;
    c.t_min = t_min;
    c.t_max = t_max;
    c.grid = grid;
    cells.push_back(c);
  }
  return cells;
}

Schedule SweepConfig::MakeSchedule() const {
  if (schedule == "cosine") return Schedule::Cosine(diffusion_steps);
  if (schedule == "linear") {
    return Schedule::Linear(diffusion_steps, beta_start, beta_end);
  }
  throw std::invalid_argument(fmt::format(
      "unknown schedule '{}' (expected cosine or linear)", schedule));
}

std::string SweepConfig::CheckpointFor(int horizon) const {
  std::string path = checkpoint;
  const std::string token = "{horizon}";
  for (auto pos = path.find(token); pos != std::string::npos;
       pos = path.find(token)) {
    path.replace(pos, token.size(), std::to_string(horizon));
  }
  return path;
}

TimeGrid MakeCellGrid(const Schedule& schedule, const SweepCell& cell) {
  if (cell.grid == GridKind::kEvaluation) {
    return MakeEvaluationGrid(schedule, cell.steps, cell.t_min, cell.t_max);
  }
  return MakeGrid(schedule, cell.steps, cell.t_min, cell.t_max);
}

SweepConfig ParseSweepConfig(std::string_view yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(fmt::format("sweep config: {}", e.what()));
  }
  if (!root.IsMap()) {
    throw std::invalid_argument("sweep config: top level must be a mapping");
  }
  CheckKeys(root,
            {"name", "task", "seed", "seeds", "paired_seeds", "output",
             "threads", "max_cells", "schedule", "sigma_rule", "weight_rule",
             "target", "samples", "reference_samples", "projections", "env",
             "axes"},
            "sweep config");
  SweepConfig c;
  try {
    if (root["name"]) c.name = root["name"].as<std::string>();
    if (root["task"]) {
      c.task = Parse(kTasks, root["task"].as<std::string>(), "task");
    }
    if (root["seed"]) c.seed = root["seed"].as<std::uint64_t>();
    if (root["seeds"]) c.seeds = root["seeds"].as<int>();
    if (root["paired_seeds"]) c.paired_seeds = root["paired_seeds"].as<bool>();
    if (root["output"]) c.output = root["output"].as<std::string>();
    if (root["threads"]) c.threads = root["threads"].as<int>();
    if (root["max_cells"]) c.max_cells = root["max_cells"].as<std::int64_t>();
    if (root["sigma_rule"]) {
      c.sigma_rule = ParseSigmaRule(root["sigma_rule"].as<std::string>());
    }
    if (root["weight_rule"]) {
      c.weight_rule = ParseWeightRule(root["weight_rule"].as<std::string>());
    }
    if (const auto s = root["schedule"]) {
      CheckKeys(s, {"kind", "steps", "beta_start", "beta_end"}, "schedule");
      if (s["kind"]) c.schedule = s["kind"].as<std::string>();
      if (s["steps"]) c.diffusion_steps = s["steps"].as<int>();
      if (s["beta_start"]) c.beta_start = s["beta_start"].as<double>();
      if (s["beta_end"]) c.beta_end = s["beta_end"].as<double>();
    }
    if (const auto t = root["target"]) {
      CheckKeys(t, {"kind", "dim", "variance"}, "target");
      if (t["kind"]) c.target.kind = t["kind"].as<std::string>();
      if (t["dim"]) c.target.dim = t["dim"].as<int>();
      if (t["variance"]) c.target.variance = t["variance"].as<double>();
    }
    if (root["samples"]) c.samples = root["samples"].as<int>();
    if (root["reference_samples"]) {
      c.reference_samples = root["reference_samples"].as<int>();
    }
    if (root["projections"]) c.projections = root["projections"].as<int>();
    if (const auto e = root["env"]) {
      CheckKeys(e, {"checkpoint", "h_obs", "h_exec"}, "env");
      if (e["checkpoint"]) c.checkpoint = e["checkpoint"].as<std::string>();
      if (e["h_obs"]) c.h_obs = e["h_obs"].as<int>();
      if (e["h_exec"]) c.h_exec = e["h_exec"].as<int>();
    }
    if (const auto a = root["axes"]) {
      CheckKeys(a,
                {"strategy", "steps", "gamma", "eta", "horizon", "population",
                 "survivors", "temperature", "fitness", "scaling", "selector",
                 "final_pick", "t_min", "t_max", "grid"},
                "axes");
      auto ints = [](const YAML::Node& n) { return n.as<int>(); };
      auto reals = [](const YAML::Node& n) { return n.as<double>(); };
      SweepAxes& x = c.axes;
      if (a["strategy"]) {
        x.strategy = ReadEnumList(a["strategy"], kStrategies, "strategy");
      }
      if (a["steps"]) x.steps = ReadList<int>(a["steps"], ints);
      if (a["gamma"]) x.gamma = ReadList<double>(a["gamma"], reals);
      if (a["eta"]) x.eta = ReadList<double>(a["eta"], reals);
      if (a["horizon"]) x.horizon = ReadList<int>(a["horizon"], ints);
      if (a["population"]) {
        x.population = ReadList<int>(a["population"], ints);
      }
      if (a["survivors"]) x.survivors = ReadList<int>(a["survivors"], ints);
      if (a["temperature"]) {
        x.temperature = ReadList<double>(a["temperature"], reals);
      }
      if (a["fitness"]) {
        x.fitness = ReadEnumList(a["fitness"], kFamilies, "fitness family");
      }
      if (a["scaling"]) {
        x.scaling = ReadEnumList(a["scaling"], kScalings, "fitness scaling");
      }
      if (a["selector"]) {
        x.selector = ReadEnumList(a["selector"], kSelectors, "selector");
      }
      if (a["final_pick"]) {
        x.final_pick = ReadEnumList(a["final_pick"], kPicks, "final pick");
      }
      if (a["t_min"]) x.t_min = ReadList<int>(a["t_min"], ints);
      if (a["t_max"]) x.t_max = ReadList<int>(a["t_max"], ints);
      if (a["grid"]) x.grid = ReadEnumList(a["grid"], kGrids, "grid");
    }
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(fmt::format("sweep config: {}", e.what()));
  }
  if (c.seeds < 1) throw std::invalid_argument("sweep config: seeds < 1");
  if (c.samples < 1 || c.reference_samples < 2) {
    throw std::invalid_argument("sweep config: too few samples");
  }
  if (c.threads < 0) throw std::invalid_argument("sweep config: threads < 0");
  c.MakeSchedule();
  return c;
}

SweepConfig LoadSweepConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument(
        fmt::format("cannot read sweep config {}", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSweepConfig(buffer.str());
}

}  // namespace gdp
