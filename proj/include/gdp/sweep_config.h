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

#ifndef GDP_SWEEP_CONFIG_H_
#define GDP_SWEEP_CONFIG_H_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gdp/genetic.h"
#include "gdp/schedule.h"
#include "gdp/target.h"

namespace gdp {

enum class SweepTask { kGmm, kEnv };
// ddpm: stochastic steps with the eta/gamma axes; ddim: eta forced to 0;
// gdp: population sampling.
enum class SweepStrategy { kDdpm, kDdim, kGdp };
// even: delta + 1 points from t_min to t_max. evaluation: the model is
// evaluated at delta points from t_min to t_max and the last step lands on 0.
enum class GridKind { kEven, kEvaluation };

std::string_view Name(SweepTask v);
std::string_view Name(SweepStrategy v);
std::string_view Name(GridKind v);
std::string_view Name(FitnessFamily v);
std::string_view Name(FitnessScaling v);
std::string_view Name(SelectorKind v);
std::string_view Name(FinalPick v);
std::string_view Name(WeightRule v);
std::string_view Name(SigmaRule v);

// Parsers throw std::invalid_argument listing the accepted names.
SweepStrategy ParseStrategy(std::string_view s);
GridKind ParseGridKind(std::string_view s);
FitnessFamily ParseFitnessFamily(std::string_view s);
FitnessScaling ParseFitnessScaling(std::string_view s);
SelectorKind ParseSelectorKind(std::string_view s);
FinalPick ParseFinalPick(std::string_view s);
WeightRule ParseWeightRule(std::string_view s);
SigmaRule ParseSigmaRule(std::string_view s);

// One point of the sweep grid.
struct SweepCell {
  SweepStrategy strategy = SweepStrategy::kDdpm;
  int steps = 10;
  double gamma = 1.0;
  double eta = 1.0;
  int horizon = 8;
  int population = 16;
  int survivors = 0;  // 0 means population / 2
  double temperature = 1.0;
  FitnessFamily fitness = FitnessFamily::kStein;
  FitnessScaling scaling = FitnessScaling::kIdentity;
  SelectorKind selector = SelectorKind::kMultinomial;
  FinalPick final_pick = FinalPick::kFirst;
  int t_min = 0;
  int t_max = 100;
  GridKind grid = GridKind::kEven;

  int effective_survivors() const {
    return survivors > 0 ? survivors : std::max(1, population / 2);
  }
  // Canonical text of every field; the cell hash is taken over it.
  std::string Key() const;
  std::uint64_t Hash() const;
};

struct SweepAxes {
  std::vector<SweepStrategy> strategy = {SweepStrategy::kDdpm};
  std::vector<int> steps = {10};
  std::vector<double> gamma = {1.0};
  std::vector<double> eta = {1.0};
  std::vector<int> horizon = {8};
  std::vector<int> population = {16};
  std::vector<int> survivors = {0};
  std::vector<double> temperature = {1.0};
  std::vector<FitnessFamily> fitness = {FitnessFamily::kStein};
  std::vector<FitnessScaling> scaling = {FitnessScaling::kIdentity};
  std::vector<SelectorKind> selector = {SelectorKind::kMultinomial};
  std::vector<FinalPick> final_pick = {FinalPick::kFirst};
  std::vector<int> t_min = {0};
  std::vector<int> t_max = {100};
  std::vector<GridKind> grid = {GridKind::kEven};
};

struct TargetSpec {
  std::string kind = "three_mode";  // three_mode | boundary
  int dim = 2;                      // boundary only
  double variance = 0.05;           // boundary only
};

GmmTarget MakeTarget(const TargetSpec& spec);

struct SweepConfig {
  std::string name = "sweep";
  SweepTask task = SweepTask::kGmm;
  std::uint64_t seed = 0;
  int seeds = 10;
  // Use seed + r for replicate r in every cell, pairing cells on the same
  // episodes. Otherwise replicate seeds also mix in the cell hash.
  bool paired_seeds = false;
  std::filesystem::path output = "results.csv";
  int threads = 1;
  // Product sizes above this need explicit confirmation.
  std::int64_t max_cells = 1000;

  std::string schedule = "cosine";  // cosine | linear
  int diffusion_steps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  SigmaRule sigma_rule = SigmaRule::kConventional;
  WeightRule weight_rule = WeightRule::kSoftmax;

  // Gaussian-mixture task.
  TargetSpec target;
  int samples = 1000;
  int reference_samples = 10000;
  int projections = 128;

  // Environment task. "{horizon}" in the path is replaced by h_A.
  std::string checkpoint = "toy_h{horizon}.ckpt";
  int h_obs = 2;
  int h_exec = 0;  // 0 means h_A / 2

  SweepAxes axes;

  std::int64_t NumCells() const;
  // Cartesian product of the axes in a fixed order.
  std::vector<SweepCell> Cells() const;
  Schedule MakeSchedule() const;
  std::string CheckpointFor(int horizon) const;
};

// Throws std::invalid_argument on unknown keys or bad values.
SweepConfig ParseSweepConfig(std::string_view yaml);
SweepConfig LoadSweepConfig(const std::filesystem::path& path);

TimeGrid MakeCellGrid(const Schedule& schedule, const SweepCell& cell);

}  // namespace gdp

#endif  // GDP_SWEEP_CONFIG_H_
