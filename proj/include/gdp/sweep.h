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

#ifndef GDP_SWEEP_H_
#define GDP_SWEEP_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "gdp/mlp.h"
#include "gdp/sweep_config.h"

namespace gdp {

inline constexpr int kResultsSchemaVersion = 1;

// Column names of the results file, in order.
const std::vector<std::string>& ResultColumns();

struct CellResult {
  SweepCell cell;
  int replicates = 0;
  // Environment task.
  double success_rate = 0.0;
  double success_rate_lo = 0.0;
  double success_rate_hi = 0.0;
  double mean_episode_steps = 0.0;
  // Mixture task: means over replicates with normal 95% bands.
  double sliced_w1 = 0.0;
  double sliced_w1_lo = 0.0;
  double sliced_w1_hi = 0.0;
  double energy_distance = 0.0;
  std::vector<double> mode_mass;
  // Both tasks.
  double clip_frequency = 0.0;
  double nfe_per_sample = 0.0;
  double model_rows_per_sample = 0.0;
  double wall_time_s = 0.0;
  double time_per_nfe_us = 0.0;
  double time_per_step_us = 0.0;
  std::string error;
};

// Loads each checkpoint once; safe to share between cells.
class CheckpointCache {
 public:
  std::shared_ptr<const MlpDenoiser> Get(const std::string& path);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const MlpDenoiser>> models_;
};

// Seed of replicate r of a cell.
std::uint64_t ReplicateSeed(const SweepConfig& config, const SweepCell& cell,
                            int replicate);

// Runs every replicate of one cell. Errors are caught into result.error.
CellResult RunCell(const SweepConfig& config, const SweepCell& cell,
                   CheckpointCache& cache);

// Identifies a finished row for resumption: the cell and every sweep-level
// setting that changes its numbers.
std::uint64_t RunHash(const SweepConfig& config, const SweepCell& cell);

std::string FormatResultRow(const SweepConfig& config,
                            const CellResult& result,
                            std::string_view timestamp);

struct SweepSummary {
  std::int64_t cells = 0;
  std::int64_t skipped = 0;
  std::int64_t failed = 0;
};

struct SweepOptions {
  // Needed when the product exceeds config.max_cells.
  bool confirmed = false;
  std::ostream* log = nullptr;
};

// Appends one row per cell to config.output, skipping cells already
// present. Rows are written in cell order by the calling thread.
SweepSummary RunSweep(const SweepConfig& config,
                      const SweepOptions& options = {});

}  // namespace gdp

#endif  // GDP_SWEEP_H_
