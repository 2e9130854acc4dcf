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

#ifndef GDP_TOYENV_H_
#define GDP_TOYENV_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gdp/genetic.h"
#include "gdp/noise_model.h"
#include "gdp/sampler.h"
#include "gdp/training.h"

namespace gdp {

using Vec2 = std::array<double, 2>;

struct EnvConfig {
  Vec2 goal = {0.0, 0.8};
  double wall_y = 0.4;
  std::array<Vec2, 2> gates = {Vec2{-0.5, -0.3}, Vec2{0.3, 0.5}};
  Vec2 start = {0.0, -0.8};
  // Half-width of the uniform start perturbation, per axis.
  double start_jitter = 0.1;
  double dt = 0.05;
  // Distance per unit time at a unit action.
  double max_speed = 1.0;
  int max_steps = 200;
  double success_radius = 0.05;
};

enum class Gate { kLeft = 0, kRight = 1 };

// Point mass in [-1, 1]^2 that must pass one of two gates in a horizontal
// wall to reach the goal. Stateless: every method is a pure function.
class GatedReachEnv {
 public:
  explicit GatedReachEnv(EnvConfig config = {});

  const EnvConfig& config() const { return config_; }

  Vec2 StartPosition(std::uint64_t seed) const;
  // Moves by clamp(action) * max_speed * dt, stays in the box, and drops the
  // vertical component of a move that would cross the wall outside a gate.
  Vec2 Step(const Vec2& pos, const Vec2& action) const;
  bool AtGoal(const Vec2& pos) const;
  bool InGate(double x) const;
  // True if the segment a -> b crosses the wall line outside both gates.
  bool CrossesWall(const Vec2& a, const Vec2& b) const;
  // Gate whose interval contains the wall crossing of a -> b, or -1.
  int CrossingGate(const Vec2& a, const Vec2& b) const;

 private:
  EnvConfig config_;
};

struct Episode {
  std::vector<Vec2> positions;  // length steps + 1
  std::vector<Vec2> actions;    // length steps
  bool success = false;
  int gate = -1;                // gate crossed first, -1 if none

  int steps() const { return static_cast<int>(actions.size()); }
};

// Waypoint controller through `gate` to the goal with Gaussian action noise.
Episode ExpertRollout(const GatedReachEnv& env, Gate gate, double noise_std,
                      std::uint64_t seed);

// Observation window at step t: (position, goal) for steps t - h + 1 .. t,
// repeating the first position before the episode start.
std::vector<double> ObservationWindow(const GatedReachEnv& env,
                                      std::span<const Vec2> positions, int t,
                                      int h_obs);
inline int ObservationDim(int h_obs) { return 4 * h_obs; }
inline int ActionDim(int h_action) { return 2 * h_action; }

struct EpisodeDataset {
  int h_obs = 2;
  int h_action = 8;
  PairDataset pairs;
  std::vector<bool> padded;   // window runs past the episode end
  std::vector<int> gate;      // gate of the source episode
  std::vector<int> step;      // window start within its episode
  int episodes = 0;

  int size() const { return pairs.size(); }
  // Rows whose window lies inside its episode.
  PairDataset TrainingPairs(bool include_padded = false) const;

  void Save(const std::filesystem::path& path) const;
  static EpisodeDataset Load(const std::filesystem::path& path);
};

struct DatasetConfig {
  int episodes = 200;
  int h_obs = 2;
  int h_action = 8;
  double noise_std = 0.1;
  // Attempts allowed per requested episode before giving up.
  int attempts_per_episode = 10;
};

// Successful expert episodes alternating left and right gates, cut into
// stride-1 windows. Windows that run past the end are zero-padded and
// flagged. Throws std::runtime_error when too few episodes succeed.
EpisodeDataset BuildDataset(const GatedReachEnv& env,
                            const DatasetConfig& config, std::uint64_t seed);

enum class Strategy { kPlain, kGdp };

struct PolicyConfig {
  Strategy strategy = Strategy::kPlain;
  SamplerConfig sampler;
  GdpConfig gdp;
  int h_obs = 2;
  int h_action = 8;
  int h_exec = 4;
};

struct RolloutResult {
  bool success = false;
  int steps = 0;
  int gate = -1;
  bool wall_violation = false;
  StepTrace trace;
  std::vector<Vec2> path;
};

// Receding-horizon control: sample an action window, execute its first
// h_exec actions, replan.
RolloutResult PolicyRollout(const GatedReachEnv& env, const NoiseModel& model,
                            const PolicyConfig& config, std::uint64_t seed);

// Trajectories drawn over the walls, gates and goal.
void WriteTrajectorySvg(const std::filesystem::path& path,
                        const GatedReachEnv& env,
                        std::span<const std::vector<Vec2>> paths,
                        std::span<const bool> success = {});

}  // namespace gdp

#endif  // GDP_TOYENV_H_
