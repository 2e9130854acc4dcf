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

#include "gdp/toyenv.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gdp/binary_record.h"
#include "gdp/rng.h"

namespace gdp {
namespace {

constexpr std::uint64_t kStartTag = 0x7374617274;
constexpr std::uint64_t kExpertTag = 0x657870;
constexpr std::uint64_t kPolicyTag = 0x706f6c;
constexpr char kDatasetTag[] = "GDPDATASET";
constexpr std::uint32_t kDatasetVersion = 1;

// Expert tuning: waypoint capture radius, proportional gain, and how far
// before and after the wall the gate waypoints sit.
constexpr double kWaypointRadius = 0.05;
constexpr double kGain = 10.0;
constexpr double kGateOffset = 0.1;

double Clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

double Distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

GatedReachEnv::GatedReachEnv(EnvConfig config) : config_(config) {
  if (!(config_.dt > 0.0) || config_.max_steps < 1 ||
      !(config_.success_radius > 0.0) || !(config_.max_speed > 0.0) ||
      config_.start_jitter < 0.0) {
    throw std::invalid_argument("GatedReachEnv: invalid configuration");
  }
}

Vec2 GatedReachEnv::StartPosition(std::uint64_t seed) const {
  KeyedRng rng(CombineKeys(seed, kStartTag));
  const double jx = config_.start_jitter * (2.0 * rng.Uniform() - 1.0);
  const double jy = config_.start_jitter * (2.0 * rng.Uniform() - 1.0);
  return {Clamp1(config_.start[0] + jx), Clamp1(config_.start[1] + jy)};
}

bool GatedReachEnv::InGate(double x) const {
  for (const Vec2& g : config_.gates) {
    if (x >= g[0] && x <= g[1]) return true;
  }
  return false;
}

int GatedReachEnv::CrossingGate(const Vec2& a, const Vec2& b) const {
  const double w = config_.wall_y;
  if ((a[1] < w) == (b[1] < w)) return -1;
  const double x = a[0] + (w - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
  for (int g = 0; g < 2; ++g) {
    if (x >= config_.gates[g][0] && x <= config_.gates[g][1]) return g;
  }
  return -1;
}

bool GatedReachEnv::CrossesWall(const Vec2& a, const Vec2& b) const {
  const double w = config_.wall_y;
  return (a[1] < w) != (b[1] < w) && CrossingGate(a, b) < 0;
}

Vec2 GatedReachEnv::Step(const Vec2& pos, const Vec2& action) const {
  const double scale = config_.max_speed * config_.dt;
  Vec2 next = {Clamp1(pos[0] + Clamp1(action[0]) * scale),
               Clamp1(pos[1] + Clamp1(action[1]) * scale)};
  if (CrossesWall(pos, next)) next[1] = pos[1];
  return next;
}

bool GatedReachEnv::AtGoal(const Vec2& pos) const {
  return Distance(pos, config_.goal) <= config_.success_radius;
}

Episode ExpertRollout(const GatedReachEnv& env, Gate gate, double noise_std,
                      std::uint64_t seed) {
  if (!(noise_std >= 0.0)) {
    throw std::invalid_argument("ExpertRollout: noise_std must be >= 0");
  }
  const EnvConfig& cfg = env.config();
  const Vec2& span = cfg.gates[static_cast<int>(gate)];
  const double cx = 0.5 * (span[0] + span[1]);
  const std::array<Vec2, 3> waypoints = {Vec2{cx, cfg.wall_y - kGateOffset},
                                         Vec2{cx, cfg.wall_y + kGateOffset},
                                         cfg.goal};
  KeyedRng rng(CombineKeys(seed, kExpertTag));
  Episode ep;
  Vec2 pos = env.StartPosition(seed);
  ep.positions.push_back(pos);
  int target = 0;
  for (int step = 0; step < cfg.max_steps && !env.AtGoal(pos); ++step) {
    while (target < 2 && Distance(pos, waypoints[target]) < kWaypointRadius) {
      ++target;
    }
    // Once past the wall the pre-gate waypoint is moot.
    if (target == 0 && pos[1] >= cfg.wall_y) target = 1;
    const Vec2& wp = waypoints[target];
    const double dx = wp[0] - pos[0];
    const double dy = wp[1] - pos[1];
    const double dist = std::hypot(dx, dy);
    Vec2 action = {0.0, 0.0};
    if (dist > 0.0) {
      const double speed = std::min(1.0, kGain * dist / cfg.max_speed);
      action = {dx / dist * speed, dy / dist * speed};
    }
    if (noise_std > 0.0) {
      action[0] += noise_std * rng.Normal();
      action[1] += noise_std * rng.Normal();
    }
    action = {Clamp1(action[0]), Clamp1(action[1])};
    const Vec2 next = env.Step(pos, action);
    if (ep.gate < 0) ep.gate = env.CrossingGate(pos, next);
    ep.actions.push_back(action);
    ep.positions.push_back(next);
    pos = next;
  }
  ep.success = env.AtGoal(pos);
  return ep;
}

std::vector<double> ObservationWindow(const GatedReachEnv& env,
                                      std::span<const Vec2> positions, int t,
                                      int h_obs) {
  if (h_obs < 1) throw std::invalid_argument("ObservationWindow: h_obs < 1");
  if (t < 0 || t >= static_cast<int>(positions.size())) {
    throw std::out_of_range("ObservationWindow: step out of range");
  }
  std::vector<double> obs;
  obs.reserve(ObservationDim(h_obs));
  const Vec2& goal = env.config().goal;
  for (int k = 0; k < h_obs; ++k) {
    const int s = std::max(0, t - (h_obs - 1) + k);
    obs.insert(obs.end(), {positions[s][0], positions[s][1], goal[0],
                           goal[1]});
  }
  return obs;
}

PairDataset EpisodeDataset::TrainingPairs(bool include_padded) const {
  if (include_padded) return pairs;
  std::vector<int> rows;
  for (int i = 0; i < size(); ++i) {
    if (!padded[i]) rows.push_back(i);
  }
  return pairs.Subset(rows);
}

void EpisodeDataset::Save(const std::filesystem::path& path) const {
  BinaryRecord record;
  record.tag = BinaryRecord::MakeTag(kDatasetTag);
  record.version = kDatasetVersion;
  const int n = size();
  record.dims = {static_cast<std::uint64_t>(n),
                 static_cast<std::uint64_t>(pairs.obs.cols()),
                 static_cast<std::uint64_t>(pairs.actions.cols()),
                 static_cast<std::uint64_t>(h_obs),
                 static_cast<std::uint64_t>(h_action),
                 static_cast<std::uint64_t>(episodes)};
  auto& v = record.values;
  v.insert(v.end(), pairs.obs.flat().begin(), pairs.obs.flat().end());
  v.insert(v.end(), pairs.actions.flat().begin(), pairs.actions.flat().end());
  for (int i = 0; i < n; ++i) {
    v.insert(v.end(), {padded[i] ? 1.0 : 0.0, static_cast<double>(gate[i]),
                       static_cast<double>(step[i])});
  }
  WriteBinaryRecord(path, record);
}

EpisodeDataset EpisodeDataset::Load(const std::filesystem::path& path) {
  const BinaryRecord record =
      ReadBinaryRecord(path, kDatasetTag, kDatasetVersion);
  if (record.dims.size() != 6) {
    throw std::runtime_error("dataset: malformed dimension header");
  }
  const int n = static_cast<int>(record.dims[0]);
  const int obs_dim = static_cast<int>(record.dims[1]);
  const int act_dim = static_cast<int>(record.dims[2]);
  const std::size_t expected =
      static_cast<std::size_t>(n) * (obs_dim + act_dim + 3);
  if (record.values.size() != expected) {
    throw std::runtime_error("dataset: value count mismatch");
  }
  EpisodeDataset ds;
  ds.h_obs = static_cast<int>(record.dims[3]);
  ds.h_action = static_cast<int>(record.dims[4]);
  ds.episodes = static_cast<int>(record.dims[5]);
  ds.pairs.obs.Reset(n, obs_dim);
  ds.pairs.actions.Reset(n, act_dim);
  auto it = record.values.begin();
  std::copy_n(it, ds.pairs.obs.size(), ds.pairs.obs.data());
  it += static_cast<std::ptrdiff_t>(ds.pairs.obs.size());
  std::copy_n(it, ds.pairs.actions.size(), ds.pairs.actions.data());
  it += static_cast<std::ptrdiff_t>(ds.pairs.actions.size());
  for (int i = 0; i < n; ++i, it += 3) {
    ds.padded.push_back(it[0] != 0.0);
    ds.gate.push_back(static_cast<int>(it[1]));
    ds.step.push_back(static_cast<int>(it[2]));
  }
  return ds;
}

EpisodeDataset BuildDataset(const GatedReachEnv& env,
                            const DatasetConfig& config, std::uint64_t seed) {
  if (config.episodes < 1 || config.h_obs < 1 || config.h_action < 1) {
    throw std::invalid_argument("BuildDataset: invalid sizes");
  }
  std::vector<Episode> episodes;
  for (int e = 0; e < config.episodes; ++e) {
    const Gate gate = e % 2 == 0 ? Gate::kLeft : Gate::kRight;
    bool done = false;
    for (int attempt = 0; attempt < config.attempts_per_episode && !done;
         ++attempt) {
      Episode ep = ExpertRollout(env, gate, config.noise_std,
                                 StreamKey(seed, e, attempt));
      if (ep.success) {
        episodes.push_back(std::move(ep));
        done = true;
      }
    }
    if (!done) {
      throw std::runtime_error(fmt::format(
          "BuildDataset: episode {} failed {} attempts", e,
          config.attempts_per_episode));
    }
  }

  int rows = 0;
  for (const auto& ep : episodes) rows += ep.steps();
  EpisodeDataset ds;
  ds.h_obs = config.h_obs;
  ds.h_action = config.h_action;
  ds.episodes = static_cast<int>(episodes.size());
  ds.pairs.obs.Reset(rows, ObservationDim(config.h_obs));
  ds.pairs.actions.Reset(rows, ActionDim(config.h_action));
  int row = 0;
  for (const auto& ep : episodes) {
    for (int t = 0; t < ep.steps(); ++t, ++row) {
      ds.pairs.obs.SetRow(
          row, ObservationWindow(env, ep.positions, t, config.h_obs));
      auto act = ds.pairs.actions.row(row);
      for (int k = 0; k < config.h_action && t + k < ep.steps(); ++k) {
        act[2 * k] = ep.actions[t + k][0];
        act[2 * k + 1] = ep.actions[t + k][1];
      }
      ds.padded.push_back(t + config.h_action > ep.steps());
      ds.gate.push_back(ep.gate);
      ds.step.push_back(t);
    }
  }
  return ds;
}

RolloutResult PolicyRollout(const GatedReachEnv& env, const NoiseModel& model,
                            const PolicyConfig& config, std::uint64_t seed) {
  if (config.h_exec < 1 || config.h_exec > config.h_action) {
    throw std::invalid_argument("PolicyRollout: need 1 <= h_exec <= h_A");
  }
  if (model.action_dim() != ActionDim(config.h_action) ||
      model.obs_dim() != ObservationDim(config.h_obs)) {
    throw std::invalid_argument("PolicyRollout: model shape mismatch");
  }
  const EnvConfig& cfg = env.config();
  RolloutResult result;
  Vec2 pos = env.StartPosition(seed);
  result.path.push_back(pos);
  for (int replan = 0; result.steps < cfg.max_steps && !env.AtGoal(pos);
       ++replan) {
    const std::vector<double> obs =
        ObservationWindow(env, result.path, result.steps, config.h_obs);
    const std::uint64_t key = StreamKey(seed, kPolicyTag, replan);
    std::vector<double> window;
    if (config.strategy == Strategy::kPlain) {
      SampleResult r = Sample(model, config.sampler, 1, obs, key);
      window.assign(r.samples.row(0).begin(), r.samples.row(0).end());
      result.trace.Merge(r.trace);
    } else {
      GdpResult r = GdpSample(model, config.sampler, config.gdp, obs, key);
      window = std::move(r.action);
      result.trace.Merge(r.trace);
    }
    for (int k = 0; k < config.h_exec && result.steps < cfg.max_steps; ++k) {
      const Vec2 next = env.Step(pos, {window[2 * k], window[2 * k + 1]});
      if (env.CrossesWall(pos, next)) result.wall_violation = true;
      if (result.gate < 0) result.gate = env.CrossingGate(pos, next);
      pos = next;
      result.path.push_back(pos);
      ++result.steps;
      if (env.AtGoal(pos)) break;
    }
  }
  result.success = env.AtGoal(pos);
  return result;
}

void WriteTrajectorySvg(const std::filesystem::path& path,
                        const GatedReachEnv& env,
                        std::span<const std::vector<Vec2>> paths,
                        std::span<const bool> success) {
  constexpr double kSize = 400.0;
  auto px = [](double x) { return (x + 1.0) * 0.5 * kSize; };
  auto py = [](double y) { return (1.0 - y) * 0.5 * kSize; };
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(
        fmt::format("cannot write {}", path.string()));
  }
  const EnvConfig& cfg = env.config();
  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" "
             "height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
             "<rect width=\"{0}\" height=\"{0}\" fill=\"white\" "
             "stroke=\"black\"/>\n",
             kSize);
  const double w = py(cfg.wall_y);
  const double ends[3] = {cfg.gates[0][0], cfg.gates[1][0], 1.0};
  const double starts[3] = {-1.0, cfg.gates[0][1], cfg.gates[1][1]};
  for (int s = 0; s < 3; ++s) {
    fmt::print(out,
               "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
               "stroke=\"black\" stroke-width=\"4\"/>\n",
               px(starts[s]), w, px(ends[s]), w);
  }
  fmt::print(out,
             "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" "
             "fill=\"gold\"/>\n",
             px(cfg.goal[0]), py(cfg.goal[1]),
             cfg.success_radius * 0.5 * kSize);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const bool ok = i < success.size() ? success[i] : true;
    out << "<polyline fill=\"none\" stroke-opacity=\"0.5\" stroke=\""
        << (ok ? "seagreen" : "crimson") << "\" points=\"";
    for (const Vec2& p : paths[i]) {
      fmt::print(out, "{:.2f},{:.2f} ", px(p[0]), py(p[1]));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace gdp
