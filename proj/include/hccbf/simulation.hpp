// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hccbf/cbf.hpp"
#include "hccbf/config.hpp"
#include "hccbf/dynamics.hpp"
#include "hccbf/haptics.hpp"
#include "hccbf/operator.hpp"
#include "hccbf/scenario.hpp"

namespace hccbf {

/// One fixed step. State columns hold the values at the start of the step,
/// input columns the values applied during it.
struct LogRow {
  std::int64_t step = 0;
  double t = 0.0;
  Area area = Area::none;
  Vec2 x_a = Vec2::Zero();
  Vec2 x_h = Vec2::Zero();
  double beta = 0.0;
  double beta_dot = 0.0;
  double shrink_limit = 0.0;
  double alpha_cmd = 0.0;
  Vec2 u_c = Vec2::Zero();
  Vec2 u_b = Vec2::Zero();
  Vec2 u_h = Vec2::Zero();
  Vec2 u_a = Vec2::Zero();
  double B = 0.0;
  double l = 0.0;
  double I = 0.0;
  double Q = 0.0;
  double J = 0.0;
  bool engaged = false;
  bool saturated = false;
  bool singular = false;
  Vec2 obstacle = Vec2::Zero();
  bool obstacle_active = false;
  bool collision = false;
  Vec2 phi = Vec2::Zero();
  Vec2 phi_dot = Vec2::Zero();
  double theta = 0.0;
  Vec2 tau_guidance = Vec2::Zero();
  OperatorFrame op;
};

struct EpisodeHeader {
  std::string config_sha256;
  std::string scenario_sha256;
  ControlMode mode = ControlMode::proposed;
  std::string operator_name;
  std::uint64_t seed = 0;
  double dt = 0.002;
};

struct EpisodeFooter {
  bool completed = false;
  double completion_time = 0.0;  ///< s, start to finish (or to abort)
  std::int64_t steps = 0;
  std::int64_t collision_events = 0;  ///< rising edges of the collision flag
  std::optional<std::string> fault;
};

struct EpisodeLog {
  EpisodeHeader header;
  ExperimentConfig config;
  std::vector<LogRow> rows;
  EpisodeFooter footer;
};

/// The closed loop: operator frame -> device -> input mapping ->
/// (proposed: goal and radius rates -> safety filter -> u_a = u_c + u_b |
///  simple HSC: u_a = u_h) -> plant -> obstacle.
///
/// Used by both the offline harness and the live session so that replays go
/// through the same arithmetic.
class Simulation {
public:
  Simulation(ExperimentConfig config, ControlMode mode);

  /// Path end reached or timeout.
  bool done() const;
  bool completed() const;
  Observation observe() const;

  /// Advances one step and returns its log row. Throws ControllerFault.
  LogRow step(const OperatorFrame& frame);

  std::int64_t steps() const { return vehicle_.step; }
  double time() const { return vehicle_.t; }
  ControlMode mode() const { return mode_; }
  const ExperimentConfig& config() const { return config_; }
  const VehicleState& vehicle() const { return vehicle_; }
  const AcceptableRegion& region() const { return region_; }
  const DeviceState& device() const { return device_; }
  const ObstacleState& obstacle() const { return obstacle_; }

private:
  ExperimentConfig config_;
  ControlMode mode_;
  PlantDescriptor plant_;
  VehicleState vehicle_;
  AcceptableRegion region_;
  DeviceState device_;
  ObstacleState obstacle_;
  bool initialised_ = false;
};

/// Empty log with its header filled in.
EpisodeLog begin_episode(const ExperimentConfig& config, ControlMode mode, std::string operator_name,
                         std::uint64_t seed);

/// Fills the footer from the simulation's final state.
void finish_episode(EpisodeLog& log, const Simulation& sim, std::optional<std::string> fault = std::nullopt);

/// Runs until the path end or timeout. A controller fault truncates the log
/// and is recorded in the footer.
EpisodeLog run_episode(const ExperimentConfig& config, ControlMode mode, OperatorSource& op,
                       std::uint64_t seed = 0);

/// Counts rising edges of the collision flag.
std::int64_t count_collision_events(const std::vector<LogRow>& rows);

}  // namespace hccbf
