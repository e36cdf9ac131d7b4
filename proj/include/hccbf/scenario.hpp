// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hccbf/path.hpp"
#include "hccbf/vec.hpp"

namespace hccbf {

struct ObstacleConfig {
  Vec2 home = Vec2::Zero();         ///< m, centre at rest
  Area trigger_area = Area::B;
  Vec2 velocity{0.0, 3.0};          ///< m/s once triggered
  Vec2 extents{1.0, 2.0};           ///< m, full width (x) and height (y)
  bool enabled = true;
};

struct ScenarioConfig {
  std::string name = "default";
  Polyline path;
  std::vector<AreaInterval> areas;  ///< disjoint, ordered A, B, C
  ObstacleConfig obstacle;
  double v_ref = 1.5;               ///< m/s, F-AC cruise speed
  double v_max = 2.0;               ///< m/s, F-AC command cap
  double lookahead = 1.5;           ///< m, pure-pursuit lookahead
  double vehicle_radius = 0.25;     ///< m, for collision scoring
  double timeout = 120.0;           ///< s
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on inconsistent geometry or parameters.
  void validate() const;
};

struct ObstacleState {
  Vec2 position = Vec2::Zero();
  bool active = false;
};

/// The default desk-scale course: a 40 m S-curve (A), a 15 m straight with the
/// crossing obstacle (B) and a 30 m slalom (C).
ScenarioConfig default_scenario();

/// Straight path from start to end with a single area A, no obstacle.
ScenarioConfig straight_scenario(const Vec2& start, const Vec2& end);

/// Fully autonomous controller: pure pursuit towards the point lookahead metres
/// ahead of the nearest path point, at v_ref, capped at v_max. Returns zero once
/// the vehicle is at or past the end of the path.
Vec2 fac_command(const Vec2& x_a, const ScenarioConfig& scenario);

/// True once x_a's nearest path point is the end of the path.
bool path_complete(const Vec2& x_a, const ScenarioConfig& scenario);

ObstacleState initial_obstacle(const ScenarioConfig& scenario);

/// Latches active when x_a is in the trigger area, then moves at the configured
/// velocity for the rest of the episode.
ObstacleState step_obstacle(const ObstacleState& obs, const Vec2& x_a, const ScenarioConfig& scenario,
                            double dt);

/// Strict overlap of the vehicle disc (radius r_v) with the obstacle rectangle.
bool collision_check(const Vec2& x_a, const ObstacleState& obs, const Vec2& extents, double r_v);

void to_json(nlohmann::json& j, const ScenarioConfig& s);
void from_json(const nlohmann::json& j, ScenarioConfig& s);

}  // namespace hccbf
