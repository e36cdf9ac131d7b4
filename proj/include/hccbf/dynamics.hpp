// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstdint>
#include <string>

#include "hccbf/path.hpp"
#include "hccbf/plant.hpp"
#include "hccbf/vec.hpp"

namespace hccbf {

struct ScenarioConfig;

enum class Scheme { explicit_euler, rk4 };

/// Which sign test selects the faster contraction limit v_max + |xh_dot|.
enum class RateLimitCondition {
  goal_position,  ///< (x_h - x_a)^T x_h > 0
  goal_velocity,  ///< (x_h - x_a)^T xh_dot > 0
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);
std::string to_string(RateLimitCondition c);
RateLimitCondition rate_limit_condition_from_string(const std::string& s);

struct IntegratorConfig {
  double dt = 0.002;       ///< s
  Scheme scheme = Scheme::explicit_euler;
  double epsilon = 0.1;    ///< s, radius low-pass time constant
  double v_max = 2.0;      ///< m/s, base contraction limit
  RateLimitCondition condition = RateLimitCondition::goal_position;

  void validate() const;
};

struct VehicleState {
  Vec2 x_a = Vec2::Zero();
  std::int64_t step = 0;
  double t = 0.0;
  Area area = Area::none;
};

struct AcceptableRegion {
  Vec2 x_h = Vec2::Zero();
  double alpha_cmd = 0.0;
  double beta = 0.0;
  double beta_dot = 0.0;
};

/// One step of x' = f(x) + g(x) u with u held over the step.
Vec2 integrate(const PlantDescriptor& plant, const Vec2& x, const Vec2& u, const IntegratorConfig& cfg);

/// Advances the vehicle; t is recomputed as step * dt so it never drifts.
/// Throws ControllerFault on a non-finite input.
VehicleState step_plant(const VehicleState& state, const Vec2& u_total, const PlantDescriptor& plant,
                        const IntegratorConfig& cfg);

struct GoalStep {
  AcceptableRegion region;  ///< x_h advanced one step
  Vec2 xh_dot = Vec2::Zero();  ///< goal velocity at the start of the step
};

/// x_h' = f(x_h) + g(x_h) u_h.
GoalStep step_goal(const AcceptableRegion& region, const Vec2& u_h, const PlantDescriptor& plant,
                   const IntegratorConfig& cfg);

struct RadiusStep {
  AcceptableRegion region;    ///< beta advanced; beta_dot holds the rate applied
  double shrink_limit = 0.0;  ///< the contraction bound m for this step
};

/// Contraction bound m = v_max +/- |xh_dot|, floored at zero.
double shrink_limit(const Vec2& x_h, const Vec2& x_a, const Vec2& xh_dot, const IntegratorConfig& cfg);

/// Low-pass radius filter  beta' = (alpha_cmd - beta) / epsilon  whose negative
/// rates are bounded by -shrink_limit. Expansion is never limited. beta stays >= 0.
RadiusStep filter_radius(const AcceptableRegion& region, double alpha_cmd, const Vec2& xh_dot,
                         const Vec2& x_a, const IntegratorConfig& cfg);

/// Area label of x_a by arc length of its nearest path point. Points past the
/// end of the path are labelled none.
Area area_of(const Vec2& x_a, const ScenarioConfig& scenario);

}  // namespace hccbf
