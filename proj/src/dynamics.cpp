// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hccbf/cbf.hpp"
#include "hccbf/scenario.hpp"

namespace hccbf {

std::string to_string(Scheme s) { return s == Scheme::rk4 ? "rk4" : "explicit-euler"; }

Scheme scheme_from_string(const std::string& s)
{
  if (s == "explicit-euler" || s == "euler")
    return Scheme::explicit_euler;
  if (s == "rk4")
    return Scheme::rk4;
  throw std::invalid_argument("unknown integration scheme '" + s + "'");
}

std::string to_string(RateLimitCondition c)
{
  return c == RateLimitCondition::goal_velocity ? "goal_velocity" : "goal_position";
}

RateLimitCondition rate_limit_condition_from_string(const std::string& s)
{
  if (s == "goal_position")
    return RateLimitCondition::goal_position;
  if (s == "goal_velocity")
    return RateLimitCondition::goal_velocity;
  throw std::invalid_argument("unknown rate limit condition '" + s + "'");
}

void IntegratorConfig::validate() const
{
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("IntegratorConfig: dt must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("IntegratorConfig: epsilon must be positive");
  if (!(v_max > 0.0) || !std::isfinite(v_max))
    throw std::invalid_argument("IntegratorConfig: v_max must be positive");
}

Vec2 integrate(const PlantDescriptor& plant, const Vec2& x, const Vec2& u, const IntegratorConfig& cfg)
{
  const double dt = cfg.dt;
  if (cfg.scheme == Scheme::explicit_euler)
    return x + dt * plant.velocity(x, u);

  const Vec2 k1 = plant.velocity(x, u);
  const Vec2 k2 = plant.velocity(x + 0.5 * dt * k1, u);
  const Vec2 k3 = plant.velocity(x + 0.5 * dt * k2, u);
  const Vec2 k4 = plant.velocity(x + dt * k3, u);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

VehicleState step_plant(const VehicleState& state, const Vec2& u_total, const PlantDescriptor& plant,
                        const IntegratorConfig& cfg)
{
  if (!is_finite(u_total))
    throw ControllerFault("non-finite vehicle input");
  VehicleState next = state;
  next.x_a = integrate(plant, state.x_a, u_total, cfg);
  if (!is_finite(next.x_a))
    throw ControllerFault("non-finite vehicle state");
  next.step = state.step + 1;
  next.t = static_cast<double>(next.step) * cfg.dt;
  return next;
}

GoalStep step_goal(const AcceptableRegion& region, const Vec2& u_h, const PlantDescriptor& plant,
                   const IntegratorConfig& cfg)
{
  if (!is_finite(u_h))
    throw ControllerFault("non-finite human input");
  GoalStep out;
  out.xh_dot = plant.velocity(region.x_h, u_h);
  out.region = region;
  out.region.x_h = cfg.scheme == Scheme::explicit_euler ? Vec2(region.x_h + cfg.dt * out.xh_dot)
                                                        : integrate(plant, region.x_h, u_h, cfg);
  if (!is_finite(out.region.x_h))
    throw ControllerFault("non-finite goal state");
  return out;
}

double shrink_limit(const Vec2& x_h, const Vec2& x_a, const Vec2& xh_dot, const IntegratorConfig& cfg)
{
  const Vec2 d = x_h - x_a;
  const double test = cfg.condition == RateLimitCondition::goal_position ? d.dot(x_h) : d.dot(xh_dot);
  const double speed = xh_dot.norm();
  const double m = test > 0.0 ? cfg.v_max + speed : cfg.v_max - speed;
  return std::max(0.0, m);
}

RadiusStep filter_radius(const AcceptableRegion& region, double alpha_cmd, const Vec2& xh_dot,
                         const Vec2& x_a, const IntegratorConfig& cfg)
{
  RadiusStep out;
  out.shrink_limit = shrink_limit(region.x_h, x_a, xh_dot, cfg);
  const double raw = (alpha_cmd - region.beta) / cfg.epsilon;
  const double rate = raw < 0.0 ? std::max(raw, -out.shrink_limit) : raw;

  out.region = region;
  out.region.alpha_cmd = alpha_cmd;
  out.region.beta_dot = rate;
  out.region.beta = std::max(0.0, region.beta + rate * cfg.dt);
  return out;
}

Area area_of(const Vec2& x_a, const ScenarioConfig& scenario)
{
  const Polyline& path = scenario.path;
  if (path.empty())
    return Area::none;
  const PathProjection p = path.project(x_a);
  if (p.beyond_end)
    return Area::none;
  for (const AreaInterval& iv : scenario.areas)
    if (iv.contains(p.arc))
      return iv.label;
  return Area::none;
}

}  // namespace hccbf
