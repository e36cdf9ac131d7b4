// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hccbf {

void OperatorScript::validate() const
{
  if (!(reaction_delay >= 0.0))
    throw std::invalid_argument("OperatorScript: reaction delay must be >= 0");
  int prev = -1;
  for (const PhaseDirective& p : phases) {
    if (static_cast<int>(p.area) <= prev)
      throw std::invalid_argument("OperatorScript: phases must be ordered by area");
    prev = static_cast<int>(p.area);
  }
  for (std::size_t i = 1; i < overrides.size(); ++i)
    if (overrides[i].start < overrides[i - 1].end)
      throw std::invalid_argument("OperatorScript: gripper overrides must be ordered and disjoint");
}

double AimWander::offset(double t) const
{
  if (amplitude == 0.0)
    return 0.0;
  constexpr double two_pi = 6.283185307179586;
  double sum = 0.0;
  for (std::size_t i = 0; i < periods.size(); ++i)
    sum += std::sin(two_pi * t / periods[i] + phases[i]);
  return amplitude * sum / static_cast<double>(periods.size());
}

OperatorScript passive_script()
{
  OperatorScript s;
  s.name = "passive";
  s.fallback = {Area::none, 1.0, 0.0, 0.0, 0.0};
  return s;
}

OperatorScript cooperative_script()
{
  OperatorScript s;
  s.name = "cooperative";
  s.reaction_delay = 0.25;
  s.lookahead = 2.0;
  s.centering_gain = 2.0;
  s.phases = {
      {Area::A, 0.8, 0.8, 1.1, 0.0},
      {Area::B, 0.25, 0.8, 1.1, 0.0},
      {Area::C, 0.3, 0.8, 1.0, 0.0},
  };
  s.fallback = {Area::none, 0.3, 0.8, 1.0, 0.0};
  s.hold = {true, 0.05, 8.0, 0.3, 0.5};
  s.wander.amplitude = 1.5;
  return s;
}

OperatorScript opposing_grip_script()
{
  OperatorScript s;
  s.name = "opposing-grip";
  s.fallback = {Area::none, 1.0, 8.0, 0.0, 0.0};
  return s;
}

OperatorScript stress_script()
{
  OperatorScript s = cooperative_script();
  s.name = "stress";
  s.overrides = {{8.0, 18.0, 0.0}};
  return s;
}

OperatorScript script_by_name(const std::string& name)
{
  if (name == "passive")
    return passive_script();
  if (name == "cooperative")
    return cooperative_script();
  if (name == "opposing-grip")
    return opposing_grip_script();
  if (name == "stress")
    return stress_script();
  throw std::invalid_argument("unknown operator script '" + name + "'");
}

OperatorScript jitter_script(const OperatorScript& script, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  OperatorScript out = script;
  const double speed = 1.0 + 0.1 * unit(rng);
  const double delay = 1.0 + 0.2 * unit(rng);
  const double stiff = 1.0 + 0.2 * unit(rng);
  out.reaction_delay *= delay;
  for (PhaseDirective& p : out.phases) {
    p.speed *= speed;
    p.stiffness *= stiff;
  }
  out.fallback.speed *= speed;
  out.fallback.stiffness *= stiff;
  out.hold.stiffness *= stiff;
  for (double& ph : out.wander.phases)
    ph = 3.141592653589793 * unit(rng);
  return out;
}

ScriptedOperator::ScriptedOperator(OperatorScript script, ScenarioConfig scenario, DeviceParams device)
    : script_(std::move(script)), scenario_(std::move(scenario)), device_(device)
{
  script_.validate();
}

const PhaseDirective& ScriptedOperator::phase_for(Area a) const
{
  for (const PhaseDirective& p : script_.phases)
    if (p.area == a)
      return p;
  return script_.fallback;
}

Vec2 ScriptedOperator::axes_for(const Vec2& velocity) const
{
  const Vec2 full = device_.K_joy * device_.phi_limit;
  return {std::clamp(velocity.x() / full.x(), -1.0, 1.0), std::clamp(velocity.y() / full.y(), -1.0, 1.0)};
}

OperatorFrame ScriptedOperator::next(const Observation& obs)
{
  history_.push_back(obs);
  while (history_.size() > 1 && history_[1].t <= obs.t - script_.reaction_delay)
    history_.pop_front();
  const Observation& seen = history_.front();

  const PhaseDirective& phase = phase_for(seen.area);
  OperatorFrame frame;
  frame.gripper = phase.gripper;
  frame.stiffness = phase.stiffness;

  const bool threatened = script_.hold.enabled && scenario_.obstacle.enabled && seen.obstacle.active &&
                          seen.area == scenario_.obstacle.trigger_area;
  if (threatened && !hold_done_ && !hold_started_)
    hold_started_ = seen.t;
  if (hold_started_ && !hold_done_) {
    const double lower_edge = seen.obstacle.position.y() - 0.5 * scenario_.obstacle.extents.y();
    if (lower_edge > seen.x_a.y() + script_.hold.clear_margin) {
      hold_done_ = true;
    } else {
      const double away = seen.x_a.y() >= seen.obstacle.position.y() ? 1.0 : -1.0;
      frame.axes = axes_for(Vec2(0.0, away * script_.hold.evade_speed));
      frame.gripper = script_.hold.gripper;
      frame.stiffness = script_.hold.stiffness;
      return frame;
    }
  }

  for (const GripperOverride& o : script_.overrides)
    if (obs.t >= o.start && obs.t < o.end)
      frame.gripper = o.gripper;

  if (phase.speed <= 0.0 || scenario_.path.empty())
    return frame;

  const Vec2 ref = seen.mode == ControlMode::proposed ? seen.x_h : seen.x_a;
  const PathProjection p = scenario_.path.project(ref);
  const double arc = std::min(p.arc + script_.lookahead, scenario_.path.length());
  const Vec2 tangent = scenario_.path.tangent_at(arc);
  const Vec2 normal(-tangent.y(), tangent.x());
  const Vec2 target = scenario_.path.point_at(arc) + (phase.path_offset + script_.wander.offset(seen.t)) * normal;
  Vec2 velocity = Vec2::Zero();
  const Vec2 dir = target - ref;
  if (dir.norm() > 0.0)
    velocity = phase.speed * dir.normalized();
  if (seen.mode == ControlMode::proposed)
    velocity += script_.centering_gain * (seen.x_a - seen.x_h);
  frame.axes = axes_for(velocity);
  return frame;
}

ReplayOperator::ReplayOperator(std::vector<OperatorFrame> frames, std::string label)
    : frames_(std::move(frames)), label_(std::move(label))
{
}

OperatorFrame ReplayOperator::next(const Observation& obs)
{
  if (frames_.empty())
    return OperatorFrame{};
  const auto idx = static_cast<std::size_t>(std::max<std::int64_t>(0, obs.step));
  return idx < frames_.size() ? frames_[idx] : frames_.back();
}

}  // namespace hccbf
