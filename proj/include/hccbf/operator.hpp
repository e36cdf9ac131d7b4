// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hccbf/haptics.hpp"
#include "hccbf/path.hpp"
#include "hccbf/scenario.hpp"

namespace hccbf {

/// What an operator can see at the start of a step.
struct Observation {
  std::int64_t step = 0;
  double t = 0.0;
  Vec2 x_a = Vec2::Zero();
  Vec2 x_h = Vec2::Zero();  ///< equals x_a in simple-HSC mode
  Area area = Area::none;
  ObstacleState obstacle;
  ControlMode mode = ControlMode::proposed;
};

class OperatorSource {
public:
  virtual ~OperatorSource() = default;
  virtual OperatorFrame next(const Observation& obs) = 0;
  virtual std::string name() const = 0;
};

/// Behaviour of a scripted operator while the (delayed) observation is in one area.
struct PhaseDirective {
  Area area = Area::none;
  double gripper = 1.0;
  double stiffness = 0.0;  ///< N m/rad
  double speed = 0.0;      ///< m/s the operator steers at; 0 = hands off the stick
  double path_offset = 0.0;  ///< m, left of the path is positive
};

/// Stop-and-dodge reaction to the crossing obstacle.
struct HoldDirective {
  bool enabled = false;
  double gripper = 0.05;
  double stiffness = 8.0;
  double evade_speed = 0.3;  ///< m/s, lateral, away from the obstacle
  double clear_margin = 0.5; ///< m between the obstacle's lower edge and the vehicle to resume
};

/// Slow lateral aiming error: the operator's target point drifts off the path
/// by a sum of three sinusoids.
struct AimWander {
  double amplitude = 0.0;  ///< m, per component
  std::array<double, 3> periods{4.1, 6.7, 11.3};  ///< s
  std::array<double, 3> phases{0.0, 2.1, 4.2};    ///< rad

  double offset(double t) const;
};

/// Gripper forced to a value over a time window, regardless of area.
struct GripperOverride {
  double start = 0.0;
  double end = 0.0;
  double gripper = 0.0;
};

struct OperatorScript {
  std::string name = "passive";
  double reaction_delay = 0.0;  ///< s, >= 0
  double lookahead = 2.0;       ///< m, the operator's own pursuit lookahead
  double centering_gain = 0.0;  ///< 1/s, keeps the goal on the vehicle in proposed mode
  std::vector<PhaseDirective> phases;  ///< ordered A, B, C
  PhaseDirective fallback;             ///< outside every listed area
  HoldDirective hold;
  AimWander wander;
  std::vector<GripperOverride> overrides;

  void validate() const;
};

/// Hands off, gripper wide open.
OperatorScript passive_script();
/// Wide region in A, stop-and-dodge with a closed gripper in B, moderate region in C.
OperatorScript cooperative_script();
/// Stiff grip holding the stick centred against the guidance.
OperatorScript opposing_grip_script();
/// Cooperative, but the gripper is slammed shut for ten seconds in Area A.
OperatorScript stress_script();
/// Names accepted by script_by_name: passive, cooperative, opposing-grip, stress.
OperatorScript script_by_name(const std::string& name);

/// Per-seed operator variability: speed, delay and stiffness scaled by up to
/// +/-10-20 %, and fresh aim-wander phases.
OperatorScript jitter_script(const OperatorScript& script, std::uint64_t seed);

class ScriptedOperator final : public OperatorSource {
public:
  ScriptedOperator(OperatorScript script, ScenarioConfig scenario, DeviceParams device);

  OperatorFrame next(const Observation& obs) override;
  std::string name() const override { return script_.name; }
  const OperatorScript& script() const { return script_; }

private:
  const PhaseDirective& phase_for(Area a) const;
  Vec2 axes_for(const Vec2& velocity) const;

  OperatorScript script_;
  ScenarioConfig scenario_;
  DeviceParams device_;
  std::deque<Observation> history_;
  std::optional<double> hold_started_;
  bool hold_done_ = false;
};

/// Replays recorded frames by step index; past the end the last frame is held.
class ReplayOperator final : public OperatorSource {
public:
  explicit ReplayOperator(std::vector<OperatorFrame> frames, std::string label = "replay");

  OperatorFrame next(const Observation& obs) override;
  std::string name() const override { return label_; }
  std::size_t size() const { return frames_.size(); }

private:
  std::vector<OperatorFrame> frames_;
  std::string label_;
};

}  // namespace hccbf
