// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <numbers>
#include <string>

#include "hccbf/vec.hpp"

namespace hccbf {

enum class ControlMode { proposed, simple_hsc };

std::string to_string(ControlMode m);
/// "proposed" or "simple-hsc"; throws std::invalid_argument otherwise.
ControlMode control_mode_from_string(const std::string& s);

/// Virtual joystick-plus-gripper.
///
/// Component 0 of every joystick vector is the right/left tilt (drives world x),
/// component 1 the forward/backward tilt (drives world y, "up" on a top-down display).
struct DeviceParams {
  double K_joy = 4.0;              ///< (m/s)/rad
  double K_theta = 4.0;            ///< m/rad
  double inertia = 0.01;           ///< kg m^2
  double damping = 0.05;           ///< N m s/rad, device friction
  double K_guid = 0.8;             ///< N m/rad, guidance stiffness
  double guidance_damping = 0.13;  ///< N m s/rad, damping added by the guidance loop
  double theta_max = 1.0;          ///< rad
  Vec2 phi_limit{25.0 * std::numbers::pi / 180.0, 20.0 * std::numbers::pi / 180.0};
  /// false: operator axes set the tilt directly (live consoles).
  bool simulate_dynamics = true;
  /// Arm stiffness assumed for live operators when dynamics are simulated.
  double live_grip_stiffness = 0.8;

  void validate() const;
};

struct DeviceState {
  Vec2 phi = Vec2::Zero();
  Vec2 phi_dot = Vec2::Zero();
  double theta = 0.0;
  Vec2 tau_guidance = Vec2::Zero();
  Vec2 tau_human = Vec2::Zero();
};

/// What an operator (script, replay or live client) does in one step.
struct OperatorFrame {
  Vec2 axes = Vec2::Zero();  ///< intended tilt as a fraction of phi_limit, in [-1, 1]^2
  double gripper = 1.0;      ///< [0, 1], fraction of theta_max
  double stiffness = 0.0;    ///< N m/rad, arm stiffness holding the stick at the intended tilt
};

struct MappedInputs {
  Vec2 u_h = Vec2::Zero();
  double alpha_cmd = 0.0;
  bool clamped = false;  ///< an angle or the radius hit its limit
};

/// u_h = K_joy phi, alpha_cmd = K_theta theta (angles clamped to their limits,
/// alpha_cmd to [0, alpha_max]).
MappedInputs map_inputs(const Vec2& phi, double theta, const DeviceParams& params, double alpha_max);

/// Spring-damper pulling the stick towards the tilt that would command u_c.
Vec2 guidance_torque(const Vec2& u_c, const Vec2& phi, const Vec2& phi_dot, const DeviceParams& params);

/// Arm model: stiffness (axes * phi_limit - phi) minus a matching arm damping.
Vec2 human_torque(const OperatorFrame& frame, const DeviceState& dev, const DeviceParams& params);

/// inertia phi'' = tau_human + tau_guidance - damping phi', semi-implicit Euler,
/// hard stops at phi_limit with the velocity zeroed at the stop.
DeviceState step_device(const DeviceState& dev, const Vec2& tau_human, const Vec2& tau_guidance,
                        const DeviceParams& params, double dt);

/// Tilt commanded directly by the operator axes (dynamics bypassed).
Vec2 direct_tilt(const OperatorFrame& frame, const DeviceParams& params);

/// Simple haptic shared control: the vehicle input is the stick reading itself.
Vec2 simple_hsc_step(const DeviceState& dev, const DeviceParams& params);

}  // namespace hccbf
