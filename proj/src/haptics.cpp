// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/haptics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hccbf {
namespace {

Vec2 clamp_tilt(const Vec2& phi, const Vec2& limit)
{
  return {std::clamp(phi.x(), -limit.x(), limit.x()), std::clamp(phi.y(), -limit.y(), limit.y())};
}

}  // namespace

std::string to_string(ControlMode m) { return m == ControlMode::proposed ? "proposed" : "simple-hsc"; }

ControlMode control_mode_from_string(const std::string& s)
{
  if (s == "proposed")
    return ControlMode::proposed;
  if (s == "simple-hsc")
    return ControlMode::simple_hsc;
  throw std::invalid_argument("unknown control mode '" + s + "'");
}

void DeviceParams::validate() const
{
  const double vals[] = {K_joy, K_theta, inertia, damping, K_guid, theta_max, phi_limit.x(), phi_limit.y()};
  for (double v : vals)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("DeviceParams: gains, inertia, damping and limits must be positive");
  if (!(guidance_damping >= 0.0) || !(live_grip_stiffness >= 0.0))
    throw std::invalid_argument("DeviceParams: guidance damping and live stiffness must be non-negative");
}

MappedInputs map_inputs(const Vec2& phi, double theta, const DeviceParams& params, double alpha_max)
{
  MappedInputs out;
  const Vec2 phi_c = clamp_tilt(phi, params.phi_limit);
  const double theta_c = std::clamp(theta, 0.0, params.theta_max);
  out.u_h = params.K_joy * phi_c;
  const double alpha = params.K_theta * theta_c;
  out.alpha_cmd = std::clamp(alpha, 0.0, alpha_max);
  out.clamped = phi_c != phi || theta_c != theta || out.alpha_cmd != alpha;
  return out;
}

Vec2 guidance_torque(const Vec2& u_c, const Vec2& phi, const Vec2& phi_dot, const DeviceParams& params)
{
  const Vec2 phi_auto = clamp_tilt(u_c / params.K_joy, params.phi_limit);
  return params.K_guid * (phi_auto - phi) - params.guidance_damping * phi_dot;
}

Vec2 human_torque(const OperatorFrame& frame, const DeviceState& dev, const DeviceParams& params)
{
  if (frame.stiffness <= 0.0)
    return Vec2::Zero();
  const Vec2 axes{std::clamp(frame.axes.x(), -1.0, 1.0), std::clamp(frame.axes.y(), -1.0, 1.0)};
  const Vec2 target = axes.cwiseProduct(params.phi_limit);
  // damping ratio 0.7 for the arm alone
  const double arm_damping = 1.4 * std::sqrt(frame.stiffness * params.inertia);
  return frame.stiffness * (target - dev.phi) - arm_damping * dev.phi_dot;
}

DeviceState step_device(const DeviceState& dev, const Vec2& tau_human, const Vec2& tau_guidance,
                        const DeviceParams& params, double dt)
{
  if (!(dt > 0.0))
    throw std::invalid_argument("step_device: dt must be positive");
  DeviceState next = dev;
  next.tau_human = tau_human;
  next.tau_guidance = tau_guidance;
  const Vec2 accel = (tau_human + tau_guidance - params.damping * dev.phi_dot) / params.inertia;
  next.phi_dot = dev.phi_dot + dt * accel;
  next.phi = dev.phi + dt * next.phi_dot;
  for (int i = 0; i < 2; ++i) {
    const double lim = params.phi_limit[i];
    if (next.phi[i] > lim) {
      next.phi[i] = lim;
      next.phi_dot[i] = 0.0;
    } else if (next.phi[i] < -lim) {
      next.phi[i] = -lim;
      next.phi_dot[i] = 0.0;
    }
  }
  return next;
}

Vec2 direct_tilt(const OperatorFrame& frame, const DeviceParams& params)
{
  const Vec2 axes{std::clamp(frame.axes.x(), -1.0, 1.0), std::clamp(frame.axes.y(), -1.0, 1.0)};
  return axes.cwiseProduct(params.phi_limit);
}

Vec2 simple_hsc_step(const DeviceState& dev, const DeviceParams& params)
{
  return params.K_joy * clamp_tilt(dev.phi, params.phi_limit);
}

}  // namespace hccbf
