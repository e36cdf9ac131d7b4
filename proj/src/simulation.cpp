// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/simulation.hpp"

#include <algorithm>

namespace hccbf {

Simulation::Simulation(ExperimentConfig config, ControlMode mode)
    : config_(std::move(config)), mode_(mode), plant_(plant_by_name(config_.plant))
{
  config_.validate();
  const ScenarioConfig& sc = config_.scenario;
  const Vec2 start = sc.path.points().empty() ? Vec2::Zero() : sc.path.points().front();
  vehicle_.x_a = start;
  vehicle_.area = area_of(start, sc);
  region_.x_h = start;
  obstacle_ = initial_obstacle(sc);
}

bool Simulation::completed() const { return path_complete(vehicle_.x_a, config_.scenario); }

bool Simulation::done() const
{
  return completed() || vehicle_.t >= config_.scenario.timeout;
}

Observation Simulation::observe() const
{
  Observation o;
  o.step = vehicle_.step;
  o.t = vehicle_.t;
  o.x_a = vehicle_.x_a;
  o.x_h = mode_ == ControlMode::proposed ? region_.x_h : vehicle_.x_a;
  o.area = vehicle_.area;
  o.obstacle = obstacle_;
  o.mode = mode_;
  return o;
}

LogRow Simulation::step(const OperatorFrame& frame)
{
  const ScenarioConfig& sc = config_.scenario;
  const IntegratorConfig& ic = config_.integrator;
  const DeviceParams& dp = config_.device;

  const double theta = std::clamp(frame.gripper, 0.0, 1.0) * dp.theta_max;
  if (!initialised_) {
    // the region starts centred on the vehicle at the radius the gripper asks for
    region_.alpha_cmd = map_inputs(Vec2::Zero(), theta, dp, config_.cbf.alpha_max).alpha_cmd;
    region_.beta = region_.alpha_cmd;
    initialised_ = true;
  }

  LogRow row;
  row.step = vehicle_.step;
  row.t = vehicle_.t;
  row.area = vehicle_.area;
  row.x_a = vehicle_.x_a;
  row.op = frame;
  row.obstacle = obstacle_.position;
  row.obstacle_active = obstacle_.active;
  row.collision = sc.obstacle.enabled && collision_check(vehicle_.x_a, obstacle_, sc.obstacle.extents,
                                                         sc.vehicle_radius);

  const Vec2 u_c = fac_command(vehicle_.x_a, sc);
  row.u_c = u_c;

  // device
  DeviceState dev = device_;
  dev.theta = theta;
  if (!dp.simulate_dynamics) {
    dev.phi = direct_tilt(frame, dp);
    dev.phi_dot = Vec2::Zero();
    dev.tau_guidance = Vec2::Zero();
    dev.tau_human = Vec2::Zero();
  } else {
    dev.tau_guidance = guidance_torque(u_c, dev.phi, dev.phi_dot, dp);
    dev.tau_human = human_torque(frame, dev, dp);
  }
  const MappedInputs mapped = map_inputs(dev.phi, dev.theta, dp, config_.cbf.alpha_max);
  row.u_h = mapped.u_h;
  row.alpha_cmd = mapped.alpha_cmd;
  row.phi = dev.phi;
  row.phi_dot = dev.phi_dot;
  row.theta = dev.theta;
  row.tau_guidance = dev.tau_guidance;

  if (mode_ == ControlMode::proposed) {
    const GoalStep goal = step_goal(region_, mapped.u_h, plant_, ic);
    const RadiusStep radius = filter_radius(region_, mapped.alpha_cmd, goal.xh_dot, vehicle_.x_a, ic);
    const FilterOutput filt = human_centered_filter(vehicle_.x_a, region_.x_h, region_.beta,
                                                    radius.region.beta_dot, u_c, goal.xh_dot, plant_,
                                                    config_.cbf);
    row.x_h = region_.x_h;
    row.beta = region_.beta;
    row.beta_dot = radius.region.beta_dot;
    row.shrink_limit = radius.shrink_limit;
    row.u_b = filt.u_b;
    row.u_a = u_c + filt.u_b;
    row.B = filt.barrier.B;
    row.l = filt.barrier.l;
    row.I = filt.diag.I;
    row.Q = filt.diag.Q;
    row.J = filt.diag.J;
    row.engaged = filt.diag.engaged;
    row.saturated = filt.diag.saturated;
    row.singular = filt.diag.singular;

    vehicle_ = step_plant(vehicle_, row.u_a, plant_, ic);
    region_.x_h = goal.region.x_h;
    region_.alpha_cmd = radius.region.alpha_cmd;
    region_.beta = radius.region.beta;
    region_.beta_dot = radius.region.beta_dot;
  } else {
    row.x_h = vehicle_.x_a;
    row.u_a = simple_hsc_step(dev, dp);
    vehicle_ = step_plant(vehicle_, row.u_a, plant_, ic);
    region_.x_h = vehicle_.x_a;
  }

  if (dp.simulate_dynamics)
    device_ = step_device(dev, dev.tau_human, dev.tau_guidance, dp, ic.dt);
  else
    device_ = dev;
  obstacle_ = step_obstacle(obstacle_, row.x_a, sc, ic.dt);
  vehicle_.area = area_of(vehicle_.x_a, sc);
  return row;
}

std::int64_t count_collision_events(const std::vector<LogRow>& rows)
{
  std::int64_t n = 0;
  bool prev = false;
  for (const LogRow& r : rows) {
    if (r.collision && !prev)
      ++n;
    prev = r.collision;
  }
  return n;
}

EpisodeLog begin_episode(const ExperimentConfig& config, ControlMode mode, std::string operator_name,
                         std::uint64_t seed)
{
  EpisodeLog log;
  log.config = config;
  log.header.config_sha256 = config_hash(config);
  log.header.scenario_sha256 = scenario_hash(config.scenario);
  log.header.mode = mode;
  log.header.operator_name = std::move(operator_name);
  log.header.seed = seed;
  log.header.dt = config.integrator.dt;
  return log;
}

void finish_episode(EpisodeLog& log, const Simulation& sim, std::optional<std::string> fault)
{
  log.footer.fault = std::move(fault);
  log.footer.completed = !log.footer.fault && sim.completed();
  log.footer.steps = sim.steps();
  log.footer.completion_time = sim.time();
  log.footer.collision_events = count_collision_events(log.rows);
}

EpisodeLog run_episode(const ExperimentConfig& config, ControlMode mode, OperatorSource& op,
                       std::uint64_t seed)
{
  EpisodeLog log = begin_episode(config, mode, op.name(), seed);
  Simulation sim(config, mode);
  const auto expected = static_cast<std::size_t>(config.scenario.timeout / config.integrator.dt) + 1;
  log.rows.reserve(expected);
  std::optional<std::string> fault;
  try {
    while (!sim.done()) {
      const OperatorFrame frame = op.next(sim.observe());
      log.rows.push_back(sim.step(frame));
    }
  } catch (const ControllerFault& e) {
    fault = e.what();
  }
  finish_episode(log, sim, std::move(fault));
  return log;
}

}  // namespace hccbf
