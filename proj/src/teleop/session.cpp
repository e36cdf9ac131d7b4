// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/teleop/session.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>

namespace hccbf::teleop {
namespace {

bool one_of(SessionState s, std::initializer_list<SessionState> allowed)
{
  for (SessionState a : allowed)
    if (s == a)
      return true;
  return false;
}

bool safe_name(const std::string& name)
{
  if (name.empty() || name.size() > 64)
    return false;
  for (const char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      return false;
  return name.front() != '.';
}

}  // namespace

Session::Session(SessionOptions options)
    : options_(std::move(options)), config_(options_.config), mode_(options_.mode)
{
  if (options_.steps_per_broadcast < 1)
    throw std::invalid_argument("Session: steps_per_broadcast must be >= 1");
  held_.axes = Vec2::Zero();
  held_.gripper = 1.0;
}

Ack Session::ack(const SessionCommand& cmd, nlohmann::json detail) const
{
  return {to_string(cmd.verb), state_, cmd.id, std::move(detail)};
}

Reply Session::fail(const SessionCommand& cmd, const std::string& message) const
{
  ProtocolError e{"illegal_state", message, cmd.id, nlohmann::json::object()};
  e.detail = {{"verb", to_string(cmd.verb)}, {"session_state", to_string(state_)}};
  return e;
}

void Session::new_episode()
{
  sim_ = std::make_unique<Simulation>(config_, mode_);
  log_ = begin_episode(config_, mode_, "live", 0);
  records_.clear();
  held_.axes = Vec2::Zero();
  held_.gripper = 1.0;
  held_.stiffness = config_.device.live_grip_stiffness;
  record_input("initial", last_client_seq_, 0.0, false);
  clamp_pending_ = false;
  sq_sum_ = 0.0;
  sq_count_ = 0;
  collisions_ = 0;
  in_collision_ = false;
  dropped_frames_ = 0;
  last_frame_.reset();
  ++episode_;
}

void Session::record_input(const std::string& source, std::int64_t client_seq, double client_time, bool clamped)
{
  InputRecord r;
  r.step = sim_ ? sim_->steps() : 0;
  r.source = source;
  r.client_seq = client_seq;
  r.client_time_ms = client_time;
  r.clamped = clamped;
  r.frame = held_;
  // a change within the same step replaces the earlier one
  if (!records_.empty() && records_.back().step == r.step)
    records_.back() = r;
  else
    records_.push_back(r);
}

Reply Session::load_scenario(const SessionCommand& cmd)
{
  const nlohmann::json& p = cmd.payload;
  ExperimentConfig cfg = options_.config;
  try {
    if (p.contains("config")) {
      cfg = config_from_json(p["config"]);
    } else if (p.contains("scenario")) {
      cfg.scenario = config_from_json(p["scenario"]).scenario;
    } else if (p.contains("name") && p["name"] != "default") {
      if (!p["name"].is_string() || !safe_name(p["name"].get<std::string>()))
        return ProtocolError{"bad_value", "scenario name must be a plain file stem", cmd.id, nlohmann::json::object()};
      cfg = load_config(options_.scenario_dir / (p["name"].get<std::string>() + ".json"));
    }
    if (options_.simulate_dynamics)
      cfg.device.simulate_dynamics = *options_.simulate_dynamics;
    cfg.validate();
  } catch (const std::exception& e) {
    return ProtocolError{"bad_value", std::string("cannot load scenario: ") + e.what(), cmd.id,
                         nlohmann::json::object()};
  }
  config_ = std::move(cfg);
  state_ = SessionState::loaded;
  new_episode();
  return ack(cmd, {{"scenario", config_.scenario.name}, {"scenario_sha256", scenario_hash(config_.scenario)}});
}

Reply Session::handle(const SessionCommand& cmd)
{
  using S = SessionState;
  switch (cmd.verb) {
  case Verb::load_scenario:
    if (!one_of(state_, {S::idle, S::loaded, S::paused, S::completed}))
      return fail(cmd, "pause the episode before loading a scenario");
    return load_scenario(cmd);
  case Verb::set_mode: {
    if (!one_of(state_, {S::idle, S::loaded}))
      return fail(cmd, "the mode is fixed once an episode has started");
    if (!cmd.payload.contains("mode"))
      return ProtocolError{"missing_field", "set_mode needs payload.mode", cmd.id, nlohmann::json::object()};
    try {
      mode_ = control_mode_from_string(cmd.payload["mode"].get<std::string>());
    } catch (const std::exception& e) {
      return ProtocolError{"bad_value", e.what(), cmd.id, nlohmann::json::object()};
    }
    if (state_ == S::loaded)
      new_episode();
    return ack(cmd, {{"mode", to_string(mode_)}});
  }
  case Verb::start:
    if (!one_of(state_, {S::loaded, S::paused}))
      return fail(cmd, "start needs a loaded or paused episode");
    state_ = S::running;
    return ack(cmd);
  case Verb::pause:
    if (state_ != S::running)
      return fail(cmd, "only a running episode can be paused");
    state_ = S::paused;
    return ack(cmd);
  case Verb::reset:
    if (state_ == S::idle)
      return fail(cmd, "nothing to reset");
    state_ = S::loaded;
    new_episode();
    return ack(cmd);
  case Verb::save_replay: {
    if (!one_of(state_, {S::paused, S::completed}))
      return fail(cmd, "save_replay needs a paused or completed episode");
    std::string name = "session-" + std::to_string(episode_) + "-" + std::to_string(steps());
    if (cmd.payload.contains("name")) {
      if (!cmd.payload["name"].is_string() || !safe_name(cmd.payload["name"].get<std::string>()))
        return ProtocolError{"bad_value", "replay name must be a plain file stem", cmd.id, nlohmann::json::object()};
      name = cmd.payload["name"].get<std::string>();
    }
    try {
      const auto dir = save_replay(name);
      return ack(cmd, {{"replay_id", name}, {"path", dir.string()}, {"steps", steps()}});
    } catch (const std::exception& e) {
      return ProtocolError{"io", e.what(), cmd.id, nlohmann::json::object()};
    }
  }
  }
  return ProtocolError{"bad_value", "unhandled verb", cmd.id, nlohmann::json::object()};
}

bool Session::ingest(const InputFrame& frame)
{
  if (frame.client_seq <= last_client_seq_)
    return false;
  last_client_seq_ = frame.client_seq;
  held_.axes = frame.axes;
  held_.gripper = frame.gripper;
  clamp_pending_ = clamp_pending_ || frame.clamped;
  if (sim_)
    record_input("client", frame.client_seq, frame.client_time_ms, frame.clamped);
  return true;
}

void Session::on_disconnect()
{
  held_.axes = Vec2::Zero();
  if (sim_)
    record_input("failsafe", last_client_seq_, 0.0, false);
  last_client_seq_ = -1;
  if (state_ == SessionState::running)
    state_ = SessionState::paused;
}

std::optional<StateFrame> Session::step()
{
  if (state_ != SessionState::running || !sim_)
    return std::nullopt;
  LogRow row;
  try {
    row = sim_->step(held_);
  } catch (const ControllerFault& e) {
    finish_episode(log_, *sim_, std::string(e.what()));
    state_ = SessionState::completed;
    return std::nullopt;
  }
  log_.rows.push_back(row);
  if (row.collision && !in_collision_)
    ++collisions_;
  in_collision_ = row.collision;
  if (row.area != Area::none) {
    const double d = config_.scenario.path.project(row.x_a).distance;
    sq_sum_ += d * d;
    ++sq_count_;
  }
  if (sim_->done()) {
    finish_episode(log_, *sim_);
    state_ = SessionState::completed;
  }
  if (row.step % options_.steps_per_broadcast != 0)
    return std::nullopt;
  StateFrame f = make_frame(row);
  clamp_pending_ = false;
  last_frame_ = f;
  return f;
}

StateFrame Session::make_frame(const LogRow& row) const
{
  StateFrame f;
  f.seq = row.step / options_.steps_per_broadcast;
  f.t = row.t;
  f.state = state_;
  f.mode = to_string(mode_);
  f.x_a = row.x_a;
  f.x_h = row.x_h;
  f.beta = row.beta;
  f.u_c = row.u_c;
  f.u_b = row.u_b;
  f.u_h = row.u_h;
  f.u_a = row.u_a;
  f.B = row.B;
  f.engaged = row.engaged;
  f.area = row.area;
  f.obstacle = row.obstacle;
  f.obstacle_active = row.obstacle_active;
  f.phi = row.phi;
  f.theta = row.theta;
  f.tau_guidance = row.tau_guidance;
  f.metrics.elapsed_s = row.t;
  f.metrics.collisions = collisions_;
  if (sq_count_ > 0)
    f.metrics.rmse_m = std::sqrt(sq_sum_ / static_cast<double>(sq_count_));
  f.metrics.dropped_frames = dropped_frames_;
  f.last_client_seq = last_client_seq_;
  f.input_clamped = clamp_pending_;
  return f;
}

std::filesystem::path Session::save_replay(const std::string& name)
{
  if (!sim_)
    throw std::runtime_error("no episode to save");
  const auto dir = options_.replay_dir / name;
  EpisodeLog copy = log_;
  if (state_ != SessionState::completed)
    finish_episode(copy, *sim_);
  write_episode(copy, dir);
  save_config(config_, dir / "config.json");
  std::ofstream out(dir / "inputs.jsonl", std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + (dir / "inputs.jsonl").string());
  write_input_records(out, records_);
  return dir;
}

}  // namespace hccbf::teleop
