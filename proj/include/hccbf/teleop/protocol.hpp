// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "hccbf/path.hpp"
#include "hccbf/vec.hpp"

namespace hccbf::teleop {

inline constexpr int kSchemaVersion = 1;

/// Session state machine: idle -> loaded -> running <-> paused -> completed.
enum class SessionState { idle, loaded, running, paused, completed };
std::string to_string(SessionState s);

enum class Verb { load_scenario, set_mode, start, pause, reset, save_replay };
std::string to_string(Verb v);
std::optional<Verb> verb_from_string(const std::string& s);

/// Operator input as received. Components are clamped on decode and
/// `clamped` records whether that changed anything.
struct InputFrame {
  std::int64_t client_seq = 0;
  Vec2 axes = Vec2::Zero();  ///< each in [-1, 1]
  double gripper = 1.0;      ///< [0, 1]
  double client_time_ms = 0.0;
  bool clamped = false;
};

struct SessionCommand {
  Verb verb = Verb::start;
  nlohmann::json payload = nlohmann::json::object();
  std::optional<std::int64_t> id;  ///< echoed in the reply
};

/// Error codes: parse, version, missing_field, illegal_state, unknown_type,
/// bad_value, busy, io.
struct ProtocolError {
  std::string code;
  std::string message;
  std::optional<std::int64_t> seq;  ///< client_seq or command id of the offending message
  nlohmann::json detail = nlohmann::json::object();
};

struct Ack {
  std::string verb;
  SessionState state = SessionState::idle;
  std::optional<std::int64_t> id;
  nlohmann::json detail = nlohmann::json::object();
};

struct MetricsSoFar {
  double elapsed_s = 0.0;
  std::int64_t collisions = 0;
  std::optional<double> rmse_m;  ///< over rows inside an area
  std::int64_t dropped_frames = 0;
};

struct StateFrame {
  std::int64_t seq = 0;
  double t = 0.0;
  SessionState state = SessionState::running;
  std::string mode;
  Vec2 x_a = Vec2::Zero();
  Vec2 x_h = Vec2::Zero();
  double beta = 0.0;
  Vec2 u_c = Vec2::Zero();
  Vec2 u_b = Vec2::Zero();
  Vec2 u_h = Vec2::Zero();
  Vec2 u_a = Vec2::Zero();
  double B = 0.0;
  bool engaged = false;
  Area area = Area::none;
  Vec2 obstacle = Vec2::Zero();
  bool obstacle_active = false;
  Vec2 phi = Vec2::Zero();
  double theta = 0.0;
  Vec2 tau_guidance = Vec2::Zero();
  MetricsSoFar metrics;
  std::int64_t last_client_seq = -1;
  bool input_clamped = false;
};

using ClientMessage = std::variant<InputFrame, SessionCommand, ProtocolError>;

/// Never throws; malformed text yields a ProtocolError.
ClientMessage decode_client_message(const std::string& text);

std::string encode(const InputFrame& f);
std::string encode(const SessionCommand& c);
std::string encode(const ProtocolError& e);
std::string encode(const Ack& a);
std::string encode(const StateFrame& f);

nlohmann::json to_json(const StateFrame& f);

/// Re-serialization with keys sorted and no whitespace.
std::string canonical(const std::string& text);

}  // namespace hccbf::teleop
