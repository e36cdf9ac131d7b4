// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/teleop/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hccbf::teleop {
namespace {

using nlohmann::json;

constexpr std::array<const char*, 5> kStateNames{"idle", "loaded", "running", "paused", "completed"};
constexpr std::array<const char*, 6> kVerbNames{"load_scenario", "set_mode", "start",
                                                "pause",         "reset",    "save_replay"};

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

std::optional<std::int64_t> seq_hint(const json& j, const char* key)
{
  if (j.is_object() && j.contains(key) && j[key].is_number_integer())
    return j[key].get<std::int64_t>();
  return std::nullopt;
}

ProtocolError error(std::string code, std::string message, std::optional<std::int64_t> seq = std::nullopt)
{
  return {std::move(code), std::move(message), seq, json::object()};
}

double finite_number(const json& v, const char* field)
{
  if (!v.is_number())
    throw std::invalid_argument(std::string(field) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d))
    throw std::invalid_argument(std::string(field) + " must be finite");
  return d;
}

ClientMessage decode_input(const json& j)
{
  const auto seq = seq_hint(j, "client_seq");
  for (const char* key : {"client_seq", "axes", "gripper"})
    if (!j.contains(key))
      return error("missing_field", std::string("input frame lacks '") + key + "'", seq);
  if (!j["client_seq"].is_number_integer())
    return error("bad_value", "client_seq must be an integer", seq);
  const json& axes = j["axes"];
  if (!axes.is_array() || axes.size() != 2)
    return error("bad_value", "axes must be a 2-element array", seq);
  InputFrame f;
  f.client_seq = j["client_seq"].get<std::int64_t>();
  try {
    const Vec2 raw(finite_number(axes[0], "axes"), finite_number(axes[1], "axes"));
    const double grip = finite_number(j["gripper"], "gripper");
    if (j.contains("client_time"))
      f.client_time_ms = finite_number(j["client_time"], "client_time");
    f.axes = raw.cwiseMax(-1.0).cwiseMin(1.0);
    f.gripper = std::clamp(grip, 0.0, 1.0);
    f.clamped = f.axes != raw || f.gripper != grip;
  } catch (const std::invalid_argument& e) {
    return error("bad_value", e.what(), seq);
  }
  return f;
}

ClientMessage decode_command(const json& j)
{
  const auto id = seq_hint(j, "id");
  if (!j.contains("verb"))
    return error("missing_field", "command lacks 'verb'", id);
  if (!j["verb"].is_string())
    return error("bad_value", "verb must be a string", id);
  const auto verb = verb_from_string(j["verb"].get<std::string>());
  if (!verb)
    return error("bad_value", "unknown verb '" + j["verb"].get<std::string>() + "'", id);
  SessionCommand c;
  c.verb = *verb;
  c.id = id;
  if (j.contains("payload")) {
    if (!j["payload"].is_object())
      return error("bad_value", "payload must be an object", id);
    c.payload = j["payload"];
  }
  return c;
}

}  // namespace

std::string to_string(SessionState s) { return kStateNames.at(static_cast<std::size_t>(s)); }

std::string to_string(Verb v) { return kVerbNames.at(static_cast<std::size_t>(v)); }

std::optional<Verb> verb_from_string(const std::string& s)
{
  for (std::size_t i = 0; i < kVerbNames.size(); ++i)
    if (s == kVerbNames[i])
      return static_cast<Verb>(i);
  return std::nullopt;
}

ClientMessage decode_client_message(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return error("parse", e.what());
  }
  if (!j.is_object())
    return error("parse", "message must be a JSON object");
  const auto seq = seq_hint(j, "client_seq") ? seq_hint(j, "client_seq") : seq_hint(j, "id");
  if (!j.contains("schema_version"))
    return error("missing_field", "message lacks 'schema_version'", seq);
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<std::int64_t>() != kSchemaVersion) {
    ProtocolError e = error("version", "unsupported schema_version", seq);
    e.detail = {{"expected", kSchemaVersion}, {"got", j["schema_version"]}};
    return e;
  }
  if (!j.contains("type"))
    return error("missing_field", "message lacks 'type'", seq);
  if (!j["type"].is_string())
    return error("unknown_type", "type must be a string", seq);
  const std::string type = j["type"].get<std::string>();
  if (type == "input")
    return decode_input(j);
  if (type == "command")
    return decode_command(j);
  return error("unknown_type", "clients may send 'input' or 'command', got '" + type + "'", seq);
}

std::string encode(const InputFrame& f)
{
  return json{{"type", "input"},
              {"schema_version", kSchemaVersion},
              {"client_seq", f.client_seq},
              {"axes", vec(f.axes)},
              {"gripper", f.gripper},
              {"client_time", f.client_time_ms}}
      .dump();
}

std::string encode(const SessionCommand& c)
{
  json j{{"type", "command"}, {"schema_version", kSchemaVersion}, {"verb", to_string(c.verb)}, {"payload", c.payload}};
  if (c.id)
    j["id"] = *c.id;
  return j.dump();
}

std::string encode(const ProtocolError& e)
{
  json j{{"type", "error"}, {"schema_version", kSchemaVersion}, {"code", e.code}, {"message", e.message}};
  j["seq"] = e.seq ? json(*e.seq) : json(nullptr);
  for (const auto& [k, v] : e.detail.items())
    j[k] = v;
  return j.dump();
}

std::string encode(const Ack& a)
{
  json j{{"type", "ack"}, {"schema_version", kSchemaVersion}, {"verb", a.verb}, {"session_state", to_string(a.state)}};
  j["id"] = a.id ? json(*a.id) : json(nullptr);
  for (const auto& [k, v] : a.detail.items())
    j[k] = v;
  return j.dump();
}

json to_json(const StateFrame& f)
{
  return {
      {"type", "state"},
      {"schema_version", kSchemaVersion},
      {"seq", f.seq},
      {"t", f.t},
      {"session_state", to_string(f.state)},
      {"mode", f.mode},
      {"x_a", vec(f.x_a)},
      {"x_h", vec(f.x_h)},
      {"beta", f.beta},
      {"u_c", vec(f.u_c)},
      {"u_b", vec(f.u_b)},
      {"u_h", vec(f.u_h)},
      {"u_a", vec(f.u_a)},
      {"B", f.B},
      {"engaged", f.engaged},
      {"area", to_string(f.area)},
      {"obstacle", {{"position", vec(f.obstacle)}, {"active", f.obstacle_active}}},
      {"device", {{"phi", vec(f.phi)}, {"theta", f.theta}, {"tau_guidance", vec(f.tau_guidance)}}},
      {"metrics",
       {{"elapsed_s", f.metrics.elapsed_s},
        {"collisions", f.metrics.collisions},
        {"rmse_m", f.metrics.rmse_m ? json(*f.metrics.rmse_m) : json(nullptr)},
        {"dropped_frames", f.metrics.dropped_frames}}},
      {"input", {{"last_client_seq", f.last_client_seq}, {"clamped", f.input_clamped}}},
  };
}

std::string encode(const StateFrame& f) { return to_json(f).dump(); }

std::string canonical(const std::string& text) { return json::parse(text).dump(); }

}  // namespace hccbf::teleop
