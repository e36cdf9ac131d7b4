// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "hccbf/teleop/protocol.hpp"

using namespace hccbf;
using namespace hccbf::teleop;
using nlohmann::json;

namespace {

template <class T>
T expect_kind(const ClientMessage& m)
{
  EXPECT_TRUE(std::holds_alternative<T>(m));
  return std::holds_alternative<T>(m) ? std::get<T>(m) : T{};
}

std::string input_text(const json& axes, const json& gripper, std::int64_t seq = 1)
{
  return json{{"type", "input"}, {"schema_version", 1}, {"client_seq", seq}, {"axes", axes}, {"gripper", gripper}}
      .dump();
}

}  // namespace

TEST(Protocol, InputRoundTripIsCanonical)
{
  InputFrame f;
  f.client_seq = 17;
  f.axes = {0.25, -0.5};
  f.gripper = 0.75;
  f.client_time_ms = 1500.0;
  const std::string text = encode(f);
  const InputFrame back = expect_kind<InputFrame>(decode_client_message(text));
  EXPECT_EQ(back.client_seq, 17);
  EXPECT_EQ(back.axes, f.axes);
  EXPECT_EQ(back.gripper, 0.75);
  EXPECT_EQ(back.client_time_ms, 1500.0);
  EXPECT_FALSE(back.clamped);
  EXPECT_EQ(canonical(encode(back)), canonical(text));
}

TEST(Protocol, CommandRoundTripIsCanonical)
{
  SessionCommand c;
  c.verb = Verb::set_mode;
  c.payload = {{"mode", "simple-hsc"}};
  c.id = 4;
  const std::string text = encode(c);
  const SessionCommand back = expect_kind<SessionCommand>(decode_client_message(text));
  EXPECT_EQ(back.verb, Verb::set_mode);
  EXPECT_EQ(back.payload, c.payload);
  EXPECT_EQ(back.id, std::optional<std::int64_t>(4));
  EXPECT_EQ(canonical(encode(back)), canonical(text));
}

TEST(Protocol, OutOfRangeInputIsClampedAndFlagged)
{
  const InputFrame f = expect_kind<InputFrame>(decode_client_message(input_text({2, -3}, 1.5)));
  EXPECT_EQ(f.axes, Vec2(1, -1));
  EXPECT_EQ(f.gripper, 1.0);
  EXPECT_TRUE(f.clamped);
}

TEST(Protocol, WrongVersionNamesBothVersions)
{
  const ProtocolError e =
      expect_kind<ProtocolError>(decode_client_message(R"({"type":"input","schema_version":2,"client_seq":3})"));
  EXPECT_EQ(e.code, "version");
  EXPECT_EQ(e.detail.at("expected"), 1);
  EXPECT_EQ(e.detail.at("got"), 2);
  EXPECT_EQ(e.seq, std::optional<std::int64_t>(3));
}

TEST(Protocol, MissingFieldsAreReported)
{
  EXPECT_EQ(expect_kind<ProtocolError>(decode_client_message(R"({"type":"input"})")).code, "missing_field");
  EXPECT_EQ(expect_kind<ProtocolError>(
                decode_client_message(R"({"type":"input","schema_version":1,"client_seq":1,"axes":[0,0]})"))
                .code,
            "missing_field");
  EXPECT_EQ(expect_kind<ProtocolError>(decode_client_message(R"({"type":"command","schema_version":1})")).code,
            "missing_field");
}

TEST(Protocol, GarbageNeverThrows)
{
  for (const char* text : {"", "{", "[]", "42", "null", R"({"schema_version":"1"})", "\xff\xfe"}) {
    ClientMessage m;
    EXPECT_NO_THROW(m = decode_client_message(text)) << text;
    EXPECT_TRUE(std::holds_alternative<ProtocolError>(m)) << text;
  }
}

TEST(Protocol, UnknownTypeAndVerb)
{
  EXPECT_EQ(expect_kind<ProtocolError>(decode_client_message(R"({"type":"state","schema_version":1})")).code,
            "unknown_type");
  EXPECT_EQ(expect_kind<ProtocolError>(
                decode_client_message(R"({"type":"command","schema_version":1,"verb":"launch","id":9})"))
                .code,
            "bad_value");
}

TEST(Protocol, NonFiniteAndWrongShapesAreBadValues)
{
  EXPECT_EQ(expect_kind<ProtocolError>(decode_client_message(input_text({0}, 0.5))).code, "bad_value");
  EXPECT_EQ(expect_kind<ProtocolError>(decode_client_message(input_text({"a", 0}, 0.5))).code, "bad_value");
  EXPECT_EQ(expect_kind<ProtocolError>(decode_client_message(input_text({0, 0}, nullptr))).code, "bad_value");
}

TEST(Protocol, UnknownFieldsAreIgnored)
{
  json j = json::parse(input_text({0.1, 0.2}, 0.3));
  j["extra"] = {{"nested", true}};
  const InputFrame f = expect_kind<InputFrame>(decode_client_message(j.dump()));
  EXPECT_EQ(f.axes, Vec2(0.1, 0.2));
}

TEST(Protocol, VerbNamesRoundTrip)
{
  for (Verb v : {Verb::load_scenario, Verb::set_mode, Verb::start, Verb::pause, Verb::reset, Verb::save_replay})
    EXPECT_EQ(verb_from_string(to_string(v)), std::optional<Verb>(v));
  EXPECT_FALSE(verb_from_string("stop").has_value());
}

TEST(Protocol, StateFrameCarriesEveryField)
{
  StateFrame f;
  f.seq = 12;
  f.mode = "proposed";
  f.area = Area::B;
  f.x_a = {1, 2};
  f.metrics.rmse_m = 0.25;
  const json j = json::parse(encode(f));
  EXPECT_EQ(j.at("type"), "state");
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("seq"), 12);
  EXPECT_EQ(j.at("area"), "B");
  EXPECT_EQ(j.at("x_a"), json::array({1.0, 2.0}));
  for (const char* k : {"t", "session_state", "x_h", "beta", "u_c", "u_b", "u_h", "u_a", "B", "engaged", "obstacle",
                        "device", "metrics", "input"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j.at("metrics").at("rmse_m"), 0.25);
}

TEST(Protocol, ErrorAndAckEncoding)
{
  const json e = json::parse(encode(ProtocolError{"busy", "taken", std::nullopt, json::object()}));
  EXPECT_EQ(e.at("type"), "error");
  EXPECT_EQ(e.at("code"), "busy");
  EXPECT_TRUE(e.at("seq").is_null());
  const json a = json::parse(encode(Ack{"start", SessionState::running, 3, {{"note", 1}}}));
  EXPECT_EQ(a.at("type"), "ack");
  EXPECT_EQ(a.at("session_state"), "running");
  EXPECT_EQ(a.at("id"), 3);
  EXPECT_EQ(a.at("note"), 1);
}
