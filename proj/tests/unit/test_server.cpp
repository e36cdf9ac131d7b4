// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "hccbf/teleop/server.hpp"

using namespace hccbf;
using namespace hccbf::teleop;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

http::response<http::string_body> get(unsigned short port, const std::string& target)
{
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  beast::tcp_stream stream(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(stream, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(stream, buf, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return res;
}

class Client {
public:
  explicit Client(unsigned short port) : ws_(ioc_)
  {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/session");
  }

  json read()
  {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

  /// Reads until a message satisfies `pred`, at most `limit` messages.
  json read_until(const std::function<bool(const json&)>& pred, int limit = 100000)
  {
    for (int i = 0; i < limit; ++i) {
      json m = read();
      if (pred(m))
        return m;
    }
    return nullptr;
  }

  void send(const json& j) { ws_.write(net::buffer(j.dump())); }

  void command(const std::string& verb, json payload = json::object())
  {
    send({{"type", "command"}, {"schema_version", 1}, {"verb", verb}, {"payload", payload}, {"id", ++id_}});
  }

  void close()
  {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
  int id_ = 0;
};

bool is_ack(const json& m, const std::string& verb) { return m.value("type", "") == "ack" && m.value("verb", "") == verb; }

ServerOptions fast_options(const std::string& tag)
{
  ServerOptions o;
  o.port = 0;
  o.realtime = false;
  o.session.replay_dir = std::filesystem::temp_directory_path() / ("hccbf_server_" + tag);
  o.session.config.scenario = straight_scenario({0, 0}, {3, 0});
  return o;
}

}  // namespace

TEST(Server, ServesThePlaceholderPage)
{
  Server server(fast_options("page"));
  const unsigned short port = server.start();
  ASSERT_NE(port, 0);
  const auto res = get(port, "/");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res.body(), placeholder_page());
  EXPECT_EQ(get(port, "/nope.js").result(), http::status::not_found);
  server.stop();
}

TEST(Server, ServesStaticFilesAndRejectsTraversal)
{
  const auto dir = std::filesystem::temp_directory_path() / "hccbf_static";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<html>console</html>";
  std::ofstream(dir / "app.js") << "let x = 1;";
  ServerOptions o = fast_options("static");
  o.static_dir = dir;
  Server server(o);
  const unsigned short port = server.start();
  EXPECT_EQ(get(port, "/").body(), "<html>console</html>");
  const auto js = get(port, "/app.js");
  EXPECT_EQ(js.body(), "let x = 1;");
  EXPECT_EQ(js[http::field::content_type], "text/javascript");
  EXPECT_NE(get(port, "/../secret").result(), http::status::ok);
  server.stop();
}

TEST(Server, RunsAnEpisodeOverTheSocket)
{
  Server server(fast_options("episode"));
  const unsigned short port = server.start();
  Client c(port);
  EXPECT_TRUE(is_ack(c.read(), "hello"));
  c.command("load_scenario");
  EXPECT_TRUE(is_ack(c.read_until([](const json& m) { return m.value("type", "") == "ack"; }), "load_scenario"));
  c.send({{"type", "input"}, {"schema_version", 1}, {"client_seq", 1}, {"axes", {0.0, 0.0}}, {"gripper", 1.0}});
  c.command("start");
  const json state = c.read_until([](const json& m) { return m.value("type", "") == "state"; });
  ASSERT_TRUE(state.is_object());
  EXPECT_EQ(state.at("schema_version"), 1);
  EXPECT_EQ(state.at("mode"), "proposed");
  const json done = c.read_until([](const json& m) { return is_ack(m, "completed"); });
  ASSERT_TRUE(done.is_object());
  EXPECT_EQ(done.at("session_state"), "completed");
  c.command("save_replay", {{"name", "over-the-wire"}});
  const json saved = c.read_until([](const json& m) { return is_ack(m, "save_replay"); });
  ASSERT_TRUE(saved.is_object());
  EXPECT_TRUE(std::filesystem::exists(saved.at("path").get<std::string>() + "/inputs.jsonl"));
  c.close();
  server.stop();
}

TEST(Server, MalformedMessagesGetErrors)
{
  Server server(fast_options("errors"));
  const unsigned short port = server.start();
  Client c(port);
  c.read();
  c.send(json{{"type", "input"}, {"schema_version", 7}, {"client_seq", 2}});
  const json e = c.read_until([](const json& m) { return m.value("type", "") == "error"; });
  EXPECT_EQ(e.at("code"), "version");
  c.command("pause");
  EXPECT_EQ(c.read_until([](const json& m) { return m.value("type", "") == "error"; }).at("code"), "illegal_state");
  c.close();
  server.stop();
}

TEST(Server, SecondOperatorIsRefused)
{
  Server server(fast_options("busy"));
  const unsigned short port = server.start();
  Client first(port);
  first.read();
  Client second(port);
  const json m = second.read();
  EXPECT_EQ(m.at("type"), "error");
  EXPECT_EQ(m.at("code"), "busy");
  first.close();
  server.stop();
}

TEST(Server, StopIsIdempotent)
{
  Server server(fast_options("stop"));
  server.start();
  server.stop();
  server.stop();
}

TEST(Server, RealtimeFramesArriveAtTheBroadcastRate)
{
  ServerOptions o = fast_options("realtime");
  o.realtime = true;
  o.session.config.scenario = straight_scenario({0, 0}, {30, 0});
  Server server(o);
  const unsigned short port = server.start();
  Client c(port);
  c.read();
  c.command("load_scenario");
  c.command("start");
  c.read_until([](const json& m) { return m.value("type", "") == "state"; });
  const auto t0 = std::chrono::steady_clock::now();
  double t_first = -1, t_last = 0;
  int frames = 0;
  while (std::chrono::steady_clock::now() - t0 < std::chrono::milliseconds(500)) {
    const json m = c.read();
    if (m.value("type", "") != "state")
      continue;
    if (t_first < 0)
      t_first = m.at("t").get<double>();
    t_last = m.at("t").get<double>();
    ++frames;
  }
  // simulated time keeps pace with the wall clock
  EXPECT_NEAR(t_last - t_first, 0.5, 0.15);
  EXPECT_GT(frames, 15);
  c.close();
  server.stop();
}

TEST(Server, MimeTypes)
{
  EXPECT_EQ(mime_type("a.html").rfind("text/html", 0), 0u);
  EXPECT_EQ(mime_type("a.css").rfind("text/css", 0), 0u);
  EXPECT_EQ(mime_type("a.json").rfind("application/json", 0), 0u);
}
