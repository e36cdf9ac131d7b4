// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/teleop/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace hccbf::teleop {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

struct Inbound {
  enum class Kind { connect, text, disconnect } kind;
  std::uint64_t conn;
  std::string text;
};

/// Client-to-simulation queue.
class Inbox {
public:
  void push(Inbound m)
  {
    {
      std::lock_guard lock(mu_);
      q_.push_back(std::move(m));
    }
    cv_.notify_one();
  }

  template <class Clock, class Dur>
  std::deque<Inbound> drain_until(const std::chrono::time_point<Clock, Dur>& deadline)
  {
    std::unique_lock lock(mu_);
    cv_.wait_until(lock, deadline, [this] { return !q_.empty() || closed_; });
    std::deque<Inbound> out;
    out.swap(q_);
    return out;
  }

  void close()
  {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const
  {
    std::lock_guard lock(mu_);
    return closed_;
  }

private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Inbound> q_;
  bool closed_ = false;
};

}  // namespace

const std::string& placeholder_page()
{
  static const std::string page = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>hccbf teleop</title></head>
<body>
<h1>hccbf teleop server</h1>
<p>No console bundle is being served. Connect a WebSocket client to <code>/session</code>
or start the server with <code>--static-dir</code> pointing at a built console.</p>
</body></html>
)";
  return page;
}

std::string mime_type(const std::filesystem::path& file)
{
  static const std::map<std::string, std::string> types{
      {".html", "text/html; charset=utf-8"}, {".htm", "text/html; charset=utf-8"},
      {".js", "text/javascript"},            {".mjs", "text/javascript"},
      {".css", "text/css"},                  {".json", "application/json"},
      {".svg", "image/svg+xml"},             {".png", "image/png"},
      {".ico", "image/x-icon"},              {".map", "application/json"},
      {".wasm", "application/wasm"},         {".txt", "text/plain; charset=utf-8"},
  };
  const auto it = types.find(file.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

struct Server::Impl {
  class WsConnection;
  class HttpConnection;

  ServerOptions options;
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::thread net_thread;
  std::thread sim_thread;
  Inbox inbox;
  std::atomic<bool> running{false};
  std::mutex stop_mu;
  std::condition_variable stop_cv;
  bool stopped = false;

  // network thread only
  std::map<std::uint64_t, std::weak_ptr<WsConnection>> connections;
  std::uint64_t next_id = 1;
  std::uint64_t operator_id = 0;

  explicit Impl(ServerOptions o) : options(std::move(o)) {}

  void accept();
  void send(std::uint64_t conn, std::string text);
  void simulate();
  std::optional<std::string> read_static(const std::string& target, std::string& type) const;
};

class Server::Impl::WsConnection : public std::enable_shared_from_this<WsConnection> {
public:
  WsConnection(Impl& server, tcp::socket socket, std::uint64_t id)
      : server_(server), ws_(std::move(socket)), id_(id)
  {
  }

  void run(http::request<http::string_body> req, bool busy)
  {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this(), busy](beast::error_code ec) {
      if (ec)
        return;
      if (busy) {
        self->refuse();
        return;
      }
      self->server_.inbox.push({Inbound::Kind::connect, self->id_, {}});
      self->read();
    });
  }

  void send(std::string text)
  {
    if (closing_)
      return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1)
      write();
  }

  void close()
  {
    if (closing_)
      return;
    closing_ = true;
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
  }

private:
  void refuse()
  {
    ProtocolError e{"busy", "another operator is connected", std::nullopt, nlohmann::json::object()};
    auto text = std::make_shared<std::string>(encode(e));
    ws_.text(true);
    ws_.async_write(net::buffer(*text), [self = shared_from_this(), text](beast::error_code, std::size_t) {
      self->close();
    });
  }

  void read()
  {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->finish();
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.inbox.push({Inbound::Kind::text, self->id_, std::move(text)});
      self->read();
    });
  }

  void write()
  {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->outbox_.clear();
        return;
      }
      self->outbox_.pop_front();
      if (!self->outbox_.empty())
        self->write();
    });
  }

  void finish()
  {
    if (finished_)
      return;
    finished_ = true;
    server_.connections.erase(id_);
    if (server_.operator_id == id_) {
      server_.operator_id = 0;
      server_.inbox.push({Inbound::Kind::disconnect, id_, {}});
    }
  }

  Impl& server_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::uint64_t id_;
  bool closing_ = false;
  bool finished_ = false;
};

class Server::Impl::HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
  HttpConnection(Impl& server, tcp::socket socket) : server_(server), stream_(std::move(socket)) {}

  void run() { read(); }

private:
  void read()
  {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec)
        return;
      self->dispatch();
    });
  }

  void dispatch()
  {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() != "/session") {
        respond(http::status::not_found, "text/plain", "no WebSocket endpoint here; use /session\n");
        return;
      }
      stream_.expires_never();
      const std::uint64_t id = server_.next_id++;
      const bool busy = server_.operator_id != 0;
      auto ws = std::make_shared<WsConnection>(server_, stream_.release_socket(), id);
      if (!busy) {
        server_.operator_id = id;
        server_.connections[id] = ws;
      }
      ws->run(std::move(req_), busy);
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain", "GET only\n");
      return;
    }
    std::string type;
    const auto body = server_.read_static(std::string(req_.target()), type);
    if (!body) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    respond(http::status::ok, type, *body);
  }

  void respond(http::status status, const std::string& type, std::string body)
  {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::server, "hccbf");
    res->set(http::field::content_type, type);
    res->keep_alive(req_.keep_alive());
    if (req_.method() == http::verb::head) {
      res->content_length(body.size());
    } else {
      res->body() = std::move(body);
      res->prepare_payload();
    }
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec)
        return;
      if (res->keep_alive())
        self->read();
      else
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  Impl& server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

std::optional<std::string> Server::Impl::read_static(const std::string& target, std::string& type) const
{
  std::string path = target.substr(0, target.find('?'));
  if (path.empty() || path.front() != '/' || path.find("..") != std::string::npos)
    return std::nullopt;
  if (!options.static_dir) {
    if (path != "/" && path != "/index.html")
      return std::nullopt;
    type = "text/html; charset=utf-8";
    return placeholder_page();
  }
  if (path.back() == '/')
    path += "index.html";
  const std::filesystem::path file = *options.static_dir / path.substr(1);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec))
    return std::nullopt;
  std::ifstream in(file, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  type = mime_type(file);
  return os.str();
}

void Server::Impl::accept()
{
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec)
      return;
    std::make_shared<HttpConnection>(*this, std::move(socket))->run();
    accept();
  });
}

void Server::Impl::send(std::uint64_t conn, std::string text)
{
  net::post(ioc, [this, conn, text = std::move(text)]() mutable {
    const auto it = connections.find(conn);
    if (it == connections.end())
      return;
    if (auto ws = it->second.lock())
      ws->send(std::move(text));
  });
}

void Server::Impl::simulate()
{
  using Clock = std::chrono::steady_clock;
  Session session(options.session);
  const int per_frame = options.session.steps_per_broadcast;
  const auto dt = std::chrono::duration<double>(session.config().integrator.dt);
  const auto period = std::chrono::duration_cast<Clock::duration>(dt * per_frame);
  std::uint64_t client = 0;
  Clock::time_point anchor{};
  std::int64_t anchor_steps = 0;
  bool was_running = false;

  const auto reply = [&](std::uint64_t conn, const std::string& text) {
    if (conn != 0)
      send(conn, text);
  };

  while (!inbox.closed()) {
    auto deadline = Clock::now() + period;
    if (was_running)
      deadline = options.realtime ? Clock::now() + period / 4 : Clock::now();
    for (Inbound& m : inbox.drain_until(deadline)) {
      switch (m.kind) {
      case Inbound::Kind::connect: {
        client = m.conn;
        Ack hello{"hello", session.state(), std::nullopt, {{"mode", to_string(session.mode())}}};
        reply(client, encode(hello));
        break;
      }
      case Inbound::Kind::disconnect:
        if (m.conn == client) {
          session.on_disconnect();
          client = 0;
        }
        break;
      case Inbound::Kind::text: {
        const ClientMessage msg = decode_client_message(m.text);
        if (const auto* in = std::get_if<InputFrame>(&msg)) {
          session.ingest(*in);
        } else if (const auto* cmd = std::get_if<SessionCommand>(&msg)) {
          const Reply r = session.handle(*cmd);
          reply(m.conn, std::holds_alternative<Ack>(r) ? encode(std::get<Ack>(r)) : encode(std::get<ProtocolError>(r)));
        } else {
          reply(m.conn, encode(std::get<ProtocolError>(msg)));
        }
        break;
      }
      }
    }

    const bool running_now = session.state() == SessionState::running;
    if (running_now && !was_running) {
      anchor = Clock::now();
      anchor_steps = session.steps();
    }
    was_running = running_now;
    if (!running_now)
      continue;

    std::int64_t target = session.steps() + per_frame;
    if (options.realtime) {
      const auto elapsed = std::chrono::duration<double>(Clock::now() - anchor);
      target = anchor_steps + static_cast<std::int64_t>(elapsed / dt);
    }
    std::optional<StateFrame> latest;
    std::int64_t frames = 0;
    while (session.steps() < target && session.state() == SessionState::running) {
      if (auto f = session.step()) {
        latest = std::move(f);
        ++frames;
      }
    }
    if (frames > 1)
      session.count_dropped_frames(frames - 1);
    if (latest)
      reply(client, encode(*latest));
    if (session.state() == SessionState::completed) {
      const auto& footer = session.log().footer;
      Ack done{"completed", session.state(), std::nullopt,
               {{"completed", footer.completed},
                {"steps", footer.steps},
                {"completion_time_s", footer.completion_time},
                {"collision_events", footer.collision_events},
                {"fault", footer.fault ? nlohmann::json(*footer.fault) : nlohmann::json(nullptr)}}};
      reply(client, encode(done));
      was_running = false;
    }
  }
}

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start()
{
  Impl& s = *impl_;
  if (s.running.exchange(true))
    return s.acceptor.local_endpoint().port();
  const tcp::endpoint ep(net::ip::make_address(s.options.address), s.options.port);
  s.acceptor.open(ep.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(ep);
  s.acceptor.listen();
  s.accept();
  s.sim_thread = std::thread([&s] { s.simulate(); });
  s.net_thread = std::thread([&s] { s.ioc.run(); });
  return s.acceptor.local_endpoint().port();
}

void Server::stop()
{
  Impl& s = *impl_;
  if (!s.running.exchange(false))
    return;
  s.inbox.close();
  net::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
    for (auto& [id, weak] : s.connections)
      if (auto ws = weak.lock())
        ws->close();
  });
  if (s.sim_thread.joinable())
    s.sim_thread.join();
  // let the close handshakes go out before the loop is torn down
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  s.ioc.stop();
  if (s.net_thread.joinable())
    s.net_thread.join();
  {
    std::lock_guard lock(s.stop_mu);
    s.stopped = true;
  }
  s.stop_cv.notify_all();
}

void Server::wait_for_shutdown()
{
  Impl& s = *impl_;
  net::io_context signals_ctx;
  net::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([this](beast::error_code, int) { stop(); });
  std::thread waiter([&signals_ctx] { signals_ctx.run(); });
  {
    std::unique_lock lock(s.stop_mu);
    s.stop_cv.wait(lock, [&s] { return s.stopped; });
  }
  signals_ctx.stop();
  waiter.join();
}

}  // namespace hccbf::teleop
