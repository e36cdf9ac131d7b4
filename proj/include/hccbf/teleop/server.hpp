// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hccbf/teleop/session.hpp"

namespace hccbf::teleop {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  ///< 0 picks a free port
  std::optional<std::filesystem::path> static_dir;  ///< console bundle; a placeholder page otherwise
  SessionOptions session;
  /// Wall-clock pacing. When false the episode runs as fast as the CPU allows
  /// and every broadcast frame is sent.
  bool realtime = true;
};

/// WebSocket endpoint /session plus static files at /.
///
/// A network thread owns the sockets; a simulation thread owns the Session.
/// They exchange only messages: client text in, encoded frames out.
/// One operator connection at a time; further connections are refused with a
/// "busy" error.
class Server {
public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and spawns both threads. Returns the bound port.
  unsigned short start();
  /// Idempotent.
  void stop();
  /// Blocks until SIGINT/SIGTERM or stop().
  void wait_for_shutdown();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Served at / when no static directory is configured.
const std::string& placeholder_page();

/// Content type by file extension.
std::string mime_type(const std::filesystem::path& file);

}  // namespace hccbf::teleop
