// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hccbf/config.hpp"
#include "hccbf/log_io.hpp"
#include "hccbf/simulation.hpp"
#include "hccbf/teleop/protocol.hpp"

namespace hccbf::teleop {

struct SessionOptions {
  ExperimentConfig config;  ///< what load_scenario loads when given no name or document
  ControlMode mode = ControlMode::proposed;
  std::optional<bool> simulate_dynamics;  ///< forced onto every loaded config when set
  std::filesystem::path replay_dir = "replays";
  std::filesystem::path scenario_dir = "scenarios";  ///< where load_scenario looks up names
  int steps_per_broadcast = 10;                      ///< 2 ms steps, 50 Hz frames
};

using Reply = std::variant<Ack, ProtocolError>;

/// The live episode. Single-threaded: the owner serialises every call.
///
/// Inputs are sample-and-hold: the latest accepted InputFrame applies to every
/// step until the next one arrives.
class Session {
public:
  explicit Session(SessionOptions options = {});

  SessionState state() const { return state_; }
  ControlMode mode() const { return mode_; }
  const ExperimentConfig& config() const { return config_; }
  const EpisodeLog& log() const { return log_; }
  const std::vector<InputRecord>& input_records() const { return records_; }
  std::int64_t steps() const { return sim_ ? sim_->steps() : 0; }
  std::int64_t dropped_frames() const { return dropped_frames_; }
  std::optional<StateFrame> last_frame() const { return last_frame_; }
  OperatorFrame held_input() const { return held_; }

  Reply handle(const SessionCommand& cmd);

  /// False when the frame is stale (client_seq not above the last accepted one).
  bool ingest(const InputFrame& frame);

  /// Fail-safe for a lost client: axes zeroed, gripper held, running episode paused.
  void on_disconnect();

  /// Advances one step when running. Returns the frame to broadcast when the
  /// step lands on a broadcast boundary.
  std::optional<StateFrame> step();

  void count_dropped_frames(std::int64_t n) { dropped_frames_ += n; }

  /// Writes episode.csv, episode.json, config.json and inputs.jsonl into
  /// replay_dir/<name>; returns the directory.
  std::filesystem::path save_replay(const std::string& name);

private:
  void new_episode();
  Reply fail(const SessionCommand& cmd, const std::string& message) const;
  Ack ack(const SessionCommand& cmd, nlohmann::json detail = nlohmann::json::object()) const;
  Reply load_scenario(const SessionCommand& cmd);
  StateFrame make_frame(const LogRow& row) const;
  void record_input(const std::string& source, std::int64_t client_seq, double client_time, bool clamped);

  SessionOptions options_;
  ExperimentConfig config_;
  ControlMode mode_;
  SessionState state_ = SessionState::idle;
  std::unique_ptr<Simulation> sim_;
  EpisodeLog log_;
  std::vector<InputRecord> records_;
  OperatorFrame held_;
  std::int64_t last_client_seq_ = -1;
  bool clamp_pending_ = false;
  std::int64_t dropped_frames_ = 0;
  std::int64_t episode_ = 0;
  double sq_sum_ = 0.0;
  std::int64_t sq_count_ = 0;
  std::int64_t collisions_ = 0;
  bool in_collision_ = false;
  std::optional<StateFrame> last_frame_;
};

}  // namespace hccbf::teleop
