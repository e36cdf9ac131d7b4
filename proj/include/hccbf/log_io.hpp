// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hccbf/simulation.hpp"

namespace hccbf {

/// CSV header row; every column name carries its unit.
const std::vector<std::string>& log_columns();

/// Doubles are written in shortest round-trip form so a persisted log reloads
/// bit-for-bit.
void write_rows_csv(std::ostream& out, const std::vector<LogRow>& rows);
std::vector<LogRow> read_rows_csv(std::istream& in);

nlohmann::json sidecar_json(const EpisodeLog& log);

/// Writes <dir>/episode.csv and <dir>/episode.json.
void write_episode(const EpisodeLog& log, const std::filesystem::path& dir);

/// Accepts the directory, the .csv or the .json of a written episode.
/// Throws std::runtime_error on I/O or format errors.
EpisodeLog read_episode(const std::filesystem::path& where);

/// Operator frames recorded in a log, one per step.
std::vector<OperatorFrame> frames_from_rows(const std::vector<LogRow>& rows);

/// One change of the held operator input, effective from `step` on.
struct InputRecord {
  std::int64_t step = 0;
  std::string source = "client";  ///< "client" or "failsafe"
  std::int64_t client_seq = 0;
  double client_time_ms = 0.0;
  bool clamped = false;
  OperatorFrame frame;
};

nlohmann::json to_json(const InputRecord& r);
InputRecord input_record_from_json(const nlohmann::json& j);

/// JSON lines, one record per line.
void write_input_records(std::ostream& out, const std::vector<InputRecord>& records);
std::vector<InputRecord> read_input_records(std::istream& in);

/// Sample-and-hold expansion to one frame per step. Steps before the first
/// record use `initial`.
std::vector<OperatorFrame> frames_from_records(const std::vector<InputRecord>& records, std::int64_t steps,
                                               const OperatorFrame& initial = {});

/// Everything needed to re-run a recorded episode offline.
struct ReplayBundle {
  ExperimentConfig config;
  ControlMode mode = ControlMode::proposed;
  std::uint64_t seed = 0;
  std::vector<OperatorFrame> frames;
  std::string label;
};

/// A directory holding inputs.jsonl (a saved live session) is expanded from its
/// input records; anything else is read as an episode and its logged frames used.
ReplayBundle load_replay(const std::filesystem::path& where);

}  // namespace hccbf
