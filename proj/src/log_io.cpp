// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/log_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace hccbf {
namespace {

constexpr int kLogSchemaVersion = 1;

void put(std::string& line, double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
  line.push_back(',');
}

void put(std::string& line, std::int64_t v)
{
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
  line.push_back(',');
}

void put(std::string& line, bool v)
{
  line.push_back(v ? '1' : '0');
  line.push_back(',');
}

void put(std::string& line, const Vec2& v)
{
  put(line, v.x());
  put(line, v.y());
}

class FieldReader {
public:
  explicit FieldReader(const std::string& line) : line_(line) {}

  std::string_view next()
  {
    if (pos_ > line_.size())
      throw std::runtime_error("log row has too few columns");
    const auto comma = line_.find(',', pos_);
    const auto end = comma == std::string::npos ? line_.size() : comma;
    std::string_view out(line_.data() + pos_, end - pos_);
    pos_ = end + 1;
    return out;
  }

  double real()
  {
    const auto f = next();
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
      throw std::runtime_error("bad number '" + std::string(f) + "' in log");
    return v;
  }

  std::int64_t integer()
  {
    const auto f = next();
    std::int64_t v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
      throw std::runtime_error("bad integer '" + std::string(f) + "' in log");
    return v;
  }

  bool flag() { return integer() != 0; }
  Vec2 vec()
  {
    const double x = real();
    return {x, real()};
  }

private:
  const std::string& line_;
  std::size_t pos_ = 0;
};

std::filesystem::path csv_path_of(const std::filesystem::path& where)
{
  if (std::filesystem::is_directory(where))
    return where / "episode.csv";
  if (where.extension() == ".json")
    return std::filesystem::path(where).replace_extension(".csv");
  return where;
}

}  // namespace

const std::vector<std::string>& log_columns()
{
  static const std::vector<std::string> cols = {
      "step",          "t_s",          "area",           "xa_x_m",        "xa_y_m",
      "xh_x_m",        "xh_y_m",       "beta_m",         "beta_dot_mps",  "shrink_limit_mps",
      "alpha_cmd_m",   "uc_x_mps",     "uc_y_mps",       "ub_x_mps",      "ub_y_mps",
      "uh_x_mps",      "uh_y_mps",     "ua_x_mps",       "ua_y_mps",      "B",
      "l_m2",          "I",            "Q",              "J",             "engaged",
      "saturated",     "singular",     "obs_x_m",        "obs_y_m",       "obs_active",
      "collision",     "phi_x_rad",    "phi_y_rad",      "phi_dot_x_radps", "phi_dot_y_radps",
      "theta_rad",     "tau_guid_x_Nm", "tau_guid_y_Nm", "op_axis_x",     "op_axis_y",
      "op_gripper",    "op_stiffness_Nm_per_rad",
  };
  return cols;
}

void write_rows_csv(std::ostream& out, const std::vector<LogRow>& rows)
{
  std::string line;
  for (std::size_t i = 0; i < log_columns().size(); ++i) {
    if (i)
      line.push_back(',');
    line += log_columns()[i];
  }
  out << line << '\n';
  for (const LogRow& r : rows) {
    line.clear();
    put(line, r.step);
    put(line, r.t);
    line += to_string(r.area);
    line.push_back(',');
    put(line, r.x_a);
    put(line, r.x_h);
    put(line, r.beta);
    put(line, r.beta_dot);
    put(line, r.shrink_limit);
    put(line, r.alpha_cmd);
    put(line, r.u_c);
    put(line, r.u_b);
    put(line, r.u_h);
    put(line, r.u_a);
    put(line, r.B);
    put(line, r.l);
    put(line, r.I);
    put(line, r.Q);
    put(line, r.J);
    put(line, r.engaged);
    put(line, r.saturated);
    put(line, r.singular);
    put(line, r.obstacle);
    put(line, r.obstacle_active);
    put(line, r.collision);
    put(line, r.phi);
    put(line, r.phi_dot);
    put(line, r.theta);
    put(line, r.tau_guidance);
    put(line, r.op.axes);
    put(line, r.op.gripper);
    put(line, r.op.stiffness);
    line.back() = '\n';
    out << line;
  }
}

std::vector<LogRow> read_rows_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty log");
  std::string expected;
  for (std::size_t i = 0; i < log_columns().size(); ++i)
    expected += (i ? "," : "") + log_columns()[i];
  if (line != expected)
    throw std::runtime_error("log header does not match the expected columns");

  std::vector<LogRow> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    FieldReader f(line);
    LogRow r;
    r.step = f.integer();
    r.t = f.real();
    r.area = area_from_string(std::string(f.next()));
    r.x_a = f.vec();
    r.x_h = f.vec();
    r.beta = f.real();
    r.beta_dot = f.real();
    r.shrink_limit = f.real();
    r.alpha_cmd = f.real();
    r.u_c = f.vec();
    r.u_b = f.vec();
    r.u_h = f.vec();
    r.u_a = f.vec();
    r.B = f.real();
    r.l = f.real();
    r.I = f.real();
    r.Q = f.real();
    r.J = f.real();
    r.engaged = f.flag();
    r.saturated = f.flag();
    r.singular = f.flag();
    r.obstacle = f.vec();
    r.obstacle_active = f.flag();
    r.collision = f.flag();
    r.phi = f.vec();
    r.phi_dot = f.vec();
    r.theta = f.real();
    r.tau_guidance = f.vec();
    r.op.axes = f.vec();
    r.op.gripper = f.real();
    r.op.stiffness = f.real();
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json sidecar_json(const EpisodeLog& log)
{
  nlohmann::json footer = {
      {"completed", log.footer.completed},
      {"completion_time_s", log.footer.completion_time},
      {"steps", log.footer.steps},
      {"collision_events", log.footer.collision_events},
      {"fault", log.footer.fault ? nlohmann::json(*log.footer.fault) : nlohmann::json(nullptr)},
  };
  return {
      {"schema_version", kLogSchemaVersion},
      {"header",
       {{"config_sha256", log.header.config_sha256},
        {"scenario_sha256", log.header.scenario_sha256},
        {"mode", to_string(log.header.mode)},
        {"operator", log.header.operator_name},
        {"seed", log.header.seed},
        {"dt_s", log.header.dt}}},
      {"config", to_json(log.config)},
      {"footer", footer},
  };
}

void write_episode(const EpisodeLog& log, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "episode.csv", std::ios::binary);
    if (!csv)
      throw std::runtime_error("cannot write " + (dir / "episode.csv").string());
    write_rows_csv(csv, log.rows);
  }
  std::ofstream side(dir / "episode.json", std::ios::binary);
  if (!side)
    throw std::runtime_error("cannot write " + (dir / "episode.json").string());
  side << sidecar_json(log).dump(2) << '\n';
}

EpisodeLog read_episode(const std::filesystem::path& where)
{
  const auto csv_path = csv_path_of(where);
  auto json_path = csv_path;
  json_path.replace_extension(".json");

  std::ifstream side(json_path);
  if (!side)
    throw std::runtime_error("cannot open " + json_path.string());
  nlohmann::json j;
  try {
    side >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed sidecar " + json_path.string() + ": " + e.what());
  }

  EpisodeLog log;
  const auto& h = j.at("header");
  log.header.config_sha256 = h.at("config_sha256").get<std::string>();
  log.header.scenario_sha256 = h.at("scenario_sha256").get<std::string>();
  log.header.mode = control_mode_from_string(h.at("mode").get<std::string>());
  log.header.operator_name = h.value("operator", std::string());
  log.header.seed = h.value("seed", std::uint64_t{0});
  log.header.dt = h.at("dt_s").get<double>();
  log.config = config_from_json(j.at("config"));
  const auto& f = j.at("footer");
  log.footer.completed = f.at("completed").get<bool>();
  log.footer.completion_time = f.at("completion_time_s").get<double>();
  log.footer.steps = f.at("steps").get<std::int64_t>();
  log.footer.collision_events = f.value("collision_events", std::int64_t{0});
  if (!f.at("fault").is_null())
    log.footer.fault = f.at("fault").get<std::string>();

  std::ifstream csv(csv_path);
  if (!csv)
    throw std::runtime_error("cannot open " + csv_path.string());
  log.rows = read_rows_csv(csv);
  return log;
}

std::vector<OperatorFrame> frames_from_rows(const std::vector<LogRow>& rows)
{
  std::vector<OperatorFrame> frames;
  frames.reserve(rows.size());
  for (const LogRow& r : rows)
    frames.push_back(r.op);
  return frames;
}

nlohmann::json to_json(const InputRecord& r)
{
  return {
      {"step", r.step},
      {"source", r.source},
      {"client_seq", r.client_seq},
      {"client_time", r.client_time_ms},
      {"clamped", r.clamped},
      {"axes", {r.frame.axes.x(), r.frame.axes.y()}},
      {"gripper", r.frame.gripper},
      {"stiffness_Nm_per_rad", r.frame.stiffness},
  };
}

InputRecord input_record_from_json(const nlohmann::json& j)
{
  InputRecord r;
  r.step = j.at("step").get<std::int64_t>();
  r.source = j.value("source", std::string("client"));
  r.client_seq = j.value("client_seq", std::int64_t{0});
  r.client_time_ms = j.value("client_time", 0.0);
  r.clamped = j.value("clamped", false);
  const auto& axes = j.at("axes");
  if (!axes.is_array() || axes.size() != 2)
    throw std::runtime_error("input record: axes must be a 2-element array");
  r.frame.axes = Vec2(axes[0].get<double>(), axes[1].get<double>());
  r.frame.gripper = j.at("gripper").get<double>();
  r.frame.stiffness = j.value("stiffness_Nm_per_rad", 0.0);
  return r;
}

void write_input_records(std::ostream& out, const std::vector<InputRecord>& records)
{
  for (const InputRecord& r : records)
    out << to_json(r).dump() << '\n';
}

std::vector<InputRecord> read_input_records(std::istream& in)
{
  std::vector<InputRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    try {
      out.push_back(input_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("input log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<OperatorFrame> frames_from_records(const std::vector<InputRecord>& records, std::int64_t steps,
                                               const OperatorFrame& initial)
{
  std::vector<OperatorFrame> frames;
  frames.reserve(static_cast<std::size_t>(std::max<std::int64_t>(steps, 0)));
  OperatorFrame held = initial;
  std::size_t next = 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    while (next < records.size() && records[next].step <= k)
      held = records[next++].frame;
    frames.push_back(held);
  }
  return frames;
}

ReplayBundle load_replay(const std::filesystem::path& where)
{
  ReplayBundle b;
  const auto inputs = where / "inputs.jsonl";
  if (std::filesystem::is_directory(where) && std::filesystem::exists(inputs)) {
    std::ifstream side(where / "episode.json");
    if (!side)
      throw std::runtime_error("cannot open " + (where / "episode.json").string());
    nlohmann::json j;
    try {
      side >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("malformed sidecar: " + std::string(e.what()));
    }
    b.config = config_from_json(j.at("config"));
    b.mode = control_mode_from_string(j.at("header").at("mode").get<std::string>());
    b.seed = j.at("header").value("seed", std::uint64_t{0});
    std::ifstream in(inputs);
    if (!in)
      throw std::runtime_error("cannot open " + inputs.string());
    b.frames = frames_from_records(read_input_records(in), j.at("footer").at("steps").get<std::int64_t>());
  } else {
    const EpisodeLog log = read_episode(where);
    b.config = log.config;
    b.mode = log.header.mode;
    b.seed = log.header.seed;
    b.frames = frames_from_rows(log.rows);
  }
  b.label = "replay:" + where.string();
  return b;
}

}  // namespace hccbf
