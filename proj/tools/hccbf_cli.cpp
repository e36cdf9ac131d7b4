// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
// hccbf: run, compare, verify and sweep scripted episodes, or serve a live session.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hccbf/config.hpp"
#include "hccbf/log_io.hpp"
#include "hccbf/metrics.hpp"
#include "hccbf/operator.hpp"
#include "hccbf/simulation.hpp"
#include "hccbf/teleop/server.hpp"
#include "hccbf/verify.hpp"

namespace fs = std::filesystem;
using namespace hccbf;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailure = 2;
constexpr int kControllerFault = 3;
constexpr int kConfigError = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_out_dir()
{
  if (const char* env = std::getenv("HCCBF_OUT_DIR"); env && *env)
    return env;
  return "runs";
}

ExperimentConfig load_experiment(const std::string& scenario_file)
{
  if (scenario_file.empty())
    return ExperimentConfig{};
  return load_config(scenario_file);
}

struct EpisodeSpec {
  ExperimentConfig config;
  ControlMode mode = ControlMode::proposed;
  std::string operator_spec = "passive";
  std::uint64_t seed = 0;
};

EpisodeLog run_spec(const EpisodeSpec& spec)
{
  ScriptedOperator op(jitter_script(script_by_name(spec.operator_spec), spec.seed), spec.config.scenario,
                      spec.config.device);
  return run_episode(spec.config, spec.mode, op, spec.seed);
}

std::string fmt(const Metric& m)
{
  if (!m)
    return "n/a";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << *m;
  return os.str();
}

void print_summary(const EpisodeLog& log, const fs::path& dir)
{
  const MetricsReport m = compute_metrics(log);
  std::cout << "mode " << to_string(log.header.mode) << ", operator " << log.header.operator_name << ", seed "
            << log.header.seed << "\n"
            << "steps " << log.footer.steps << ", t " << log.footer.completion_time << " s, "
            << (log.footer.completed ? "completed" : "not completed") << ", collisions "
            << log.footer.collision_events << "\n";
  const char* names[] = {"A", "B", "C"};
  for (std::size_t i = 0; i < 3; ++i)
    std::cout << "area " << names[i] << ": rmse " << fmt(m.areas[i].rmse) << " m, time "
              << fmt(m.areas[i].required_time) << " s\n";
  std::cout << "all: rmse " << fmt(m.all.rmse) << " m, time " << fmt(m.all.required_time) << " s\n";
  if (log.footer.fault)
    std::cout << "controller fault: " << *log.footer.fault << "\n";
  std::cout << "log written to " << dir.string() << "\n";
}

int cmd_run(const std::string& scenario, const std::string& mode_name, bool mode_given, const std::string& op,
            std::uint64_t seed, std::string out)
{
  EpisodeLog log;
  if (op.rfind("replay:", 0) == 0) {
    ReplayBundle bundle = load_replay(op.substr(7));
    if (!scenario.empty())
      bundle.config = load_experiment(scenario);
    const ControlMode mode = mode_given ? control_mode_from_string(mode_name) : bundle.mode;
    ReplayOperator replay(std::move(bundle.frames), bundle.label);
    log = run_episode(bundle.config, mode, replay, bundle.seed);
  } else {
    EpisodeSpec spec{load_experiment(scenario), control_mode_from_string(mode_name), op, seed};
    log = run_spec(spec);
  }
  fs::path dir = out.empty() ? default_out_dir() / (log.config.scenario.name + "-" + to_string(log.header.mode) +
                                                    "-" + (op.rfind("replay:", 0) == 0 ? "replay" : op) + "-s" +
                                                    std::to_string(log.header.seed))
                             : fs::path(out);
  write_episode(log, dir);
  print_summary(log, dir);
  return log.footer.fault ? kControllerFault : kOk;
}

int cmd_compare(const std::string& a, const std::string& b, bool json)
{
  const EpisodeLog la = read_episode(a);
  const EpisodeLog lb = read_episode(b);
  Comparison c;
  try {
    c = compare(la, lb);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (json)
    std::cout << to_json(c).dump(2) << "\n";
  else
    std::cout << render_comparison(c);
  return kOk;
}

int cmd_verify(const std::string& path, bool json)
{
  const EpisodeLog log = read_episode(path);
  const VerificationReport r = verify(log);
  if (json)
    std::cout << to_json(r).dump(2) << "\n";
  else
    std::cout << render(r);
  return r.ok() ? kOk : kVerificationFailure;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s)
{
  static const std::regex re(R"((\d+)\.\.(\d+))");
  std::smatch m;
  if (std::regex_match(s, m, re)) {
    const auto lo = std::stoull(m[1]);
    const auto hi = std::stoull(m[2]);
    if (hi < lo)
      throw UsageError("seed range '" + s + "' is empty");
    return {lo, hi};
  }
  if (std::regex_match(s, std::regex(R"(\d+)")))
    return {std::stoull(s), std::stoull(s)};
  throw UsageError("seeds must look like a..b, got '" + s + "'");
}

int cmd_sweep(const std::string& scenario, const std::string& seeds, const std::string& op, unsigned jobs,
              const std::string& out, bool json)
{
  const auto [lo, hi] = parse_seed_range(seeds);
  script_by_name(op);
  const ExperimentConfig cfg = load_experiment(scenario);
  std::vector<EpisodeSpec> specs;
  for (std::uint64_t s = lo; s <= hi; ++s)
    for (const ControlMode m : {ControlMode::proposed, ControlMode::simple_hsc})
      specs.push_back({cfg, m, op, s});

  std::vector<std::optional<EpisodeLog>> logs(specs.size());
  std::atomic<std::size_t> next{0};
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(specs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < specs.size(); k = next++)
        logs[k] = run_spec(specs[k]);
    });
  for (std::thread& t : pool)
    t.join();

  std::vector<MetricsReport> proposed, simple;
  bool fault = false;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const EpisodeLog& log = *logs[k];
    fault = fault || log.footer.fault.has_value();
    (specs[k].mode == ControlMode::proposed ? proposed : simple).push_back(compute_metrics(log));
    if (!out.empty())
      write_episode(log, fs::path(out) / (to_string(specs[k].mode) + "-s" + std::to_string(specs[k].seed)));
  }
  const Comparison c = compare_reports(aggregate(proposed), aggregate(simple), "Proposed", "Simple HSC");
  if (json) {
    nlohmann::json j = to_json(c);
    j["seeds"] = {lo, hi};
    j["operator"] = op;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "operator " << op << ", seeds " << lo << ".." << hi << " (mean per cell)\n";
    std::cout << render_table(c.left, c.right, c.left_label, c.right_label);
    std::cout << "collisions: proposed " << c.left.collisions << ", simple HSC " << c.right.collisions << "\n";
  }
  return fault ? kControllerFault : kOk;
}

int cmd_serve(const std::string& address, unsigned short port, const std::string& static_dir,
              const std::string& scenario, const std::string& mode, const std::string& replay_dir,
              const std::string& scenario_dir, bool device_dynamics)
{
  teleop::ServerOptions opts;
  opts.address = address;
  opts.port = port;
  if (!static_dir.empty())
    opts.static_dir = static_dir;
  opts.session.config = load_experiment(scenario);
  opts.session.mode = control_mode_from_string(mode);
  opts.session.replay_dir = replay_dir.empty() ? default_out_dir() / "replays" : fs::path(replay_dir);
  opts.session.scenario_dir = scenario_dir;
  opts.session.simulate_dynamics = device_dynamics;
  opts.session.config.device.simulate_dynamics = device_dynamics;
  teleop::Server server(opts);
  const unsigned short bound = server.start();
  std::cout << "serving on http://" << address << ":" << bound << "/ (WebSocket /session), replays to "
            << opts.session.replay_dir.string() << std::endl;
  server.wait_for_shutdown();
  return kOk;
}

int cmd_scenario(const std::string& out)
{
  const ExperimentConfig cfg;
  if (out.empty())
    std::cout << to_json(cfg).dump(2) << "\n";
  else
    save_config(cfg, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Human-centred CBF shared control: simulation harness and teleoperation server"};
  app.require_subcommand(1);

  std::string scenario, mode = "proposed", op = "passive", out, seeds = "1..4", log_a, log_b;
  std::uint64_t seed = 1;
  bool json = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "Run one episode and write its log");
  run->add_option("--scenario", scenario, "Config or scenario JSON (default: built-in course)");
  auto* mode_opt = run->add_option("--mode", mode, "proposed | simple-hsc")->capture_default_str();
  run->add_option("--operator", op, "passive | cooperative | opposing-grip | stress | replay:<path>")
      ->capture_default_str();
  run->add_option("--seed", seed, "Operator jitter seed")->capture_default_str();
  run->add_option("--out", out, "Output directory (default: $HCCBF_OUT_DIR or ./runs)");

  auto* cmp = app.add_subcommand("compare", "Compare two logs over the same scenario");
  cmp->add_option("logA", log_a, "First log (directory, .csv or .json)")->required();
  cmp->add_option("logB", log_b, "Second log")->required();
  cmp->add_flag("--json", json, "Machine-readable output");

  auto* ver = app.add_subcommand("verify", "Check the safety invariants of a proposed-mode log");
  ver->add_option("log", log_a, "Log (directory, .csv or .json)")->required();
  ver->add_flag("--json", json, "Machine-readable output");

  auto* sweep = app.add_subcommand("sweep", "Run both modes over a seed range and average per cell");
  sweep->add_option("--seeds", seeds, "Seed range a..b")->capture_default_str();
  sweep->add_option("--scenario", scenario, "Config or scenario JSON");
  sweep->add_option("--operator", op, "Scripted operator")->default_val("cooperative");
  sweep->add_option("--jobs", jobs, "Worker threads");
  sweep->add_option("--out", out, "Write every log under this directory");
  sweep->add_flag("--json", json, "Machine-readable output");

  std::string address = "127.0.0.1", static_dir, replay_dir, scenario_dir = "scenarios";
  unsigned short port = 8080;
  bool device_dynamics = false;
  auto* serve = app.add_subcommand("serve", "Serve a live session over WebSocket /session");
  serve->add_option("--port", port, "TCP port (0 picks one)")->capture_default_str();
  serve->add_option("--address", address, "Bind address")->capture_default_str();
  serve->add_option("--static-dir", static_dir, "Console bundle served at /");
  serve->add_option("--scenario", scenario, "Config loaded by load_scenario without a name");
  serve->add_option("--scenario-dir", scenario_dir, "Where load_scenario looks up names")->capture_default_str();
  serve->add_option("--mode", mode, "Initial mode")->capture_default_str();
  serve->add_option("--replay-dir", replay_dir, "Where save_replay writes (default: $HCCBF_OUT_DIR/replays)");
  serve->add_flag("--device-dynamics", device_dynamics, "Simulate the stick's dynamics instead of direct tilt");

  auto* scen = app.add_subcommand("scenario", "Print or write the built-in configuration");
  scen->add_option("--out", out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run)
      return cmd_run(scenario, mode, mode_opt->count() > 0, op, seed, out);
    if (*cmp)
      return cmd_compare(log_a, log_b, json);
    if (*ver)
      return cmd_verify(log_a, json);
    if (*sweep)
      return cmd_sweep(scenario, seeds, op, jobs, out, json);
    if (*serve)
      return cmd_serve(address, port, static_dir, scenario, mode, replay_dir, scenario_dir, device_dynamics);
    if (*scen)
      return cmd_scenario(out);
  } catch (const ControllerFault& e) {
    std::cerr << "controller fault: " << e.what() << "\n";
    return kControllerFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
