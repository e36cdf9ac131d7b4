// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "hccbf/cbf.hpp"
#include "hccbf/dynamics.hpp"
#include "hccbf/log_io.hpp"
#include "hccbf/metrics.hpp"
#include "hccbf/operator.hpp"
#include "hccbf/simulation.hpp"
#include "hccbf/teleop/server.hpp"
#include "hccbf/verify.hpp"
#include "oracles.hpp"

using namespace hccbf;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const PlantDescriptor kPlant = single_integrator();

EpisodeLog episode(const std::string& script, ControlMode mode, std::uint64_t seed,
                   const ExperimentConfig& cfg = ExperimentConfig{})
{
  ScriptedOperator op(jitter_script(script_by_name(script), seed), cfg.scenario, cfg.device);
  return run_episode(cfg, mode, op, seed);
}

std::string csv_of(const EpisodeLog& log)
{
  std::ostringstream s;
  write_rows_csv(s, log.rows);
  return s.str();
}

// 1: analytic barrier derivatives against the scalar finite-difference oracle
Outcome barrier_correctness()
{
  const auto t0 = Clock::now();
  oracle::Gen gen(2026);
  double worst = 0.0;
  int states = 0;
  while (states < 10000) {
    const double alpha = gen.uniform(0.2, 4.0);
    const Vec2 x_h(gen.uniform(-5, 5), gen.uniform(-5, 5));
    const double r = gen.uniform(0.0, 2.0 * alpha);
    const double ang = gen.uniform(-M_PI, M_PI);
    const Vec2 x_a = x_h + r * Vec2(std::cos(ang), std::sin(ang));
    const double l = alpha * alpha - r * r;
    if (std::abs(l) < 1e-3 * alpha * alpha)
      continue;
    const BarrierEval e = barrier_gradients(x_a, x_h, alpha);
    const oracle::Gradient g = oracle::gradient_fd(x_a.x(), x_a.y(), x_h.x(), x_h.y(), alpha);
    // components far below the gradient's magnitude are compared on that scale
    const double scale = std::max({e.grad_xa.norm(), std::abs(e.dB_dalpha), 1e-300});
    auto err = [&](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6 * scale}); };
    worst = std::max({worst, err(e.grad_xa.x(), g.gx), err(e.grad_xa.y(), g.gy), err(e.dB_dalpha, g.ga)});
    ++states;
  }
  // branch values either side of l = 0
  const double alpha = 2.0;
  const double s_out = 4.0 * (1.0 + 1e-9);
  const double s_in = 4.0 * (1.0 - 1e-6);
  const double l_in = alpha * alpha - s_in;
  const double b_out = barrier_value({std::sqrt(s_out), 0}, {0, 0}, alpha).B;
  const double b_in = barrier_value({std::sqrt(s_in), 0}, {0, 0}, alpha).B;
  const bool branches = std::abs(b_out - s_out) <= 1e-12 * s_out &&
                        std::abs(b_in - s_in * s_in * s_in / (l_in * l_in)) <= 1e-6 * b_in &&
                        barrier_value({2, 0}, {0, 0}, alpha).B == 4.0;
  const double elapsed = seconds_since(t0);
  const bool ok = worst < 1e-6 && branches && elapsed < 5.0;
  return {ok, fmt("max rel err %.2e over %d states, branch values %s, %.2f s", worst, states,
                  branches ? "match" : "MISMATCH", elapsed)};
}

// 2: filter identities over random states
Outcome filter_identities()
{
  oracle::Gen gen(7);
  CbfParams p;
  std::int64_t idle = 0, idle_bad = 0, engaged = 0;
  double worst_identity = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double alpha = gen.uniform(0.0, 4.0);
    const Vec2 x_h(gen.uniform(-3, 3), gen.uniform(-3, 3));
    const Vec2 x_a = x_h + Vec2(gen.uniform(-5, 5), gen.uniform(-5, 5));
    const Vec2 u_c(gen.uniform(-2, 2), gen.uniform(-2, 2));
    const Vec2 xh_dot(gen.uniform(-2, 2), gen.uniform(-2, 2));
    const FilterOutput out = human_centered_filter(x_a, x_h, alpha, gen.uniform(-2, 2), u_c, xh_dot, kPlant, p);
    if (out.diag.I <= out.diag.Q) {
      ++idle;
      if (out.u_b.x() != 0.0 || out.u_b.y() != 0.0)
        ++idle_bad;
    } else if (!out.diag.saturated && !out.diag.singular) {
      ++engaged;
      const double lgb_ub = out.barrier.grad_xa.dot(out.u_b);
      const double lhs = out.diag.I + lgb_ub + out.diag.J;
      const double scale = std::max({1.0, std::abs(out.diag.I), std::abs(out.diag.J), std::abs(out.diag.Q)});
      worst_identity = std::max(worst_identity, std::abs(lhs - out.diag.Q) / scale);
    }
  }

  double worst_interior = 0.0;
  bool j_zero = true;
  p.u_b_cap = 1e300;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = gen.uniform(0.5, 4.0);
    const Vec2 x_h(gen.uniform(-3, 3), gen.uniform(-3, 3));
    const double r = alpha * std::sqrt(gen.uniform(0.0, 0.98));
    const double ang = gen.uniform(-M_PI, M_PI);
    const Vec2 x_a = x_h + r * Vec2(std::cos(ang), std::sin(ang));
    const Vec2 u_c(gen.uniform(-2, 2), gen.uniform(-2, 2));
    const FilterOutput ours = human_centered_filter(x_a, x_h, alpha, 0.0, u_c, Vec2::Zero(), kPlant, p);
    j_zero = j_zero && ours.diag.J == 0.0;
    TimeVaryingBarrier b;
    b.value = [&](const Vec2& x, double) { return barrier_value(x, x_h, alpha).B; };
    b.gradient = [&](const Vec2& x, double) { return barrier_gradients(x, x_h, alpha).grad_xa; };
    b.time_derivative = [](const Vec2&, double) { return 0.0; };
    b.threshold = [&](const Vec2& x, double) { return compute_Q(barrier_gradients(x, x_h, alpha), alpha, 0.0, p); };
    const Vec2 theirs = baseline_assist_filter(x_a, u_c, 0.0, b, kPlant, p);
    worst_interior = std::max(worst_interior, (ours.u_b - theirs).cwiseAbs().maxCoeff());
  }
  const bool ok = idle_bad == 0 && j_zero && worst_interior < 1e-12 && worst_identity < 1e-9 && idle > 0 &&
                  engaged > 0;
  return {ok, fmt("(a) %lld/%lld idle states nonzero; (b) J=0 %s, max diff %.2e; (c) max residual %.2e over %lld "
                  "engaged",
                  static_cast<long long>(idle_bad), static_cast<long long>(idle), j_zero ? "yes" : "NO",
                  worst_interior, worst_identity, static_cast<long long>(engaged))};
}

struct EpisodeSet {
  std::vector<EpisodeLog> logs;
  double seconds = 0.0;
};

const EpisodeSet& invariance_episodes()
{
  static const EpisodeSet set = [] {
    EpisodeSet s;
    const auto t0 = Clock::now();
    std::vector<std::future<EpisodeLog>> jobs;
    for (const char* script : {"passive", "cooperative"})
      for (std::uint64_t seed = 1; seed <= 3; ++seed)
        jobs.push_back(std::async(std::launch::async, [script, seed] {
          return episode(script, ControlMode::proposed, seed);
        }));
    for (auto& j : jobs)
      s.logs.push_back(j.get());
    s.seconds = seconds_since(t0);
    return s;
  }();
  return set;
}

// 3: discrete barrier bound over full proposed-mode episodes
Outcome definition_bound()
{
  const EpisodeSet& set = invariance_episodes();
  std::int64_t checked = 0, violations = 0, steps = 0, excluded = 0;
  for (const EpisodeLog& log : set.logs) {
    const VerificationReport rep = verify(log);
    const CheckResult* c = rep.find("barrier_bound");
    checked += c->checked;
    violations += c->violation_count;
    steps += static_cast<std::int64_t>(log.rows.size());
    excluded += rep.excluded_saturated + rep.excluded_singular + rep.excluded_branch_transition;
  }
  const bool ok = violations == 0 && checked > 0 && set.seconds < 10.0;
  return {ok, fmt("%lld violations over %lld checked steps (%lld excluded) in 6 episodes, %lld steps, %.2f s",
                  static_cast<long long>(violations), static_cast<long long>(checked),
                  static_cast<long long>(excluded), static_cast<long long>(steps), set.seconds)};
}

// 4: containment, including the gripper-slam stress episode
Outcome forward_invariance()
{
  std::vector<EpisodeLog> logs = invariance_episodes().logs;
  logs.push_back(episode("stress", ControlMode::proposed, 1));
  double worst = -1e300;
  std::int64_t violations = 0;
  for (const EpisodeLog& log : logs) {
    for (const LogRow& r : log.rows)
      worst = std::max(worst, (r.x_h - r.x_a).norm() - r.beta);
    violations += verify(log).find("containment")->violation_count;
  }
  const EpisodeLog& stress = logs.back();
  double min_beta = 1e300;
  for (const LogRow& r : stress.rows)
    if (r.t >= 8.0 && r.t < 18.0)
      min_beta = std::min(min_beta, r.beta);
  const bool ok = violations == 0 && worst <= 1e-3;
  return {ok, fmt("max overshoot %.2e m over 7 episodes (stress min beta %.2e m), %lld violations", std::max(worst, 0.0),
                  min_beta, static_cast<long long>(violations))};
}

// 5: vehicle 3 m outside a collapsing region; steps under the singularity guard are counted apart
Outcome outside_convergence()
{
  const IntegratorConfig ic;
  const CbfParams p;
  AcceptableRegion region;
  region.x_h = Vec2::Zero();
  region.beta = 1.0;
  VehicleState v;
  v.x_a = {4.0, 0.0};
  const Vec2 u_c = Vec2::Zero();
  const int steps = static_cast<int>(std::lround(10.0 / ic.dt));
  double prev_B = barrier_value(v.x_a, region.x_h, region.beta).B;
  std::int64_t increases = 0, singular = 0;
  double reached = -1.0;
  for (int k = 0; k < steps; ++k) {
    const GoalStep goal = step_goal(region, Vec2::Zero(), kPlant, ic);
    const RadiusStep radius = filter_radius(region, 0.0, goal.xh_dot, v.x_a, ic);
    const FilterOutput f = human_centered_filter(v.x_a, region.x_h, region.beta, radius.region.beta_dot, u_c,
                                                 goal.xh_dot, kPlant, p);
    v = step_plant(v, u_c + f.u_b, kPlant, ic);
    region = radius.region;
    region.x_h = goal.region.x_h;
    const double B = barrier_value(v.x_a, region.x_h, region.beta).B;
    if (f.diag.singular)
      ++singular;
    else if (!(B < prev_B))
      ++increases;
    prev_B = B;
    if (reached < 0 && (v.x_a - region.x_h).norm() < 0.05)
      reached = v.t;
  }
  const bool ok = increases == 0 && reached >= 0 && reached <= 10.0;
  return {ok, fmt("%lld non-decreasing steps of %d (%lld singular-flagged steps excluded); within 0.05 m at t = "
                  "%.3f s; final distance %.2e m",
                  static_cast<long long>(increases), steps, static_cast<long long>(singular), reached,
                  (v.x_a - region.x_h).norm())};
}

// 6: joystick perturbations do not reach the vehicle while the filter is idle
Outcome transparency()
{
  ExperimentConfig cfg;
  cfg.scenario.timeout = 40.0;
  const EpisodeLog log = episode("cooperative", ControlMode::proposed, 1, cfg);
  const DeviceParams& dp = cfg.device;
  const IntegratorConfig& ic = cfg.integrator;
  oracle::Gen gen(99);
  std::int64_t reproduced = 0, compared = 0, changed = 0, skipped = 0;
  for (const LogRow& r : log.rows) {
    if (r.engaged)
      continue;
    AcceptableRegion region;
    region.x_h = r.x_h;
    region.beta = r.beta;
    auto vehicle_input = [&](const Vec2& phi, bool& engaged) {
      const MappedInputs m = map_inputs(phi, r.theta, dp, cfg.cbf.alpha_max);
      const GoalStep goal = step_goal(region, m.u_h, kPlant, ic);
      const RadiusStep radius = filter_radius(region, m.alpha_cmd, goal.xh_dot, r.x_a, ic);
      const FilterOutput f = human_centered_filter(r.x_a, r.x_h, r.beta, radius.region.beta_dot,
                                                   fac_command(r.x_a, cfg.scenario), goal.xh_dot, kPlant, cfg.cbf);
      engaged = f.diag.engaged;
      return Vec2(fac_command(r.x_a, cfg.scenario) + f.u_b);
    };
    bool e0 = false;
    const Vec2 base = vehicle_input(r.phi, e0);
    if (std::memcmp(base.data(), r.u_a.data(), sizeof(double) * 2) == 0)
      ++reproduced;
    const Vec2 phi = r.phi + Vec2(gen.uniform(-0.1, 0.1), gen.uniform(-0.1, 0.1));
    bool e1 = false;
    const Vec2 perturbed = vehicle_input(phi, e1);
    if (e1) {
      ++skipped;
      continue;
    }
    ++compared;
    if (std::memcmp(perturbed.data(), r.u_a.data(), sizeof(double) * 2) != 0)
      ++changed;
  }
  const std::int64_t idle = compared + skipped;
  const bool ok = changed == 0 && compared > 1000 && reproduced == idle;
  return {ok, fmt("%lld of %lld perturbed idle steps changed u_a (bitwise); %lld perturbations engaged the filter; "
                  "%lld/%lld logged inputs reproduced",
                  static_cast<long long>(changed), static_cast<long long>(compared), static_cast<long long>(skipped),
                  static_cast<long long>(reproduced), static_cast<long long>(idle))};
}

// 7: cooperative script, 4 seeds, both modes
Outcome table_orderings()
{
  const auto t0 = Clock::now();
  std::vector<std::future<MetricsReport>> prop, hsc;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    prop.push_back(std::async(std::launch::async,
                              [seed] { return compute_metrics(episode("cooperative", ControlMode::proposed, seed)); }));
    hsc.push_back(std::async(std::launch::async, [seed] {
      return compute_metrics(episode("cooperative", ControlMode::simple_hsc, seed));
    }));
  }
  std::vector<MetricsReport> p, h;
  for (auto& f : prop)
    p.push_back(f.get());
  for (auto& f : hsc)
    h.push_back(f.get());
  const MetricsReport mp = aggregate(p);
  const MetricsReport mh = aggregate(h);
  const double elapsed = seconds_since(t0);
  auto val = [](const Metric& m) { return m ? *m : std::nan(""); };
  const double pa = val(mp.area(Area::A).rmse), ha = val(mh.area(Area::A).rmse);
  const double pc = val(mp.area(Area::C).rmse), hc = val(mh.area(Area::C).rmse);
  const double pt = val(mp.all.required_time), ht = val(mh.all.required_time);
  const bool ok = pa < ha && pc < hc && pt < ht && elapsed < 60.0;
  return {ok, fmt("RMSE A %.3f<%.3f, C %.3f<%.3f; all-areas time %.3f<%.3f s; %.1f s", pa, ha, pc, hc, pt, ht,
                  elapsed)};
}

// 8: opposing grip deflects simple-HSC but not the proposed vehicle input
Outcome opposing_grip()
{
  ExperimentConfig cfg;
  cfg.scenario.timeout = 20.0;
  const EpisodeLog hsc = episode("opposing-grip", ControlMode::simple_hsc, 1, cfg);
  const EpisodeLog prop = episode("opposing-grip", ControlMode::proposed, 1, cfg);
  double num = 0.0, den = 0.0;
  for (const LogRow& r : hsc.rows)
    if (r.t >= 5.0) {
      num += (r.u_a - r.u_c).norm();
      den += r.u_c.norm();
    }
  const double ratio = den > 0.0 ? num / den : 0.0;
  std::int64_t mismatched = 0, idle_deflected = 0;
  for (const LogRow& r : prop.rows) {
    const Vec2 sum = r.u_c + r.u_b;
    if (std::memcmp(sum.data(), r.u_a.data(), sizeof(double) * 2) != 0)
      ++mismatched;
    if (!r.engaged && std::memcmp(r.u_c.data(), r.u_a.data(), sizeof(double) * 2) != 0)
      ++idle_deflected;
  }
  const bool ok = ratio > 0.10 && mismatched == 0 && idle_deflected == 0;
  return {ok, fmt("simple-HSC steady-state |u_a-u_c|/|u_c| = %.1f%%; proposed u_a != u_c+u_b at %lld steps, "
                  "idle steps deflected %lld",
                  100.0 * ratio, static_cast<long long>(mismatched), static_cast<long long>(idle_deflected))};
}

// 9: determinism and replay of a live session through the server
Outcome determinism_and_replay()
{
  namespace beast = boost::beast;
  namespace net = boost::asio;
  using nlohmann::json;

  ExperimentConfig cfg;
  cfg.scenario.timeout = 15.0;
  const bool identical = csv_of(episode("cooperative", ControlMode::proposed, 5, cfg)) ==
                         csv_of(episode("cooperative", ControlMode::proposed, 5, cfg));

  teleop::ServerOptions so;
  so.port = 0;
  so.realtime = false;
  so.session.replay_dir = fs::temp_directory_path() / "hccbf_acceptance_replays";
  so.session.config = cfg;
  teleop::Server server(so);
  const unsigned short port = server.start();

  net::io_context ioc;
  net::ip::tcp::resolver resolver(ioc);
  beast::websocket::stream<net::ip::tcp::socket> ws(ioc);
  net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
  ws.handshake("127.0.0.1", "/session");
  auto read = [&] {
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  };
  auto send = [&](const json& j) { ws.write(net::buffer(j.dump())); };
  auto command = [&](const std::string& verb, json payload = json::object()) {
    send({{"type", "command"}, {"schema_version", 1}, {"verb", verb}, {"payload", payload}});
  };
  read();
  command("load_scenario");
  command("start");
  std::int64_t seq = 0;
  bool pausing = false;
  std::string replay_path;
  double last_t = 0.0;
  for (int i = 0; i < 200000 && replay_path.empty(); ++i) {
    const json m = read();
    const std::string type = m.value("type", "");
    if (type == "state") {
      last_t = m.at("t").get<double>();
      if (!pausing && m.at("seq").get<std::int64_t>() % 7 == 0) {
        ++seq;
        send({{"type", "input"},
              {"schema_version", 1},
              {"client_seq", seq},
              {"axes", {0.6 * std::sin(0.3 * seq), 0.5 * std::cos(0.17 * seq)}},
              {"gripper", 0.5 + 0.5 * std::sin(0.05 * seq)}});
      }
      if (!pausing && last_t >= 8.0) {
        command("pause");
        pausing = true;
      }
    } else if (type == "ack" && m.value("verb", "") == "pause") {
      command("save_replay", {{"name", "acceptance"}});
    } else if (type == "ack" && m.value("verb", "") == "save_replay") {
      replay_path = m.at("path").get<std::string>();
    } else if (type == "error") {
      break;
    }
  }
  beast::error_code ec;
  ws.close(beast::websocket::close_code::normal, ec);
  server.stop();
  if (replay_path.empty())
    return {false, fmt("byte-identical logs %s; the server never saved a replay", identical ? "yes" : "NO")};

  const EpisodeLog live = read_episode(replay_path);
  const ReplayBundle bundle = load_replay(replay_path);
  ReplayOperator op(bundle.frames);
  Simulation sim(bundle.config, bundle.mode);
  double worst = 0.0;
  std::size_t n = 0;
  for (; n < live.rows.size(); ++n) {
    const LogRow row = sim.step(op.next(sim.observe()));
    worst = std::max(worst, (row.x_a - live.rows[n].x_a).norm());
  }
  const bool ok = identical && n > 1000 && worst <= 1e-9;
  return {ok, fmt("byte-identical logs %s; server replay of %zu steps, max |dx_a| = %.2e m", identical ? "yes" : "NO",
                  n, worst)};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"barrier correctness", barrier_correctness},
      {"filter identities", filter_identities},
      {"barrier bound over episodes", definition_bound},
      {"forward invariance", forward_invariance},
      {"outside-region convergence", outside_convergence},
      {"F-AC transparency", transparency},
      {"directional table orderings", table_orderings},
      {"simple-HSC opposing grip", opposing_grip},
      {"determinism and replay", determinism_and_replay},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
