// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/verify.hpp"

#include <sstream>

namespace hccbf {
namespace {

void record(CheckResult& c, const VerifyParams& p, std::int64_t step, double value, double bound)
{
  ++c.violation_count;
  if (c.violations.size() < p.max_listed)
    c.violations.push_back({step, value, bound});
}

CheckResult named(std::string name)
{
  CheckResult c;
  c.name = std::move(name);
  return c;
}

}  // namespace

bool VerificationReport::ok() const
{
  if (mode_rejected)
    return false;
  for (const CheckResult& c : checks)
    if (!c.passed())
      return false;
  return true;
}

const CheckResult* VerificationReport::find(const std::string& name) const
{
  for (const CheckResult& c : checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

VerificationReport verify(const EpisodeLog& log, const VerifyParams& p)
{
  VerificationReport rep;
  if (log.header.mode != ControlMode::proposed) {
    rep.mode_rejected = true;
    rep.reason = "containment is only claimed for proposed-mode logs (got " + to_string(log.header.mode) + ")";
    return rep;
  }
  const auto& rows = log.rows;
  const double dt = log.header.dt;
  const double K = log.config.cbf.K;
  const double C = log.config.cbf.C;

  CheckResult containment = named("containment");
  CheckResult bound = named("barrier_bound");
  CheckResult outside = named("outside_decrease");
  CheckResult idle = named("passive_when_idle");
  CheckResult rate = named("radius_rate");
  CheckResult sum = named("input_sum");

  const bool started_inside = !rows.empty() && (rows.front().x_h - rows.front().x_a).norm() <= rows.front().beta;
  if (!started_inside) {
    containment.skipped = true;
    containment.note = "episode did not start inside the region";
  }

  for (std::size_t k = 0; k < rows.size(); ++k) {
    const LogRow& r = rows[k];
    if (started_inside) {
      ++containment.checked;
      const double dist = (r.x_h - r.x_a).norm();
      if (dist > r.beta + p.containment_tol)
        record(containment, p, r.step, dist, r.beta + p.containment_tol);
    }
    if (!(r.I > r.Q)) {
      ++idle.checked;
      if (r.u_b.x() != 0.0 || r.u_b.y() != 0.0 || r.engaged)
        record(idle, p, r.step, r.u_b.norm(), 0.0);
    }
    ++rate.checked;
    if (r.beta_dot < -r.shrink_limit - p.rate_tol)
      record(rate, p, r.step, r.beta_dot, -r.shrink_limit - p.rate_tol);
    ++sum.checked;
    const Vec2 expected = r.u_c + r.u_b;
    if (r.u_a.x() != expected.x() || r.u_a.y() != expected.y())
      record(sum, p, r.step, (r.u_a - expected).norm(), 0.0);

    if (k + 1 == rows.size())
      continue;
    const LogRow& n = rows[k + 1];
    if (r.saturated) {
      ++rep.excluded_saturated;
      continue;
    }
    if (r.singular) {
      ++rep.excluded_singular;
      continue;
    }
    if ((r.l > 0.0) != (n.l > 0.0)) {
      ++rep.excluded_branch_transition;
      continue;
    }
    const double bdot = barrier_time_derivative(r.B, n.B, dt);
    ++bound.checked;
    const double limit = K * r.B + C + p.bdot_slack;
    if (bdot > limit)
      record(bound, p, r.step, bdot, limit);
    if (r.l < 0.0 && n.l < 0.0) {
      ++outside.checked;
      if (!(bdot < 0.0))
        record(outside, p, r.step, bdot, 0.0);
    }
  }

  rep.checks = {containment, bound, outside, idle, rate, sum};
  return rep;
}

std::string render(const VerificationReport& r)
{
  std::ostringstream os;
  if (r.mode_rejected) {
    os << "REJECTED: " << r.reason << "\n";
    return os.str();
  }
  for (const CheckResult& c : r.checks) {
    os << (c.skipped ? "SKIP" : c.passed() ? "ok  " : "FAIL") << " " << c.name << " (" << c.checked << " steps";
    if (c.violation_count > 0)
      os << ", " << c.violation_count << " violations";
    os << ")";
    if (!c.note.empty())
      os << " " << c.note;
    os << "\n";
    for (const Violation& v : c.violations)
      os << "     step " << v.step << ": value " << v.value << " bound " << v.bound << "\n";
  }
  os << "excluded steps: saturated " << r.excluded_saturated << ", singular " << r.excluded_singular
     << ", branch transition " << r.excluded_branch_transition << "\n";
  os << (r.ok() ? "verification passed" : "verification FAILED") << "\n";
  return os.str();
}

nlohmann::json to_json(const VerificationReport& r)
{
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : r.checks) {
    nlohmann::json v = nlohmann::json::array();
    for (const Violation& x : c.violations)
      v.push_back({{"step", x.step}, {"value", x.value}, {"bound", x.bound}});
    checks.push_back({{"name", c.name},
                      {"passed", c.passed()},
                      {"skipped", c.skipped},
                      {"checked", c.checked},
                      {"violation_count", c.violation_count},
                      {"violations", v}});
  }
  return {{"ok", r.ok()},
          {"mode_rejected", r.mode_rejected},
          {"reason", r.reason},
          {"checks", checks},
          {"excluded", {{"saturated", r.excluded_saturated},
                        {"singular", r.excluded_singular},
                        {"branch_transition", r.excluded_branch_transition}}}};
}

}  // namespace hccbf
