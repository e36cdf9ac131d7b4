// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hccbf/dynamics.hpp"

namespace hccbf {
namespace {

constexpr double kSampleSpacing = 0.1;  // m, polyline resolution of the default course
constexpr int kSchemaVersion = 1;

// Integrates a heading profile over arc length with fixed chord length.
template <typename Heading>
void append_heading_profile(std::vector<Vec2>& pts, double start_arc, double length, Heading heading)
{
  const int n = static_cast<int>(std::lround(length / kSampleSpacing));
  const double ds = length / n;
  for (int i = 0; i < n; ++i) {
    const double s_mid = start_arc + (i + 0.5) * ds;
    const double th = heading(s_mid);
    pts.push_back(pts.back() + ds * Vec2(std::cos(th), std::sin(th)));
  }
}

Vec2 vec_from_json(const nlohmann::json& j)
{
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("expected a 2-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

nlohmann::json vec_to_json(const Vec2& v) { return nlohmann::json::array({v.x(), v.y()}); }

}  // namespace

void ScenarioConfig::validate() const
{
  for (const double v : {v_ref, v_max, lookahead, vehicle_radius, timeout})
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("ScenarioConfig: speeds, lookahead, radius and timeout must be positive");
  if (v_ref > v_max)
    throw std::invalid_argument("ScenarioConfig: v_ref exceeds v_max");

  double prev_end = -std::numeric_limits<double>::infinity();
  int prev_label = -1;
  for (const AreaInterval& iv : areas) {
    if (iv.label == Area::none)
      throw std::invalid_argument("ScenarioConfig: area label 'none' is reserved");
    if (!(iv.end > iv.start))
      throw std::invalid_argument("ScenarioConfig: empty area interval");
    if (iv.start < prev_end)
      throw std::invalid_argument("ScenarioConfig: areas overlap or are out of order");
    if (static_cast<int>(iv.label) <= prev_label)
      throw std::invalid_argument("ScenarioConfig: areas must be ordered A, B, C");
    prev_end = iv.end;
    prev_label = static_cast<int>(iv.label);
  }

  if (obstacle.enabled) {
    if (!is_finite(obstacle.home) || !is_finite(obstacle.velocity))
      throw std::invalid_argument("ScenarioConfig: obstacle must be finite");
    if (!(obstacle.extents.x() > 0.0) || !(obstacle.extents.y() > 0.0))
      throw std::invalid_argument("ScenarioConfig: obstacle extents must be positive");
    if (std::abs(obstacle.velocity.norm() - 3.0) > 1e-9)
      throw std::invalid_argument("ScenarioConfig: obstacle speed must be 3 m/s");
  }
}

ScenarioConfig default_scenario()
{
  constexpr double kLenA = 40.0, kLenB = 15.0, kLenC = 30.0;
  constexpr double kHeadingA = 0.5;   // rad, S-curve peak heading
  constexpr double kHeadingC = 0.4;   // rad, slalom peak heading
  constexpr double kWavelengthC = 15.0;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  std::vector<Vec2> pts{Vec2::Zero()};
  append_heading_profile(pts, 0.0, kLenA, [&](double s) { return kHeadingA * std::sin(two_pi * s / kLenA); });
  append_heading_profile(pts, kLenA, kLenB, [](double) { return 0.0; });
  append_heading_profile(pts, kLenA + kLenB, kLenC, [&](double s) {
    return kHeadingC * std::sin(two_pi * (s - kLenA - kLenB) / kWavelengthC);
  });

  ScenarioConfig sc;
  sc.name = "default";
  sc.path = Polyline(std::move(pts));
  const double total = sc.path.length();
  sc.areas = {{Area::A, 0.0, kLenA}, {Area::B, kLenA, kLenA + kLenB}, {Area::C, kLenA + kLenB, total}};

  // Below the straight, timed to cross it as a vehicle cruising at v_ref arrives.
  const Vec2 crossing = sc.path.point_at(kLenA + 6.0);
  sc.obstacle.home = crossing - Vec2(0.0, 12.0);
  sc.obstacle.trigger_area = Area::B;
  sc.obstacle.velocity = Vec2(0.0, 3.0);
  sc.obstacle.extents = Vec2(1.0, 2.0);
  sc.obstacle.enabled = true;
  return sc;
}

ScenarioConfig straight_scenario(const Vec2& start, const Vec2& end)
{
  ScenarioConfig sc;
  sc.name = "straight";
  const double len = (end - start).norm();
  const int n = std::max(1, static_cast<int>(std::lround(len / 1.0)));
  std::vector<Vec2> pts;
  for (int i = 0; i <= n; ++i)
    pts.push_back(start + (static_cast<double>(i) / n) * (end - start));
  sc.path = Polyline(std::move(pts));
  sc.areas = {{Area::A, 0.0, sc.path.length()}};
  sc.obstacle.enabled = false;
  return sc;
}

bool path_complete(const Vec2& x_a, const ScenarioConfig& scenario)
{
  if (scenario.path.empty())
    return true;
  const PathProjection p = scenario.path.project(x_a);
  return p.arc >= scenario.path.length();
}

Vec2 fac_command(const Vec2& x_a, const ScenarioConfig& scenario)
{
  const Polyline& path = scenario.path;
  if (path.empty())
    return Vec2::Zero();
  const PathProjection p = path.project(x_a);
  if (p.arc >= path.length())
    return Vec2::Zero();
  const Vec2 target = path.point_at(p.arc + scenario.lookahead);
  const Vec2 dir = target - x_a;
  const double n = dir.norm();
  if (n <= 0.0)
    return Vec2::Zero();
  Vec2 u = (scenario.v_ref / n) * dir;
  const double speed = u.norm();
  if (speed > scenario.v_max)
    u *= scenario.v_max / speed;
  return u;
}

ObstacleState initial_obstacle(const ScenarioConfig& scenario)
{
  return {scenario.obstacle.home, false};
}

ObstacleState step_obstacle(const ObstacleState& obs, const Vec2& x_a, const ScenarioConfig& scenario,
                            double dt)
{
  if (!scenario.obstacle.enabled)
    return obs;
  ObstacleState next = obs;
  if (!next.active && area_of(x_a, scenario) == scenario.obstacle.trigger_area)
    next.active = true;
  if (next.active)
    next.position += dt * scenario.obstacle.velocity;
  return next;
}

bool collision_check(const Vec2& x_a, const ObstacleState& obs, const Vec2& extents, double r_v)
{
  const Vec2 half = 0.5 * extents;
  const Vec2 lo = obs.position - half;
  const Vec2 hi = obs.position + half;
  const Vec2 nearest{std::clamp(x_a.x(), lo.x(), hi.x()), std::clamp(x_a.y(), lo.y(), hi.y())};
  return (x_a - nearest).squaredNorm() < r_v * r_v;
}

void to_json(nlohmann::json& j, const ScenarioConfig& s)
{
  nlohmann::json path = nlohmann::json::array();
  for (const Vec2& p : s.path.points())
    path.push_back(vec_to_json(p));
  nlohmann::json areas = nlohmann::json::array();
  for (const AreaInterval& iv : s.areas)
    areas.push_back({{"label", to_string(iv.label)}, {"start_m", iv.start}, {"end_m", iv.end}});
  j = {
      {"schema_version", kSchemaVersion},
      {"name", s.name},
      {"path_m", path},
      {"areas", areas},
      {"obstacle",
       {{"enabled", s.obstacle.enabled},
        {"home_m", vec_to_json(s.obstacle.home)},
        {"trigger_area", to_string(s.obstacle.trigger_area)},
        {"velocity_mps", vec_to_json(s.obstacle.velocity)},
        {"extents_m", vec_to_json(s.obstacle.extents)}}},
      {"v_ref_mps", s.v_ref},
      {"v_max_mps", s.v_max},
      {"lookahead_m", s.lookahead},
      {"vehicle_radius_m", s.vehicle_radius},
      {"timeout_s", s.timeout},
      {"seed", s.seed},
  };
}

void from_json(const nlohmann::json& j, ScenarioConfig& s)
{
  const int version = j.value("schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw std::invalid_argument("scenario schema_version " + std::to_string(version) + " is not supported");

  ScenarioConfig out;
  out.name = j.value("name", std::string("unnamed"));
  std::vector<Vec2> pts;
  for (const auto& p : j.at("path_m"))
    pts.push_back(vec_from_json(p));
  out.path = Polyline(std::move(pts));
  out.areas.clear();
  for (const auto& a : j.at("areas"))
    out.areas.push_back({area_from_string(a.at("label").get<std::string>()), a.at("start_m").get<double>(),
                         a.at("end_m").get<double>()});
  if (j.contains("obstacle")) {
    const auto& o = j.at("obstacle");
    out.obstacle.enabled = o.value("enabled", true);
    out.obstacle.home = vec_from_json(o.at("home_m"));
    out.obstacle.trigger_area = area_from_string(o.value("trigger_area", std::string("B")));
    out.obstacle.velocity = vec_from_json(o.at("velocity_mps"));
    out.obstacle.extents = vec_from_json(o.at("extents_m"));
  } else {
    out.obstacle.enabled = false;
  }
  out.v_ref = j.value("v_ref_mps", out.v_ref);
  out.v_max = j.value("v_max_mps", out.v_max);
  out.lookahead = j.value("lookahead_m", out.lookahead);
  out.vehicle_radius = j.value("vehicle_radius_m", out.vehicle_radius);
  out.timeout = j.value("timeout_s", out.timeout);
  out.seed = j.value("seed", out.seed);
  s = std::move(out);
}

}  // namespace hccbf
