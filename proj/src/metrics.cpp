// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hccbf {
namespace {

constexpr std::array<Area, 3> kAreas{Area::A, Area::B, Area::C};

Metric mean_of(const std::vector<Metric>& xs)
{
  double sum = 0.0;
  int n = 0;
  for (const Metric& x : xs)
    if (x) {
      sum += *x;
      ++n;
    }
  if (n == 0)
    return std::nullopt;
  return sum / n;
}

Metric minus(const Metric& a, const Metric& b)
{
  if (!a || !b)
    return std::nullopt;
  return *a - *b;
}

std::string cell(const Metric& m)
{
  if (!m)
    return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *m);
  return buf;
}

nlohmann::json metric_json(const Metric& m) { return m ? nlohmann::json(*m) : nlohmann::json(nullptr); }

nlohmann::json area_json(const AreaMetrics& a)
{
  return {{"rmse_m", metric_json(a.rmse)}, {"required_time_s", metric_json(a.required_time)}};
}

}  // namespace

double cross_track_distance(const Vec2& x, const Polyline& path) { return path.project(x).distance; }

Metric compute_rmse(const std::vector<LogRow>& rows, const Polyline& path, Area area)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (const LogRow& r : rows) {
    const bool in = area == Area::none ? r.area != Area::none : r.area == area;
    if (!in)
      continue;
    const double d = cross_track_distance(r.x_a, path);
    sum += d * d;
    ++n;
  }
  if (n == 0)
    return std::nullopt;
  return std::sqrt(sum / static_cast<double>(n));
}

Metric compute_required_time(const EpisodeLog& log, Area area)
{
  if (area == Area::none) {
    if (!log.footer.completed)
      return std::nullopt;
    return log.footer.completion_time - (log.rows.empty() ? log.footer.completion_time : log.rows.front().t);
  }
  const LogRow* first = nullptr;
  const LogRow* last = nullptr;
  for (const LogRow& r : log.rows) {
    if (r.area != area)
      continue;
    if (!first)
      first = &r;
    last = &r;
  }
  if (!first)
    return std::nullopt;
  return last->t + log.header.dt - first->t;
}

MetricsReport compute_metrics(const EpisodeLog& log)
{
  MetricsReport rep;
  const Polyline& path = log.config.scenario.path;
  for (std::size_t i = 0; i < kAreas.size(); ++i) {
    rep.areas[i].rmse = compute_rmse(log.rows, path, kAreas[i]);
    rep.areas[i].required_time = compute_required_time(log, kAreas[i]);
  }
  rep.all.rmse = compute_rmse(log.rows, path, Area::none);
  rep.all.required_time = compute_required_time(log, Area::none);
  rep.collisions = static_cast<double>(count_collision_events(log.rows));
  return rep;
}

MetricsReport aggregate(const std::vector<MetricsReport>& reports)
{
  MetricsReport out;
  if (reports.empty())
    return out;
  auto collect = [&](auto getter) {
    std::vector<Metric> xs;
    for (const MetricsReport& r : reports)
      xs.push_back(getter(r));
    return mean_of(xs);
  };
  for (std::size_t i = 0; i < 3; ++i) {
    out.areas[i].rmse = collect([i](const MetricsReport& r) { return r.areas[i].rmse; });
    out.areas[i].required_time = collect([i](const MetricsReport& r) { return r.areas[i].required_time; });
  }
  out.all.rmse = collect([](const MetricsReport& r) { return r.all.rmse; });
  out.all.required_time = collect([](const MetricsReport& r) { return r.all.required_time; });
  double c = 0.0;
  for (const MetricsReport& r : reports)
    c += r.collisions;
  out.collisions = c / static_cast<double>(reports.size());
  return out;
}

MetricsReport difference(const MetricsReport& left, const MetricsReport& right)
{
  MetricsReport d;
  for (std::size_t i = 0; i < 3; ++i) {
    d.areas[i].rmse = minus(right.areas[i].rmse, left.areas[i].rmse);
    d.areas[i].required_time = minus(right.areas[i].required_time, left.areas[i].required_time);
  }
  d.all.rmse = minus(right.all.rmse, left.all.rmse);
  d.all.required_time = minus(right.all.required_time, left.all.required_time);
  d.collisions = right.collisions - left.collisions;
  return d;
}

Comparison compare_reports(const MetricsReport& left, const MetricsReport& right, std::string left_label,
                           std::string right_label)
{
  return {left, right, difference(left, right), std::move(left_label), std::move(right_label)};
}

Comparison compare(const EpisodeLog& left, const EpisodeLog& right)
{
  if (left.header.scenario_sha256 != right.header.scenario_sha256)
    throw std::invalid_argument("compare: logs were recorded on different scenarios");
  return compare_reports(compute_metrics(left), compute_metrics(right), to_string(left.header.mode),
                         to_string(right.header.mode));
}

std::string render_table(const MetricsReport& left, const MetricsReport& right, const std::string& left_label,
                         const std::string& right_label)
{
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s | %-25s | %-25s\n", "", "RMSE [m]", "Required time [s]");
  os << line;
  std::snprintf(line, sizeof(line), "%-10s | %-12s %-12s | %-12s %-12s\n", "", left_label.c_str(),
                right_label.c_str(), left_label.c_str(), right_label.c_str());
  os << line;
  const auto row = [&](const char* name, const AreaMetrics& a, const AreaMetrics& b) {
    std::snprintf(line, sizeof(line), "%-10s | %-12s %-12s | %-12s %-12s\n", name, cell(a.rmse).c_str(),
                  cell(b.rmse).c_str(), cell(a.required_time).c_str(), cell(b.required_time).c_str());
    os << line;
  };
  row("Area A", left.areas[0], right.areas[0]);
  row("Area B", left.areas[1], right.areas[1]);
  row("Area C", left.areas[2], right.areas[2]);
  row("All Areas", left.all, right.all);
  return os.str();
}

std::string render_comparison(const Comparison& c)
{
  std::ostringstream os;
  os << render_table(c.left, c.right, c.left_label, c.right_label);
  os << "\ndelta (" << c.right_label << " - " << c.left_label << ")\n";
  const char* names[] = {"Area A", "Area B", "Area C"};
  char line[160];
  for (std::size_t i = 0; i < 3; ++i) {
    std::snprintf(line, sizeof(line), "%-10s | rmse %-10s | time %-10s\n", names[i],
                  cell(c.delta.areas[i].rmse).c_str(), cell(c.delta.areas[i].required_time).c_str());
    os << line;
  }
  std::snprintf(line, sizeof(line), "%-10s | rmse %-10s | time %-10s\n", "All Areas", cell(c.delta.all.rmse).c_str(),
                cell(c.delta.all.required_time).c_str());
  os << line;
  return os.str();
}

nlohmann::json to_json(const MetricsReport& r)
{
  return {
      {"A", area_json(r.areas[0])},
      {"B", area_json(r.areas[1])},
      {"C", area_json(r.areas[2])},
      {"all", area_json(r.all)},
      {"collisions", r.collisions},
  };
}

nlohmann::json to_json(const Comparison& c)
{
  return {
      {"left", {{"label", c.left_label}, {"metrics", to_json(c.left)}}},
      {"right", {{"label", c.right_label}, {"metrics", to_json(c.right)}}},
      {"delta", to_json(c.delta)},
  };
}

}  // namespace hccbf
