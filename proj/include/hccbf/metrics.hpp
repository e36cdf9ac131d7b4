// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hccbf/path.hpp"
#include "hccbf/simulation.hpp"

namespace hccbf {

/// A metric cell; nullopt means no samples (never reported as zero).
using Metric = std::optional<double>;

struct AreaMetrics {
  Metric rmse;           ///< m
  Metric required_time;  ///< s
};

struct MetricsReport {
  std::array<AreaMetrics, 3> areas;  ///< A, B, C
  AreaMetrics all;
  double collisions = 0.0;  ///< count; a mean after aggregation

  const AreaMetrics& area(Area a) const { return areas.at(static_cast<std::size_t>(a)); }
};

/// Distance from x to the nearest point of the reference polyline.
double cross_track_distance(const Vec2& x, const Polyline& path);

/// RMS cross-track error over rows labelled with the area; Area::none means
/// every row inside some area.
Metric compute_rmse(const std::vector<LogRow>& rows, const Polyline& path, Area area);

/// Time from the first row in the area to the end of the last one
/// (t_last + dt - t_first). Area::none gives start-to-finish time of a completed run.
Metric compute_required_time(const EpisodeLog& log, Area area);

MetricsReport compute_metrics(const EpisodeLog& log);

/// Cell-wise arithmetic mean; cells without samples in some report are averaged
/// over the reports that have them.
MetricsReport aggregate(const std::vector<MetricsReport>& reports);

/// right - left per cell (nullopt if either side lacks samples).
MetricsReport difference(const MetricsReport& left, const MetricsReport& right);

struct Comparison {
  MetricsReport left;
  MetricsReport right;
  MetricsReport delta;  ///< right - left
  std::string left_label;
  std::string right_label;
};

/// Compares two logs over the same scenario. Throws std::invalid_argument when
/// the scenario hashes differ.
Comparison compare(const EpisodeLog& left, const EpisodeLog& right);
Comparison compare_reports(const MetricsReport& left, const MetricsReport& right, std::string left_label,
                           std::string right_label);

/// Table in the layout rows = Area A, B, C, All Areas; columns = RMSE [m] and
/// required time [s] for each side.
std::string render_table(const MetricsReport& left, const MetricsReport& right,
                         const std::string& left_label = "Proposed",
                         const std::string& right_label = "Simple HSC");
std::string render_comparison(const Comparison& c);

nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const Comparison& c);

}  // namespace hccbf
