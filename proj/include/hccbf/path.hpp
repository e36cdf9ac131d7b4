// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hccbf/vec.hpp"

namespace hccbf {

enum class Area { A, B, C, none };

std::string to_string(Area a);
/// Accepts "A", "B", "C" or "none"; throws std::invalid_argument otherwise.
Area area_from_string(const std::string& s);

/// Half-open arc-length interval [start, end).
struct AreaInterval {
  Area label = Area::none;
  double start = 0.0;
  double end = 0.0;

  bool contains(double arc) const { return arc >= start && arc < end; }
};

struct PathProjection {
  Vec2 point = Vec2::Zero();
  double arc = 0.0;       ///< arc length of the nearest point
  double distance = 0.0;  ///< unsigned distance to the path
  bool beyond_end = false;
};

/// Polyline reference path parameterised by arc length.
class Polyline {
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  bool empty() const { return points_.size() < 2 || length() <= 0.0; }

  /// Point at arc length s, clamped to [0, length()].
  Vec2 point_at(double s) const;
  /// Unit tangent at arc length s.
  Vec2 tangent_at(double s) const;
  /// Global nearest point; ties resolve to the first segment.
  PathProjection project(const Vec2& x) const;

  /// Inserts factor - 1 evenly spaced points inside each segment.
  Polyline densified(int factor) const;

private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

}  // namespace hccbf
