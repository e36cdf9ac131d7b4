// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/path.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hccbf {

std::string to_string(Area a)
{
  switch (a) {
  case Area::A: return "A";
  case Area::B: return "B";
  case Area::C: return "C";
  case Area::none: return "none";
  }
  return "none";
}

Area area_from_string(const std::string& s)
{
  if (s == "A") return Area::A;
  if (s == "B") return Area::B;
  if (s == "C") return Area::C;
  if (s == "none") return Area::none;
  throw std::invalid_argument("unknown area label '" + s + "'");
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points))
{
  cumulative_.reserve(points_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!is_finite(points_[i]))
      throw std::invalid_argument("Polyline: non-finite vertex");
    if (i > 0)
      s += (points_[i] - points_[i - 1]).norm();
    cumulative_.push_back(s);
  }
}

Vec2 Polyline::point_at(double s) const
{
  if (points_.empty())
    return Vec2::Zero();
  if (points_.size() == 1 || s <= 0.0)
    return points_.front();
  if (s >= length())
    return points_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());  // s in [cum[i-1], cum[i])
  const double seg = cumulative_[i] - cumulative_[i - 1];
  const double tau = seg > 0.0 ? (s - cumulative_[i - 1]) / seg : 0.0;
  return points_[i - 1] + tau * (points_[i] - points_[i - 1]);
}

Vec2 Polyline::tangent_at(double s) const
{
  if (points_.size() < 2)
    return Vec2::UnitX();
  std::size_t i = 1;
  if (s >= length()) {
    i = points_.size() - 1;
  } else if (s > 0.0) {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    i = static_cast<std::size_t>(it - cumulative_.begin());
  }
  const Vec2 seg = points_[i] - points_[i - 1];
  const double n = seg.norm();
  return n > 0.0 ? Vec2(seg / n) : Vec2::UnitX();
}

PathProjection Polyline::project(const Vec2& x) const
{
  PathProjection best;
  if (points_.empty())
    return best;
  if (points_.size() == 1) {
    best.point = points_.front();
    best.distance = (x - best.point).norm();
    best.beyond_end = true;
    return best;
  }

  double best_d2 = std::numeric_limits<double>::infinity();
  double best_tau = 0.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 ab = points_[i + 1] - a;
    const double len2 = ab.squaredNorm();
    double tau = len2 > 0.0 ? (x - a).dot(ab) / len2 : 0.0;
    const double raw_tau = tau;
    tau = std::clamp(tau, 0.0, 1.0);
    const Vec2 p = a + tau * ab;
    const double d2 = (x - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_i = i;
      best_tau = tau;
      best.point = p;
      best.beyond_end = (i + 2 == points_.size()) && raw_tau > 1.0;
    }
  }
  best.distance = std::sqrt(best_d2);
  best.arc = cumulative_[best_i] + best_tau * (cumulative_[best_i + 1] - cumulative_[best_i]);
  if (best_i + 2 == points_.size() && best_tau >= 1.0)
    best.arc = length();
  return best;
}

Polyline Polyline::densified(int factor) const
{
  if (factor < 1)
    throw std::invalid_argument("densified: factor must be >= 1");
  if (points_.size() < 2)
    return *this;
  std::vector<Vec2> out;
  out.reserve((points_.size() - 1) * static_cast<std::size_t>(factor) + 1);
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    for (int k = 0; k < factor; ++k) {
      const double tau = static_cast<double>(k) / factor;
      out.push_back(points_[i] + tau * (points_[i + 1] - points_[i]));
    }
  }
  out.push_back(points_.back());
  return Polyline(std::move(out));
}

}  // namespace hccbf
