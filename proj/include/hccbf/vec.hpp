// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cmath>

#include <Eigen/Core>

namespace hccbf {

// Planar quantities. The whole controller is fixed to n = m = 2.
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }
inline bool is_finite(const Mat2& m) { return m.allFinite(); }

}  // namespace hccbf
