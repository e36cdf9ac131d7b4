// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <functional>
#include <string>

#include "hccbf/vec.hpp"

namespace hccbf {

/// Control-affine plant  x' = f(x) + g(x) u.
///
/// Built-in plants are affine or constant in x, hence locally Lipschitz.
struct PlantDescriptor {
  std::string name;
  std::function<Vec2(const Vec2&)> f;
  std::function<Mat2(const Vec2&)> g;

  Vec2 drift(const Vec2& x) const { return f(x); }
  Mat2 input_map(const Vec2& x) const { return g(x); }
  Vec2 velocity(const Vec2& x, const Vec2& u) const { return f(x) + g(x) * u; }
};

/// f = 0, g = I. The plant used for both the vehicle and the goal.
PlantDescriptor single_integrator();

/// f(x) = A x + b, g(x) = G.
PlantDescriptor affine_plant(const Mat2& A, const Vec2& b, const Mat2& G);

/// Looks up a plant by name ("single-integrator"). Throws std::invalid_argument.
PlantDescriptor plant_by_name(const std::string& name);

}  // namespace hccbf
