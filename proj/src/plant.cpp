// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/plant.hpp"

#include <stdexcept>

namespace hccbf {

PlantDescriptor single_integrator()
{
  return PlantDescriptor{
      "single-integrator",
      [](const Vec2&) { return Vec2::Zero().eval(); },
      [](const Vec2&) { return Mat2::Identity().eval(); },
  };
}

PlantDescriptor affine_plant(const Mat2& A, const Vec2& b, const Mat2& G)
{
  return PlantDescriptor{
      "affine",
      [A, b](const Vec2& x) { return (A * x + b).eval(); },
      [G](const Vec2&) { return G; },
  };
}

PlantDescriptor plant_by_name(const std::string& name)
{
  if (name == "single-integrator")
    return single_integrator();
  throw std::invalid_argument("unknown plant '" + name + "'");
}

}  // namespace hccbf
