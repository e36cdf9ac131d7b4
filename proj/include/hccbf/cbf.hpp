// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <functional>
#include <stdexcept>

#include "hccbf/plant.hpp"
#include "hccbf/vec.hpp"

namespace hccbf {

/// Raised when a non-finite value reaches the controller. Callers must treat
/// it as an emergency stop (vehicle input zero) and abort the episode.
class ControllerFault : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CbfParams {
  double K = 1.0;            ///< 1/s
  double C = 1.0;            ///< barrier units / s
  double alpha_max = 4.0;    ///< m, largest radius the gripper can command
  double sing_floor = 1e-12; ///< ||L_g B||^2 at or below this disables the filter
  double u_b_cap = 10.0;     ///< m/s, norm saturation of the filter output

  /// Throws std::invalid_argument unless every field is positive and finite.
  void validate() const;
};

struct BarrierValue {
  double B;
  double l;  ///< alpha^2 - |x_h - x_a|^2; positive strictly inside the region
};

struct BarrierEval {
  double B = 0.0;
  double l = 0.0;
  Vec2 grad_xa = Vec2::Zero();
  Vec2 grad_xh = Vec2::Zero();  ///< always exactly -grad_xa
  double dB_dalpha = 0.0;       ///< zero on the l <= 0 branch
};

struct FilterDiagnostics {
  double I = 0.0;
  double Q = 0.0;
  double J = 0.0;
  bool engaged = false;    ///< I > Q
  bool saturated = false;  ///< output clipped to u_b_cap
  bool singular = false;   ///< engaged but ||L_g B||^2 <= sing_floor
};

struct FilterOutput {
  Vec2 u_b = Vec2::Zero();
  FilterDiagnostics diag;
  BarrierEval barrier;
};

/// sign with sign(0) = 0.
double sign_of(double v);

/// Human-centred barrier of the acceptable region centred at x_h with radius alpha:
///
///   l = alpha^2 - s,  s = |x_h - x_a|^2
///   B = s^3 / l^2   if l > 0
///   B = s           if l <= 0
///
/// B is discontinuous on the region boundary; the boundary itself (l = 0) takes
/// the quadratic branch. Throws ControllerFault on non-finite input and
/// std::invalid_argument on alpha < 0.
BarrierValue barrier_value(const Vec2& x_a, const Vec2& x_h, double alpha);

/// Barrier value plus its partial derivatives in x_a, x_h and alpha.
BarrierEval barrier_gradients(const Vec2& x_a, const Vec2& x_h, double alpha);

/// I = L_f B + L_g B u_c + (dB/dx_h) xh_dot.
double compute_I(const BarrierEval& eval, const Vec2& f_xa, const Mat2& g_xa, const Vec2& u_c,
                 const Vec2& xh_dot);

/// Q = sign(l) (alpha / alpha_max) (K B + C) - (dB/dalpha) alpha_dot.
double compute_Q(const BarrierEval& eval, double alpha, double alpha_dot, const CbfParams& params);

/// J = max(0, -sign(l) sqrt(I^2 + lgb_norm_sq^2)), lgb_norm_sq = (L_g B)(L_g B)^T.
double compute_J(double I, double lgb_norm_sq, double l);

/// The human-centred safety filter. Returns u_b such that the vehicle input
/// u_c + u_b keeps x_a inside the region (x_h, alpha) and, once outside, drives
/// x_a towards x_h.
///
///   u_b = -((I + J - Q) / |L_g B|^2) (L_g B)^T   if I > Q
///   u_b = 0                                       otherwise
///
/// alpha and alpha_dot are the filtered radius and its rate in a running loop.
FilterOutput human_centered_filter(const Vec2& x_a, const Vec2& x_h, double alpha, double alpha_dot,
                                   const Vec2& u_c, const Vec2& xh_dot, const PlantDescriptor& plant,
                                   const CbfParams& params);

/// A generic time-varying barrier for the original human-assist filter.
struct TimeVaryingBarrier {
  std::function<double(const Vec2& x, double t)> value;
  std::function<Vec2(const Vec2& x, double t)> gradient;
  std::function<double(const Vec2& x, double t)> time_derivative;
  /// Optional replacement for the threshold Q = K B + C.
  std::function<double(const Vec2& x, double t)> threshold;
};

/// Human-assist filter for a time-varying barrier:
///
///   I = L_f B + L_g B u_h + dB/dt,  Q = K B + C
///   u = -((I - Q) / |L_g B|^2) (L_g B)^T if I > Q, else 0
///
/// Uses the same singularity guard as human_centered_filter; no saturation.
Vec2 baseline_assist_filter(const Vec2& x, const Vec2& u_h, double t, const TimeVaryingBarrier& barrier,
                            const PlantDescriptor& plant, const CbfParams& params);

/// Forward difference (B_next - B_prev) / dt. Throws std::invalid_argument on dt <= 0.
double barrier_time_derivative(double B_prev, double B_next, double dt);
double barrier_time_derivative(const BarrierEval& prev, const BarrierEval& next, double dt);

}  // namespace hccbf
