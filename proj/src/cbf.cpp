// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/cbf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hccbf {
namespace {

void require_finite(const Vec2& v, const char* what)
{
  if (!is_finite(v))
    throw ControllerFault(std::string("non-finite ") + what);
}

void require_finite(double v, const char* what)
{
  if (!std::isfinite(v))
    throw ControllerFault(std::string("non-finite ") + what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void CbfParams::validate() const
{
  if (!positive_finite(K) || !positive_finite(C) || !positive_finite(alpha_max) ||
      !positive_finite(sing_floor) || !positive_finite(u_b_cap))
    throw std::invalid_argument("CbfParams: K, C, alpha_max, sing_floor and u_b_cap must be positive");
}

double sign_of(double v)
{
  if (v > 0.0)
    return 1.0;
  if (v < 0.0)
    return -1.0;
  return 0.0;
}

BarrierValue barrier_value(const Vec2& x_a, const Vec2& x_h, double alpha)
{
  require_finite(x_a, "x_a");
  require_finite(x_h, "x_h");
  require_finite(alpha, "alpha");
  if (alpha < 0.0)
    throw std::invalid_argument("barrier_value: alpha must be non-negative");

  const Vec2 d = x_h - x_a;
  const double s = d.squaredNorm();
  const double l = alpha * alpha - s;
  if (l > 0.0)
    return {s * s * s / (l * l), l};
  return {s, l};
}

BarrierEval barrier_gradients(const Vec2& x_a, const Vec2& x_h, double alpha)
{
  const BarrierValue v = barrier_value(x_a, x_h, alpha);
  const Vec2 d = x_h - x_a;
  const double s = d.squaredNorm();

  BarrierEval out;
  out.B = v.B;
  out.l = v.l;
  if (v.l > 0.0) {
    const double l2 = v.l * v.l;
    const double l3 = l2 * v.l;
    const double dB_ds = 3.0 * s * s / l2 + 2.0 * s * s * s / l3;
    out.grad_xa = -2.0 * dB_ds * d;
    out.dB_dalpha = -4.0 * alpha * s * s * s / l3;
  } else {
    out.grad_xa = -2.0 * d;
    out.dB_dalpha = 0.0;
  }
  out.grad_xh = -out.grad_xa;
  return out;
}

double compute_I(const BarrierEval& eval, const Vec2& f_xa, const Mat2& g_xa, const Vec2& u_c,
                 const Vec2& xh_dot)
{
  const double lfb = eval.grad_xa.dot(f_xa);
  const Vec2 lgb = g_xa.transpose() * eval.grad_xa;
  return lfb + lgb.dot(u_c) + eval.grad_xh.dot(xh_dot);
}

double compute_Q(const BarrierEval& eval, double alpha, double alpha_dot, const CbfParams& params)
{
  return sign_of(eval.l) * (alpha / params.alpha_max) * (params.K * eval.B + params.C) -
         eval.dB_dalpha * alpha_dot;
}

double compute_J(double I, double lgb_norm_sq, double l)
{
  return std::max(0.0, -sign_of(l) * std::sqrt(I * I + lgb_norm_sq * lgb_norm_sq));
}

FilterOutput human_centered_filter(const Vec2& x_a, const Vec2& x_h, double alpha, double alpha_dot,
                                   const Vec2& u_c, const Vec2& xh_dot, const PlantDescriptor& plant,
                                   const CbfParams& params)
{
  require_finite(alpha_dot, "alpha_dot");
  require_finite(u_c, "u_c");
  require_finite(xh_dot, "xh_dot");

  FilterOutput out;
  out.barrier = barrier_gradients(x_a, x_h, alpha);
  const BarrierEval& eval = out.barrier;

  const Vec2 f = plant.drift(x_a);
  const Mat2 g = plant.input_map(x_a);
  require_finite(f, "plant drift");
  if (!is_finite(g))
    throw ControllerFault("non-finite plant input map");

  const Vec2 lgb = g.transpose() * eval.grad_xa;
  const double lgb_sq = lgb.squaredNorm();
  const double I = compute_I(eval, f, g, u_c, xh_dot);
  const double Q = compute_Q(eval, alpha, alpha_dot, params);
  require_finite(eval.B, "barrier");
  require_finite(lgb_sq, "barrier gradient");
  require_finite(I, "I");
  require_finite(Q, "Q");
  const double J = compute_J(I, lgb_sq, eval.l);
  require_finite(J, "J");

  FilterDiagnostics& diag = out.diag;
  diag.I = I;
  diag.Q = Q;
  diag.J = J;
  diag.engaged = I > Q;
  if (!diag.engaged)
    return out;

  if (lgb_sq <= params.sing_floor) {
    diag.singular = true;
    return out;
  }

  out.u_b = -((I + J - Q) / lgb_sq) * lgb;
  require_finite(out.u_b, "u_b");
  const double norm = out.u_b.norm();
  if (norm > params.u_b_cap) {
    out.u_b *= params.u_b_cap / norm;
    diag.saturated = true;
  }
  return out;
}

Vec2 baseline_assist_filter(const Vec2& x, const Vec2& u_h, double t, const TimeVaryingBarrier& barrier,
                            const PlantDescriptor& plant, const CbfParams& params)
{
  require_finite(x, "x");
  require_finite(u_h, "u_h");

  const double B = barrier.value(x, t);
  const Vec2 grad = barrier.gradient(x, t);
  const double dB_dt = barrier.time_derivative(x, t);
  const Vec2 lgb = plant.input_map(x).transpose() * grad;
  const double lgb_sq = lgb.squaredNorm();

  const double I = grad.dot(plant.drift(x)) + lgb.dot(u_h) + dB_dt;
  const double Q = barrier.threshold ? barrier.threshold(x, t) : params.K * B + params.C;
  require_finite(I, "I");
  require_finite(Q, "Q");

  if (!(I > Q) || lgb_sq <= params.sing_floor)
    return Vec2::Zero();
  const Vec2 u = -((I - Q) / lgb_sq) * lgb;
  require_finite(u, "assist input");
  return u;
}

double barrier_time_derivative(double B_prev, double B_next, double dt)
{
  if (!(dt > 0.0))
    throw std::invalid_argument("barrier_time_derivative: dt must be positive");
  return (B_next - B_prev) / dt;
}

double barrier_time_derivative(const BarrierEval& prev, const BarrierEval& next, double dt)
{
  return barrier_time_derivative(prev.B, next.B, dt);
}

}  // namespace hccbf
