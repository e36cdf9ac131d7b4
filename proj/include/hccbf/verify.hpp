// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hccbf/simulation.hpp"

namespace hccbf {

struct VerifyParams {
  double containment_tol = 1e-3;  ///< m
  double bdot_slack = 1e-3;       ///< barrier units / s
  double rate_tol = 1e-9;         ///< m/s
  std::size_t max_listed = 20;    ///< violations kept per check
};

struct Violation {
  std::int64_t step = 0;
  double value = 0.0;
  double bound = 0.0;
};

struct CheckResult {
  std::string name;
  bool skipped = false;
  std::string note;
  std::int64_t checked = 0;
  std::int64_t violation_count = 0;
  std::vector<Violation> violations;  ///< first max_listed

  bool passed() const { return violation_count == 0; }
};

struct VerificationReport {
  bool mode_rejected = false;
  std::string reason;
  std::vector<CheckResult> checks;
  std::int64_t excluded_saturated = 0;
  std::int64_t excluded_singular = 0;
  std::int64_t excluded_branch_transition = 0;

  bool ok() const;
  const CheckResult* find(const std::string& name) const;
};

/// Per-step invariant checks over a proposed-mode log:
///   containment      ||x_h - x_a|| <= beta + tol (only when the episode starts inside)
///   barrier_bound    (B[k+1] - B[k]) / dt <= K B[k] + C + slack
///   outside_decrease (B[k+1] - B[k]) / dt < 0 while l < 0 at both ends of the step
///   passive_when_idle  u_b == 0 whenever I <= Q
///   radius_rate      beta_dot >= -shrink_limit - tol
///   input_sum        u_a == u_c + u_b (bitwise)
/// The two barrier checks skip saturated, singular and branch-crossing steps,
/// which are counted separately.
VerificationReport verify(const EpisodeLog& log, const VerifyParams& params = {});

std::string render(const VerificationReport& r);
nlohmann::json to_json(const VerificationReport& r);

}  // namespace hccbf
