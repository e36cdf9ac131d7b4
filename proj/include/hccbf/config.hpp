// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "hccbf/cbf.hpp"
#include "hccbf/dynamics.hpp"
#include "hccbf/haptics.hpp"
#include "hccbf/plant.hpp"
#include "hccbf/scenario.hpp"

namespace hccbf {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Everything an episode needs besides the operator.
struct ExperimentConfig {
  ScenarioConfig scenario = default_scenario();
  CbfParams cbf;
  IntegratorConfig integrator;
  DeviceParams device;
  std::string plant = "single-integrator";

  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing sections fall back to defaults. A document with a top-level
/// "config" key (an episode sidecar) is unwrapped. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& file);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& file);

/// Hex SHA-256 of the canonical JSON dump.
std::string sha256_hex(const std::string& data);
std::string config_hash(const ExperimentConfig& cfg);
std::string scenario_hash(const ScenarioConfig& sc);

}  // namespace hccbf
