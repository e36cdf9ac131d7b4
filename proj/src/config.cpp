// Copyright (c) 2026 The hccbf Authors
// Use of this source code is governed by the Apache-2.0 license, see LICENSE
#include "hccbf/config.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace hccbf {
namespace {

constexpr int kSchemaVersion = 1;

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out)
{
  if (j.contains(key))
    out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::validate() const
{
  try {
    scenario.validate();
    cbf.validate();
    integrator.validate();
    device.validate();
    plant_by_name(plant);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json to_json(const ExperimentConfig& cfg)
{
  nlohmann::json sc;
  to_json(sc, cfg.scenario);
  return {
      {"schema_version", kSchemaVersion},
      {"plant", cfg.plant},
      {"scenario", sc},
      {"cbf",
       {{"K_per_s", cfg.cbf.K},
        {"C", cfg.cbf.C},
        {"alpha_max_m", cfg.cbf.alpha_max},
        {"sing_floor", cfg.cbf.sing_floor},
        {"u_b_cap_mps", cfg.cbf.u_b_cap}}},
      {"integrator",
       {{"dt_s", cfg.integrator.dt},
        {"scheme", to_string(cfg.integrator.scheme)},
        {"epsilon_s", cfg.integrator.epsilon},
        {"v_max_mps", cfg.integrator.v_max},
        {"rate_limit_condition", to_string(cfg.integrator.condition)}}},
      {"device",
       {{"K_joy_mps_per_rad", cfg.device.K_joy},
        {"K_theta_m_per_rad", cfg.device.K_theta},
        {"inertia_kgm2", cfg.device.inertia},
        {"damping_Nms_per_rad", cfg.device.damping},
        {"K_guid_Nm_per_rad", cfg.device.K_guid},
        {"guidance_damping_Nms_per_rad", cfg.device.guidance_damping},
        {"theta_max_rad", cfg.device.theta_max},
        {"phi_limit_rad", {cfg.device.phi_limit.x(), cfg.device.phi_limit.y()}},
        {"simulate_dynamics", cfg.device.simulate_dynamics},
        {"live_grip_stiffness_Nm_per_rad", cfg.device.live_grip_stiffness}}},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& doc)
{
  try {
    const nlohmann::json& j = doc.contains("config") ? doc.at("config") : doc;
    if (!j.is_object())
      throw ConfigError("config must be a JSON object");
    const int version = j.value("schema_version", kSchemaVersion);
    if (version != kSchemaVersion)
      throw ConfigError("config schema_version " + std::to_string(version) + " is not supported");

    ExperimentConfig cfg;
    read(j, "plant", cfg.plant);
    if (j.contains("scenario"))
      from_json(j.at("scenario"), cfg.scenario);
    else if (j.contains("path_m"))  // a bare scenario document
      from_json(j, cfg.scenario);

    if (j.contains("cbf")) {
      const auto& c = j.at("cbf");
      read(c, "K_per_s", cfg.cbf.K);
      read(c, "C", cfg.cbf.C);
      read(c, "alpha_max_m", cfg.cbf.alpha_max);
      read(c, "sing_floor", cfg.cbf.sing_floor);
      read(c, "u_b_cap_mps", cfg.cbf.u_b_cap);
    }
    if (j.contains("integrator")) {
      const auto& c = j.at("integrator");
      read(c, "dt_s", cfg.integrator.dt);
      read(c, "epsilon_s", cfg.integrator.epsilon);
      read(c, "v_max_mps", cfg.integrator.v_max);
      if (c.contains("scheme"))
        cfg.integrator.scheme = scheme_from_string(c.at("scheme").get<std::string>());
      if (c.contains("rate_limit_condition"))
        cfg.integrator.condition = rate_limit_condition_from_string(c.at("rate_limit_condition").get<std::string>());
    }
    if (j.contains("device")) {
      const auto& c = j.at("device");
      read(c, "K_joy_mps_per_rad", cfg.device.K_joy);
      read(c, "K_theta_m_per_rad", cfg.device.K_theta);
      read(c, "inertia_kgm2", cfg.device.inertia);
      read(c, "damping_Nms_per_rad", cfg.device.damping);
      read(c, "K_guid_Nm_per_rad", cfg.device.K_guid);
      read(c, "guidance_damping_Nms_per_rad", cfg.device.guidance_damping);
      read(c, "theta_max_rad", cfg.device.theta_max);
      if (c.contains("phi_limit_rad")) {
        const auto& lim = c.at("phi_limit_rad");
        cfg.device.phi_limit = Vec2(lim.at(0).get<double>(), lim.at(1).get<double>());
      }
      read(c, "simulate_dynamics", cfg.device.simulate_dynamics);
      read(c, "live_grip_stiffness_Nm_per_rad", cfg.device.live_grip_stiffness);
    }
    cfg.validate();
    return cfg;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& file)
{
  std::ifstream in(file);
  if (!in)
    throw ConfigError("cannot open config '" + file.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config '" + file.string() + "': " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& file)
{
  if (file.has_parent_path())
    std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("cannot write '" + file.string() + "'");
  out << to_json(cfg).dump(2) << '\n';
}

std::string sha256_hex(const std::string& data)
{
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

std::string scenario_hash(const ScenarioConfig& sc)
{
  nlohmann::json j;
  to_json(j, sc);
  return sha256_hex(j.dump());
}

}  // namespace hccbf
