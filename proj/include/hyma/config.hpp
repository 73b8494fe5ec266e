#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyma/rng.hpp"

namespace hyma {

// Cell-wide parameters. Defaults are the standard URLLC short-frame
// operating point this simulator is built around.
struct SystemParams {
  int n_users = 40;                   // N
  double power_budget_w = 3.0;        // P0, per link
  double bandwidth_hz = 20e6;         // B
  double noise_psd_dbm_hz = -173.0;   // N0
  double blocklength_factor = 0.9;    // Phi in (0,1]
  double v_weight = 5e5;              // V, power/backlog tradeoff weight
  double slot_duration_s = 1e-4;      // tau_c, one scheduling slot
  std::uint64_t packet_bits = 160;    // u
  std::uint64_t arrival_min = 5;      // packets per slot, lower bound
  std::uint64_t arrival_max = 10;     // packets per slot, upper bound
  double cell_radius_m = 50.0;        // R
  double e2e_bound_s = 1e-3;          // D_max
  double tti_s = 1e-4;                // T_t, UL+DL transmission time
  double rate_threshold_bps = 7e6;    // rho, applied to every user
  double qos_rate_bps = 8.5e6;        // eta, applied to every QoS user
  std::string path_loss_log_base = "10";          // "10" or "e"
  std::optional<std::vector<int>> qos_user_set;   // nullopt = all users

  bool in_qos_set(int user) const {
    if (!qos_user_set) return true;
    for (int u : *qos_user_set)
      if (u == user) return true;
    return false;
  }
};

struct UserProfile {
  double distance_m = 0.0;
  double rate_threshold_bps = 0.0;  // rho_n
  double qos_rate_bps = 0.0;        // eta_n
};

inline void validate(const SystemParams& p) {
  if (p.n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (!(p.power_budget_w > 0)) throw std::invalid_argument("power_budget_w must be > 0");
  if (!(p.bandwidth_hz > 0)) throw std::invalid_argument("bandwidth_hz must be > 0");
  if (!(p.blocklength_factor > 0 && p.blocklength_factor <= 1))
    throw std::invalid_argument("blocklength_factor must be in (0,1]");
  if (p.v_weight < 0) throw std::invalid_argument("v_weight must be >= 0");
  if (!(p.slot_duration_s > 0)) throw std::invalid_argument("slot_duration_s must be > 0");
  if (p.arrival_min > p.arrival_max)
    throw std::invalid_argument("arrival_min must be <= arrival_max");
  if (!(p.cell_radius_m > 0)) throw std::invalid_argument("cell_radius_m must be > 0");
  if (!(p.e2e_bound_s - p.tti_s > 0))
    throw std::invalid_argument("queueing delay margin e2e_bound_s - tti_s must be > 0");
  if (p.path_loss_log_base != "10" && p.path_loss_log_base != "e")
    throw std::invalid_argument("path_loss_log_base must be \"10\" or \"e\"");
  if (p.rate_threshold_bps <= 0) throw std::invalid_argument("rate_threshold_bps must be > 0");
  if (p.qos_rate_bps < 0) throw std::invalid_argument("qos_rate_bps must be >= 0");
  if (p.qos_user_set) {
    for (int u : *p.qos_user_set)
      if (u < 0 || u >= p.n_users) throw std::invalid_argument("qos_user_set index out of range");
  }
}

// Queueing-delay budget left after the UL+DL transmission interval.
inline double delay_margin(const SystemParams& p) {
  const double margin = p.e2e_bound_s - p.tti_s;
  if (!(margin > 0))
    throw std::invalid_argument("non-positive queueing delay margin");
  return margin;
}

// Users placed uniformly over the disk of radius R (area density:
// radius = R*sqrt(U)). Pure function of (params, seed).
inline std::vector<UserProfile> generate_scenario(const SystemParams& params,
                                                  std::uint64_t seed) {
  validate(params);
  Rng rng(seed);
  std::vector<UserProfile> profiles(params.n_users);
  for (auto& u : profiles) {
    u.distance_m = params.cell_radius_m * std::sqrt(rng.uniform_pos());
    u.rate_threshold_bps = params.rate_threshold_bps;
    u.qos_rate_bps = params.qos_rate_bps;
  }
  return profiles;
}

inline void to_json(nlohmann::json& j, const SystemParams& p) {
  j = nlohmann::json{
      {"n_users", p.n_users},
      {"power_budget_w", p.power_budget_w},
      {"bandwidth_hz", p.bandwidth_hz},
      {"noise_psd_dbm_hz", p.noise_psd_dbm_hz},
      {"blocklength_factor", p.blocklength_factor},
      {"v_weight", p.v_weight},
      {"slot_duration_s", p.slot_duration_s},
      {"packet_bits", p.packet_bits},
      {"arrival_min", p.arrival_min},
      {"arrival_max", p.arrival_max},
      {"cell_radius_m", p.cell_radius_m},
      {"e2e_bound_s", p.e2e_bound_s},
      {"tti_s", p.tti_s},
      {"rate_threshold_bps", p.rate_threshold_bps},
      {"qos_rate_bps", p.qos_rate_bps},
      {"path_loss_log_base", p.path_loss_log_base},
  };
  if (p.qos_user_set) j["qos_user_set"] = *p.qos_user_set;
}

inline void from_json(const nlohmann::json& j, SystemParams& p) {
  p = SystemParams{};
  j.at("n_users").get_to(p.n_users);
  j.at("power_budget_w").get_to(p.power_budget_w);
  j.at("bandwidth_hz").get_to(p.bandwidth_hz);
  j.at("noise_psd_dbm_hz").get_to(p.noise_psd_dbm_hz);
  j.at("blocklength_factor").get_to(p.blocklength_factor);
  j.at("v_weight").get_to(p.v_weight);
  j.at("slot_duration_s").get_to(p.slot_duration_s);
  j.at("packet_bits").get_to(p.packet_bits);
  j.at("arrival_min").get_to(p.arrival_min);
  j.at("arrival_max").get_to(p.arrival_max);
  j.at("cell_radius_m").get_to(p.cell_radius_m);
  j.at("e2e_bound_s").get_to(p.e2e_bound_s);
  j.at("tti_s").get_to(p.tti_s);
  j.at("rate_threshold_bps").get_to(p.rate_threshold_bps);
  j.at("qos_rate_bps").get_to(p.qos_rate_bps);
  if (j.contains("path_loss_log_base")) j.at("path_loss_log_base").get_to(p.path_loss_log_base);
  if (j.contains("qos_user_set"))
    p.qos_user_set = j.at("qos_user_set").get<std::vector<int>>();
}

inline SystemParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  SystemParams p = j.get<SystemParams>();
  validate(p);
  return p;
}

inline void save_params(const SystemParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << nlohmann::json(p).dump(2) << "\n";
}

}  // namespace hyma
