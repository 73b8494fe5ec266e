#pragma once

#include <cmath>
#include <stdexcept>

#include "hyma/config.hpp"
#include "hyma/rng.hpp"

namespace hyma {

struct ChannelState {
  double gain_per_watt = 0.0;  // Gamma_n = |h_n|^2 / (B*N0)
  double fading_power = 0.0;   // |fast fading|^2, exponential with mean 1
  double path_loss_db = 0.0;
};

inline double path_loss_db(double distance_m, const SystemParams& params) {
  if (!(distance_m > 0)) throw std::invalid_argument("distance must be > 0");
  const double lg = params.path_loss_log_base == "e" ? std::log(distance_m)
                                                     : std::log10(distance_m);
  return 35.3 + 37.6 * lg;
}

// Single-sided noise PSD converted from dBm/Hz to W/Hz.
inline double noise_psd_w_per_hz(const SystemParams& params) {
  return std::pow(10.0, (params.noise_psd_dbm_hz - 30.0) / 10.0);
}

inline ChannelState make_channel_state(double fading_power, double distance_m,
                                       const SystemParams& params) {
  ChannelState st;
  st.fading_power = fading_power;
  st.path_loss_db = path_loss_db(distance_m, params);
  const double h2 = fading_power * std::pow(10.0, -st.path_loss_db / 10.0);
  st.gain_per_watt = h2 / (params.bandwidth_hz * noise_psd_w_per_hz(params));
  return st;
}

// Independent per-slot draw: Rayleigh fading power on top of distance path loss.
inline ChannelState sample_channel(const UserProfile& profile, const SystemParams& params,
                                   Rng& rng) {
  return make_channel_state(rng.exponential(), profile.distance_m, params);
}

}  // namespace hyma
