#pragma once

#include <cstdint>

#include "hyma/config.hpp"

namespace hyma {

// Per-user decision input for one slot: channel, backlogs, QoS targets.
struct UserState {
  double gamma = 0.0;             // channel gain per watt this slot
  std::uint64_t queue_bits = 0;   // Q_n
  double deficit = 0.0;           // Z_n
  double rho_bps = 0.0;           // instantaneous-rate threshold
  double eta_bps = 0.0;           // time-average QoS target
  bool qos = true;                // member of the QoS user set
};

// tau*Q + Z~, the backlog weight every power decision trades against V*P.
// The deficit only counts for QoS users.
inline double queue_pressure(const UserState& s, const SystemParams& params) {
  return params.slot_duration_s * static_cast<double>(s.queue_bits) +
         (s.qos ? s.deficit : 0.0);
}

}  // namespace hyma
