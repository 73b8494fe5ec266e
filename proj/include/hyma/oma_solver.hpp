#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "hyma/config.hpp"
#include "hyma/rate.hpp"
#include "hyma/state.hpp"

namespace hyma {

struct OmaDecision {
  double power_w = 0.0;
  double metric = 0.0;   // V*p - (tau*Q + Z~)*R~(p) at power_w
  double rate_bps = 0.0;
  bool in_outage = true;
};

// Relative nudge that keeps a power chosen exactly at an outage threshold on
// the served side of the gate under floating-point evaluation.
constexpr double kServeMargin = 1e-9;

namespace oma_detail {
inline double metric_at(double p, double pressure, double gamma, double rho,
                        const SystemParams& params) {
  const double r_eff = effective_rate(oma_rate(p, gamma, params), rho);
  return params.v_weight * p - pressure * r_eff;
}

// Closed-form minimizer of the per-user cost over [0, P0]. The unconstrained
// stationary point is P* = Phi*B*(tau*Q + Z~)/(N*V*ln2) - 1/(N*Gamma); the
// selection walks the four cases of its position relative to the outage
// threshold and the budget. Ties at zero cost resolve to zero power.
inline OmaDecision solve(double pressure, double gamma, double rho,
                         const SystemParams& params) {
  OmaDecision d;
  if (gamma <= 0) return d;  // unservable slot, stay silent

  const double p0 = params.power_budget_w;
  const double n = params.n_users;
  const double p_th = oma_outage_power(rho, gamma, params);
  const double p_star = params.blocklength_factor * params.bandwidth_hz * pressure /
                            (n * params.v_weight * rate_detail::kLn2) -
                        1.0 / (n * gamma);

  double chosen = 0.0;
  if (p_th <= p0) {
    const double p_serve = std::min(p_th * (1.0 + kServeMargin), p0);
    if (p0 <= p_star) {
      if (metric_at(p0, pressure, gamma, rho, params) < 0) chosen = p0;
    } else if (p_th <= p_star) {
      chosen = p_star;
    } else if (metric_at(p_serve, pressure, gamma, rho, params) < 0) {
      chosen = p_serve;
    }
  }

  d.power_w = chosen;
  d.rate_bps = oma_rate(chosen, gamma, params);
  const double r_eff = effective_rate(d.rate_bps, rho);
  d.metric = params.v_weight * chosen - pressure * r_eff;
  d.in_outage = r_eff <= 0;
  if (d.metric >= 0 && chosen > 0) {
    // Zero power is always feasible at zero cost; never return worse.
    d = OmaDecision{};
  }
  return d;
}
}  // namespace oma_detail

// Per-user drift-plus-penalty cost of spending p: V*p - (tau*Q + Z~)*R~(p).
// Equals V*p whenever p is below the outage threshold.
inline double oma_metric(double p, std::uint64_t q_bits, double z_tilde, double gamma,
                         const SystemParams& params) {
  const double pressure =
      params.slot_duration_s * static_cast<double>(q_bits) + z_tilde;
  return oma_detail::metric_at(p, pressure, gamma, params.rate_threshold_bps, params);
}

inline OmaDecision solve_oma(std::uint64_t q_bits, double z_tilde, double gamma,
                             const SystemParams& params) {
  const double pressure =
      params.slot_duration_s * static_cast<double>(q_bits) + z_tilde;
  return oma_detail::solve(pressure, gamma, params.rate_threshold_bps, params);
}

inline OmaDecision solve_oma(const UserState& s, const SystemParams& params) {
  return oma_detail::solve(queue_pressure(s, params), s.gamma, s.rho_bps, params);
}

}  // namespace hyma
