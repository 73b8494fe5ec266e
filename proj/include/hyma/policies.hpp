#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyma/config.hpp"
#include "hyma/pairing.hpp"
#include "hyma/state.hpp"

namespace hyma {

enum class Policy { OptHybrid, OptOma, PMax, PMin };

inline const char* policy_name(Policy p) {
  switch (p) {
    case Policy::OptHybrid: return "opt-hybrid";
    case Policy::OptOma: return "opt-oma";
    case Policy::PMax: return "pmax";
    case Policy::PMin: return "pmin";
  }
  return "?";
}

inline Policy parse_policy(std::string name) {
  std::replace(name.begin(), name.end(), '_', '-');
  if (name == "opt-hybrid" || name == "hybrid") return Policy::OptHybrid;
  if (name == "opt-oma" || name == "oma") return Policy::OptOma;
  if (name == "pmax") return Policy::PMax;
  if (name == "pmin") return Policy::PMin;
  throw std::invalid_argument("unknown policy: " + name);
}

inline bool is_opt_policy(Policy p) {
  return p == Policy::OptHybrid || p == Policy::OptOma;
}

// Joint per-slot decision: pairing plus per-user transmit powers and the
// rates they imply.
struct SlotDecision {
  Matching matching;
  std::vector<double> powers_w;
  std::vector<double> predicted_rates_bps;
  std::vector<double> effective_rates_bps;
};

namespace policy_detail {
inline SlotDecision make_blank(int n) {
  SlotDecision d;
  d.matching = Matching(n);
  d.powers_w.assign(n, 0.0);
  d.predicted_rates_bps.assign(n, 0.0);
  d.effective_rates_bps.assign(n, 0.0);
  return d;
}
}  // namespace policy_detail

inline SlotDecision policy_opt_oma(const std::vector<UserState>& states,
                                   const SystemParams& params) {
  const int n = static_cast<int>(states.size());
  SlotDecision d = policy_detail::make_blank(n);
  for (int i = 0; i < n; ++i) {
    const OmaDecision u = solve_oma(states[i], params);
    d.powers_w[i] = u.power_w;
    d.predicted_rates_bps[i] = u.rate_bps;
    d.effective_rates_bps[i] = effective_rate(u.rate_bps, states[i].rho_bps);
  }
  return d;
}

inline SlotDecision policy_opt_hybrid(const std::vector<UserState>& states,
                                      const SystemParams& params) {
  const int n = static_cast<int>(states.size());
  SlotDecision d = policy_detail::make_blank(n);
  const PreferenceTable prefs = build_preferences(states, params);
  d.matching = pair_users(prefs, states, params);

  for (int i = 0; i < n; ++i) {
    const int j = d.matching.partner[i];
    if (j == i) {
      const OmaDecision& u = prefs.oma[i];
      d.powers_w[i] = u.power_w;
      d.predicted_rates_bps[i] = u.rate_bps;
    } else {
      const NomaDecision& pd = prefs.noma[i][j];
      const bool i_weak = weaker_of(i, j, states) == i;
      d.powers_w[i] = i_weak ? pd.power_non_sic_w : pd.power_sic_w;
      d.predicted_rates_bps[i] = i_weak ? pd.rates.rate_non_sic_bps : pd.rates.rate_sic_bps;
    }
    d.effective_rates_bps[i] = effective_rate(d.predicted_rates_bps[i], states[i].rho_bps);
  }
  return d;
}

// Full budget on every link that is not hopeless at full power.
inline SlotDecision policy_pmax(const std::vector<UserState>& states,
                                const SystemParams& params) {
  const int n = static_cast<int>(states.size());
  SlotDecision d = policy_detail::make_blank(n);
  for (int i = 0; i < n; ++i) {
    const double p_th = oma_outage_power(states[i].rho_bps, states[i].gamma, params);
    if (p_th <= params.power_budget_w) {
      d.powers_w[i] = params.power_budget_w;
      d.predicted_rates_bps[i] = oma_rate(d.powers_w[i], states[i].gamma, params);
      d.effective_rates_bps[i] = effective_rate(d.predicted_rates_bps[i], states[i].rho_bps);
    }
  }
  return d;
}

// Just enough power to clear the outage threshold; links whose threshold
// exceeds the budget stay silent.
inline SlotDecision policy_pmin(const std::vector<UserState>& states,
                                const SystemParams& params) {
  const int n = static_cast<int>(states.size());
  SlotDecision d = policy_detail::make_blank(n);
  for (int i = 0; i < n; ++i) {
    const double p_th = oma_outage_power(states[i].rho_bps, states[i].gamma, params);
    if (p_th <= params.power_budget_w) {
      d.powers_w[i] = std::min(p_th * (1.0 + kServeMargin), params.power_budget_w);
      d.predicted_rates_bps[i] = oma_rate(d.powers_w[i], states[i].gamma, params);
      d.effective_rates_bps[i] = effective_rate(d.predicted_rates_bps[i], states[i].rho_bps);
    }
  }
  return d;
}

inline SlotDecision decide(Policy policy, const std::vector<UserState>& states,
                           const SystemParams& params) {
  switch (policy) {
    case Policy::OptHybrid: return policy_opt_hybrid(states, params);
    case Policy::OptOma: return policy_opt_oma(states, params);
    case Policy::PMax: return policy_pmax(states, params);
    case Policy::PMin: return policy_pmin(states, params);
  }
  throw std::logic_error("unhandled policy");
}

}  // namespace hyma
