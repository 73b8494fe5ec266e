#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "hyma/config.hpp"
#include "hyma/oma_solver.hpp"
#include "hyma/rate.hpp"
#include "hyma/state.hpp"

namespace hyma {

// Power allocation for one NOMA pair. Role convention throughout: i is the
// weaker-channel (non-SIC) member, j the stronger-channel (SIC) member.
struct NomaDecision {
  double power_non_sic_w = 0.0;  // P_i
  double power_sic_w = 0.0;      // P_j
  double total_q_w = 0.0;        // q = P_i + P_j
  double metric = 0.0;           // pair cost; 0 when useless
  double metric_non_sic = 0.0;   // V*P_i - (tau*Q_i + Z~_i)*R~_i
  double metric_sic = 0.0;
  RatePair rates;
  bool useless = true;  // NOMA rejected for this pair, both powers zero
};

// Joint pair cost with per-user outage gating; the two directed terms are
// what the preference lists rank.
inline double pair_metric(double p_i, double p_j, const UserState& state_i,
                          const UserState& state_j, const SystemParams& params) {
  const RatePair r = noma_rates(p_i, p_j, state_i.gamma, state_j.gamma, params);
  const double share_i =
      params.v_weight * p_i -
      queue_pressure(state_i, params) * effective_rate(r.rate_non_sic_bps, state_i.rho_bps);
  const double share_j =
      params.v_weight * p_j -
      queue_pressure(state_j, params) * effective_rate(r.rate_sic_bps, state_j.rho_bps);
  return share_i + share_j;
}

// Pair power total from the weak user's stationary condition:
// q* = (2/(N*Gamma_i)) * (Phi*B*Gamma_i*(tau*Q_i + Z_i)/(V*ln2) - 1),
// clamped to [0, 2*P0]. Zero means NOMA is useless for the pair.
inline double solve_q(std::uint64_t q_bits_i, double z_i, double gamma_i,
                      const SystemParams& params) {
  if (gamma_i <= 0) return 0.0;
  const double pressure =
      params.slot_duration_s * static_cast<double>(q_bits_i) + z_i;
  const double q_star = 2.0 * params.blocklength_factor * params.bandwidth_hz * pressure /
                            (params.n_users * params.v_weight * rate_detail::kLn2) -
                        2.0 / (params.n_users * gamma_i);
  return std::clamp(q_star, 0.0, 2.0 * params.power_budget_w);
}

// Interior stationary point of the fixed-q split objective. Undefined when
// both users carry identical backlog weight.
inline std::optional<double> split_candidate(std::uint64_t q_bits_i, double z_i,
                                             std::uint64_t q_bits_j, double z_j,
                                             double gamma_i, double gamma_j,
                                             const SystemParams& params) {
  const double tau = params.slot_duration_s;
  const double w_i = tau * static_cast<double>(q_bits_i) + z_i;
  const double w_j = tau * static_cast<double>(q_bits_j) + z_j;
  if (w_i == w_j || gamma_i <= 0 || gamma_j <= 0) return std::nullopt;
  return 2.0 / (params.n_users * gamma_i * gamma_j) * (gamma_j * w_j - gamma_i * w_i) /
         (w_i - w_j);
}

struct SplitResult {
  double p_j = 0.0;
  double metric = 0.0;
  double metric_non_sic = 0.0;
  double metric_sic = 0.0;
  RatePair rates;
};

namespace noma_detail {
struct Eval {
  double p_j;
  double metric;
  double share_i;
  double share_j;
  RatePair rates;
};

inline Eval eval_split(double p_j, double q, const UserState& si, const UserState& sj,
                       const SystemParams& params) {
  const double p_i = q - p_j;
  const RatePair r = noma_rates(p_i, p_j, si.gamma, sj.gamma, params);
  Eval e;
  e.p_j = p_j;
  e.rates = r;
  e.share_i = params.v_weight * p_i -
              queue_pressure(si, params) * effective_rate(r.rate_non_sic_bps, si.rho_bps);
  e.share_j = params.v_weight * p_j -
              queue_pressure(sj, params) * effective_rate(r.rate_sic_bps, sj.rho_bps);
  e.metric = e.share_i + e.share_j;
  return e;
}
}  // namespace noma_detail

// Split of a fixed pair total q between SIC power P_j and non-SIC power
// q - P_j, minimizing the exact gated pair cost. The feasible interval is
// [max(0, q-P0), q/2]; the minimum of the piecewise objective is attained at
// an interval endpoint, an outage-region boundary, or the interior stationary
// point, so those candidates are enumerated directly. The outage boundaries
// are also entered with a one-part-in-1e9 nudge toward the served side so the
// floating-point gate matches the analytic case.
inline SplitResult solve_split(double q, const UserState& weak, const UserState& strong,
                               const SystemParams& params) {
  SplitResult out;
  if (q <= 0) return out;

  const double q_bar = std::max(0.0, q - params.power_budget_w);
  const double half = q / 2.0;

  double cand[8];
  int n_cand = 0;
  cand[n_cand++] = q_bar;
  cand[n_cand++] = half;
  const double p_oj = noma_outage_power_sic(strong.rho_bps, strong.gamma, params);
  if (std::isfinite(p_oj)) {
    cand[n_cand++] = p_oj;
    cand[n_cand++] = p_oj * (1.0 + kServeMargin);
  }
  if (weak.gamma > 0) {
    cand[n_cand++] = noma_outage_power_non_sic(weak.rho_bps, weak.gamma, q, params);
    cand[n_cand++] =
        noma_non_sic_rate_inverse(weak.rho_bps, weak.gamma, q, params) *
        (1.0 - kServeMargin);
  }
  const auto p_star = split_candidate(weak.queue_bits, weak.qos ? weak.deficit : 0.0,
                                      strong.queue_bits, strong.qos ? strong.deficit : 0.0,
                                      weak.gamma, strong.gamma, params);
  if (p_star) cand[n_cand++] = std::clamp(*p_star, q_bar, half);

  bool found = false;
  noma_detail::Eval best{};
  for (int k = 0; k < n_cand; ++k) {
    const double p_j = cand[k];
    if (!(p_j >= q_bar && p_j <= half)) continue;
    const noma_detail::Eval e = noma_detail::eval_split(p_j, q, weak, strong, params);
    if (!found || e.metric < best.metric) {
      best = e;
      found = true;
    }
  }
  if (!found) {  // interval collapsed to a point by rounding
    best = noma_detail::eval_split(half, q, weak, strong, params);
  }
  out.p_j = best.p_j;
  out.metric = best.metric;
  out.metric_non_sic = best.share_i;
  out.metric_sic = best.share_j;
  out.rates = best.rates;
  return out;
}

// Sequential two-stage solution for a fixed pair: total q from the weak
// user's condition, then the split. A pair whose best cost is not strictly
// negative is useless: both powers zero, cost zero.
inline NomaDecision solve_noma_pair(const UserState& weak, const UserState& strong,
                                    const SystemParams& params) {
  NomaDecision d;
  if (weak.gamma <= 0) return d;

  const double q = solve_q(weak.queue_bits, weak.qos ? weak.deficit : 0.0, weak.gamma, params);
  if (q <= 0) return d;

  const SplitResult split = solve_split(q, weak, strong, params);
  if (split.metric >= 0) return d;

  d.useless = false;
  d.power_sic_w = split.p_j;
  d.power_non_sic_w = std::min(q - split.p_j, params.power_budget_w);
  d.total_q_w = q;
  d.metric = split.metric;
  d.metric_non_sic = split.metric_non_sic;
  d.metric_sic = split.metric_sic;
  d.rates = split.rates;
  return d;
}

}  // namespace hyma
