#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "hyma/config.hpp"
#include "hyma/pairing.hpp"
#include "hyma/rng.hpp"
#include "hyma/state.hpp"

namespace hyma::oracle {

// Brute-force verifiers for the closed-form solvers and the matching. The
// metric here is re-implemented from scratch (rates, gating, thresholds) so a
// transcription slip in the solver path cannot cancel out of the comparison.

struct GridSpec {
  int points = 100000;
  double lo = 0.0;
  double hi = 0.0;
};

inline double ref_oma_rate(double p, double gamma, const SystemParams& pr) {
  if (p <= 0.0 || gamma <= 0.0) return 0.0;
  const double n = pr.n_users;
  const double prelog = pr.blocklength_factor * pr.bandwidth_hz / (n * std::log(2.0));
  return prelog * std::log1p(n * gamma * p);
}

inline double ref_oma_metric(double p, const UserState& s, const SystemParams& pr) {
  const double w = pr.slot_duration_s * static_cast<double>(s.queue_bits) +
                   (s.qos ? s.deficit : 0.0);
  const double r = ref_oma_rate(p, s.gamma, pr);
  return pr.v_weight * p - (r >= s.rho_bps ? w * r : 0.0);
}

inline double ref_pair_metric(double p_i, double p_j, const UserState& si,
                              const UserState& sj, const SystemParams& pr) {
  const double n = pr.n_users;
  const double prelog =
      2.0 * pr.blocklength_factor * pr.bandwidth_hz / (n * std::log(2.0));
  const double w_i = pr.slot_duration_s * static_cast<double>(si.queue_bits) +
                     (si.qos ? si.deficit : 0.0);
  const double w_j = pr.slot_duration_s * static_cast<double>(sj.queue_bits) +
                     (sj.qos ? sj.deficit : 0.0);
  double r_i = 0.0;
  if (p_i > 0.0 && si.gamma > 0.0)
    r_i = prelog * std::log1p(n * si.gamma * p_i / 2.0 /
                              (n * si.gamma * p_j / 2.0 + 1.0));
  double r_j = 0.0;
  if (p_j > 0.0 && sj.gamma > 0.0)
    r_j = prelog * std::log1p(n * sj.gamma * p_j / 2.0);
  return pr.v_weight * (p_i + p_j) - (r_i >= si.rho_bps ? w_i * r_i : 0.0) -
         (r_j >= sj.rho_bps ? w_j * r_j : 0.0);
}

struct PowerMetric {
  double power = 0.0;
  double metric = 0.0;
};

// Grid minimum of the per-user OMA cost over [grid.lo, grid.hi], with the
// closed form's own candidate points appended so discretization can never
// favor the closed form.
inline PowerMetric grid_min_oma(const UserState& s, const SystemParams& pr,
                                const GridSpec& grid) {
  PowerMetric best{0.0, ref_oma_metric(0.0, s, pr)};
  auto consider = [&](double p) {
    if (!(p >= grid.lo && p <= grid.hi)) return;
    const double m = ref_oma_metric(p, s, pr);
    if (m < best.metric) best = {p, m};
  };

  const double step = (grid.hi - grid.lo) / (grid.points - 1);
  for (int k = 0; k < grid.points; ++k) consider(grid.lo + step * k);

  if (s.gamma > 0.0) {
    const double n = pr.n_users;
    const double w = pr.slot_duration_s * static_cast<double>(s.queue_bits) +
                     (s.qos ? s.deficit : 0.0);
    const double p_th =
        (std::pow(2.0, n * s.rho_bps / (pr.blocklength_factor * pr.bandwidth_hz)) - 1.0) /
        (n * s.gamma);
    const double p_star = pr.blocklength_factor * pr.bandwidth_hz * w /
                              (n * pr.v_weight * std::log(2.0)) -
                          1.0 / (n * s.gamma);
    consider(p_th);
    consider(p_th * (1.0 + 1e-9));
    consider(std::clamp(p_star, grid.lo, grid.hi));
    consider(pr.power_budget_w);
  }
  return best;
}

struct SplitMetric {
  double p_i = 0.0;
  double p_j = 0.0;
  double metric = 0.0;
};

namespace detail {
// Closed-form split candidates at a fixed pair total q, re-derived here:
// constraint interval endpoints, outage boundaries (nudged onto the served
// side) and the interior stationary point. The piecewise objective attains
// its minimum over [max(0, q-P0), q/2] at one of these points.
inline void split_candidates_for_q(double q, const UserState& si, const UserState& sj,
                                   const SystemParams& pr,
                                   const std::function<void(double, double)>& consider) {
  if (q <= 0.0) return;
  const double n = pr.n_users;
  const double phi_b = pr.blocklength_factor * pr.bandwidth_hz;
  const double w_i = pr.slot_duration_s * static_cast<double>(si.queue_bits) +
                     (si.qos ? si.deficit : 0.0);
  const double w_j = pr.slot_duration_s * static_cast<double>(sj.queue_bits) +
                     (sj.qos ? sj.deficit : 0.0);
  const double q_bar = std::max(0.0, q - pr.power_budget_w);
  const double half = q / 2.0;
  const double k_j = std::pow(2.0, n * sj.rho_bps / (2.0 * phi_b));
  const double k_i = std::pow(2.0, n * si.rho_bps / (2.0 * phi_b));

  double cands[8];
  int count = 0;
  cands[count++] = q_bar;
  cands[count++] = half;
  if (sj.gamma > 0.0) {
    const double p_oj = 2.0 / (n * sj.gamma) * (k_j - 1.0);
    cands[count++] = p_oj;
    cands[count++] = p_oj * (1.0 + 1e-9);
  }
  if (si.gamma > 0.0) {
    cands[count++] = (q - 2.0 / (n * si.gamma) * k_i) / k_i;
    cands[count++] = (q - 2.0 / (n * si.gamma) * (k_i - 1.0)) / k_i * (1.0 - 1e-9);
    if (w_i != w_j && sj.gamma > 0.0)
      cands[count++] = std::clamp(2.0 / (n * si.gamma * sj.gamma) *
                                      (sj.gamma * w_j - si.gamma * w_i) / (w_i - w_j),
                                  q_bar, half);
  }
  for (int k = 0; k < count; ++k)
    if (cands[k] >= q_bar && cands[k] <= half) consider(q - cands[k], cands[k]);
}

// Pair total of the sequential closed form, re-derived from the weak user's
// stationary condition.
inline double sequential_q(const UserState& si, const SystemParams& pr) {
  if (si.gamma <= 0.0) return 0.0;
  const double w_i = pr.slot_duration_s * static_cast<double>(si.queue_bits) +
                     (si.qos ? si.deficit : 0.0);
  return std::clamp(2.0 * pr.blocklength_factor * pr.bandwidth_hz * w_i /
                            (pr.n_users * pr.v_weight * std::log(2.0)) -
                        2.0 / (pr.n_users * si.gamma),
                    0.0, 2.0 * pr.power_budget_w);
}
}  // namespace detail

// Joint 2-D minimum of the pair cost over the feasible triangle
// 0 <= p_j <= p_i <= P0. Three layers: a raw triangle grid, the closed-form
// split candidates at every gridded q (exact in the P_j dimension, so thin
// served slivers are never lost to discretization), and the sequential
// scheme's own point.
inline SplitMetric grid_min_noma(const UserState& si, const UserState& sj,
                                 const SystemParams& pr, int points_per_axis) {
  SplitMetric best{0.0, 0.0, ref_pair_metric(0.0, 0.0, si, sj, pr)};
  auto consider = [&](double p_i, double p_j) {
    const double m = ref_pair_metric(p_i, p_j, si, sj, pr);
    if (m < best.metric) best = {p_i, p_j, m};
  };

  const double step = pr.power_budget_w / (points_per_axis - 1);
  for (int a = 0; a < points_per_axis; ++a) {
    const double p_i = step * a;
    for (int b = 0; b <= a; ++b) consider(p_i, step * b);
  }
  for (int a = 1; a <= 2 * (points_per_axis - 1); ++a)
    detail::split_candidates_for_q(step * a, si, sj, pr, consider);
  detail::split_candidates_for_q(detail::sequential_q(si, pr), si, sj, pr, consider);
  return best;
}

struct MatchingMetric {
  Matching matching;
  double metric = 0.0;
};

// Number of involutions of {1..n} (telephone numbers).
inline std::uint64_t involution_count(int n) {
  if (n <= 1) return 1;
  return involution_count(n - 1) +
         static_cast<std::uint64_t>(n - 1) * involution_count(n - 2);
}

namespace detail {
inline void enum_involutions(int n, int from, Matching& cur, std::vector<bool>& used,
                             const std::function<void(const Matching&)>& visit) {
  int i = from;
  while (i < n && used[i]) ++i;
  if (i == n) {
    visit(cur);
    return;
  }
  used[i] = true;
  cur.partner[i] = i;
  enum_involutions(n, i + 1, cur, used, visit);
  for (int j = i + 1; j < n; ++j) {
    if (used[j]) continue;
    used[j] = true;
    cur.partner[i] = j;
    cur.partner[j] = i;
    enum_involutions(n, i + 1, cur, used, visit);
    used[j] = false;
    cur.partner[j] = j;
  }
  cur.partner[i] = i;
  used[i] = false;
}
}  // namespace detail

inline void for_each_involution(int n, const std::function<void(const Matching&)>& visit) {
  Matching cur(n);
  std::vector<bool> used(n, false);
  detail::enum_involutions(n, 0, cur, used, visit);
}

// Metric-minimal matching by enumerating every involution of the user set.
inline MatchingMetric exhaustive_matching(const PreferenceTable& table) {
  const int n = static_cast<int>(table.prefs.size());
  if (n > 8) throw std::invalid_argument("exhaustive matching limited to 8 users");
  MatchingMetric best;
  best.matching = Matching(n);
  best.metric = total_metric(best.matching, table);
  for_each_involution(n, [&](const Matching& m) {
    const double v = total_metric(m, table);
    if (v < best.metric) {
      best.matching = m;
      best.metric = v;
    }
  });
  return best;
}

inline MatchingMetric exhaustive_matching(const std::vector<UserState>& states,
                                          const SystemParams& params) {
  return exhaustive_matching(build_preferences(states, params));
}

}  // namespace hyma::oracle
