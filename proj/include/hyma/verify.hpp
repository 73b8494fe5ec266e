#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <thread>
#include <vector>

#include "hyma/noma_solver.hpp"
#include "hyma/oma_solver.hpp"
#include "hyma/oracle.hpp"
#include "hyma/pairing.hpp"
#include "hyma/rng.hpp"

namespace hyma::verify {

// Randomized closed-form-versus-oracle checks. State ranges cover channel
// gains from deep fade to cell center and backlogs from empty to heavily
// congested; the tolerance is expressed in metric units.
inline double metric_tolerance(const SystemParams& p) {
  return 1e-6 * p.v_weight * p.power_budget_w;
}

inline UserState sample_state(Rng& rng, const SystemParams& params) {
  UserState s;
  s.gamma = std::exp(rng.uniform(0.0, std::log(1e6)));  // log-uniform on [1, 1e6]
  s.queue_bits = rng.uniform_int(0, 100000);
  s.deficit = rng.uniform(0.0, 1e8);
  s.rho_bps = params.rate_threshold_bps;
  s.eta_bps = params.qos_rate_bps;
  s.qos = true;
  return s;
}

// Pair with roles already sorted (first = weaker channel) satisfying the
// closed-form split's precondition 1 < W_i/W_j < Gamma_j/Gamma_i.
inline std::pair<UserState, UserState> sample_precondition_pair(Rng& rng,
                                                                const SystemParams& params) {
  for (;;) {
    UserState a = sample_state(rng, params);
    UserState b = sample_state(rng, params);
    if (a.gamma == b.gamma) continue;
    if (a.gamma > b.gamma) std::swap(a, b);
    const double w_i = queue_pressure(a, params);
    const double w_j = queue_pressure(b, params);
    if (w_j <= 0.0) continue;
    const double ratio = w_i / w_j;
    if (ratio > 1.0 && ratio < b.gamma / a.gamma) return {a, b};
  }
}

namespace detail {
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const int threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> futs;
  futs.reserve(threads);
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    futs.push_back(std::async(std::launch::async, [&]() {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= n) return;
        fn(k);
      }
    }));
  }
  for (auto& f : futs) f.get();
}
}  // namespace detail

struct OmaReport {
  int checked = 0;
  int violations = 0;
  double tolerance = 0.0;
  double max_gap = 0.0;  // solver metric minus grid minimum, worst case
};

inline OmaReport check_oma_closed_form(int n_states, int grid_points, std::uint64_t seed,
                                       const SystemParams& params) {
  OmaReport rep;
  rep.checked = n_states;
  rep.tolerance = metric_tolerance(params);
  std::vector<double> gaps(n_states);
  detail::parallel_for(n_states, [&](int k) {
    Rng rng(hash_seed(seed + static_cast<std::uint64_t>(k)));
    const UserState s = sample_state(rng, params);
    const OmaDecision d = solve_oma(s, params);
    const oracle::GridSpec grid{grid_points, 0.0, params.power_budget_w};
    const oracle::PowerMetric g = oracle::grid_min_oma(s, params, grid);
    gaps[k] = d.metric - g.metric;
  });
  for (double gap : gaps) {
    rep.max_gap = std::max(rep.max_gap, gap);
    if (gap > rep.tolerance) rep.violations++;
  }
  return rep;
}

struct NomaReport {
  int checked = 0;
  int violations = 0;
  double tolerance = 0.0;
  double max_gap = 0.0;
  double median_rel_gap = 0.0;
  double mean_rel_gap = 0.0;
  double p90_rel_gap = 0.0;
  double p99_rel_gap = 0.0;
  double max_rel_gap = 0.0;
};

// Sequential closed form versus the joint 2-D grid. Gaps measure the price of
// the q-then-split decomposition; their distribution is part of the report.
inline NomaReport check_noma_closed_form(int n_states, int points_per_axis,
                                         std::uint64_t seed, const SystemParams& params) {
  NomaReport rep;
  rep.checked = n_states;
  rep.tolerance = metric_tolerance(params);
  std::vector<double> gaps(n_states), rel_gaps(n_states);
  detail::parallel_for(n_states, [&](int k) {
    Rng rng(hash_seed(seed + static_cast<std::uint64_t>(k)));
    const auto [weak, strong] = sample_precondition_pair(rng, params);
    const NomaDecision d = solve_noma_pair(weak, strong, params);
    const double solver_metric = d.useless ? 0.0 : d.metric;
    const oracle::SplitMetric g = oracle::grid_min_noma(weak, strong, params, points_per_axis);
    const double gap = solver_metric - g.metric;
    gaps[k] = gap;
    rel_gaps[k] =
        gap <= 0.0 ? 0.0 : gap / std::max(std::abs(g.metric), rep.tolerance);
  });
  double rel_sum = 0.0;
  for (int k = 0; k < n_states; ++k) {
    rep.max_gap = std::max(rep.max_gap, gaps[k]);
    rep.max_rel_gap = std::max(rep.max_rel_gap, rel_gaps[k]);
    rel_sum += rel_gaps[k];
    if (gaps[k] > rep.tolerance) rep.violations++;
  }
  rep.mean_rel_gap = rel_sum / n_states;
  std::vector<double> sorted = rel_gaps;
  std::sort(sorted.begin(), sorted.end());
  rep.median_rel_gap = sorted[sorted.size() / 2];
  rep.p90_rel_gap = sorted[static_cast<std::size_t>(0.90 * (sorted.size() - 1))];
  rep.p99_rel_gap = sorted[static_cast<std::size_t>(0.99 * (sorted.size() - 1))];
  return rep;
}

struct SplitReport {
  int checked = 0;
  int violations = 0;
  double tolerance = 0.0;
  double max_gap = 0.0;
};

// Split stage alone: solve_split at the sequential pair total versus a dense
// 1-D grid over the same constraint interval [max(0, q-P0), q/2].
inline SplitReport check_split_closed_form(int n_states, int grid_points,
                                           std::uint64_t seed, const SystemParams& params) {
  SplitReport rep;
  rep.checked = n_states;
  rep.tolerance = metric_tolerance(params);
  std::vector<double> gaps(n_states, 0.0);
  detail::parallel_for(n_states, [&](int k) {
    Rng rng(hash_seed(seed + static_cast<std::uint64_t>(k)));
    const auto [weak, strong] = sample_precondition_pair(rng, params);
    const double q = solve_q(weak.queue_bits, weak.deficit, weak.gamma, params);
    if (q <= 0.0) return;
    const SplitResult split = solve_split(q, weak, strong, params);
    const double q_bar = std::max(0.0, q - params.power_budget_w);
    double grid_min = oracle::ref_pair_metric(q - q_bar, q_bar, weak, strong, params);
    for (int g = 1; g < grid_points; ++g) {
      const double p_j = q_bar + (q / 2.0 - q_bar) * g / (grid_points - 1);
      grid_min = std::min(grid_min,
                          oracle::ref_pair_metric(q - p_j, p_j, weak, strong, params));
    }
    gaps[k] = split.metric - grid_min;
  });
  for (double gap : gaps) {
    rep.max_gap = std::max(rep.max_gap, gap);
    if (gap > rep.tolerance) rep.violations++;
  }
  return rep;
}

struct MatchingReport {
  int checked = 0;
  int invalid = 0;
  int worse_than_identity = 0;
  double mean_rel_gap = 0.0;  // versus the exhaustive optimum
  double max_rel_gap = 0.0;
};

inline MatchingReport check_matching(int n_states, int n_users, std::uint64_t seed,
                                     const SystemParams& params) {
  MatchingReport rep;
  rep.checked = n_states;
  SystemParams local = params;
  local.n_users = n_users;
  std::vector<double> rel_gaps(n_states, 0.0);
  std::vector<int> invalid(n_states, 0), worse(n_states, 0);
  detail::parallel_for(n_states, [&](int k) {
    Rng rng(hash_seed(seed + static_cast<std::uint64_t>(k)));
    std::vector<UserState> states(n_users);
    for (auto& s : states) s = sample_state(rng, local);
    const PreferenceTable table = build_preferences(states, local);
    const Matching alg = pair_users(table, states, local);
    if (!alg.valid()) invalid[k] = 1;
    const double alg_metric = total_metric(alg, table);
    const double identity_metric = total_metric(Matching(n_users), table);
    if (alg_metric > identity_metric + 1e-9 * std::abs(identity_metric)) worse[k] = 1;
    const oracle::MatchingMetric opt = oracle::exhaustive_matching(table);
    const double gap = alg_metric - opt.metric;
    if (gap > 0.0 && opt.metric < 0.0) rel_gaps[k] = gap / std::abs(opt.metric);
  });
  double sum = 0.0;
  for (int k = 0; k < n_states; ++k) {
    rep.invalid += invalid[k];
    rep.worse_than_identity += worse[k];
    sum += rel_gaps[k];
    rep.max_rel_gap = std::max(rep.max_rel_gap, rel_gaps[k]);
  }
  rep.mean_rel_gap = sum / n_states;
  return rep;
}

}  // namespace hyma::verify
