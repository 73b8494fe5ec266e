#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hyma/config.hpp"
#include "hyma/noma_solver.hpp"
#include "hyma/oma_solver.hpp"
#include "hyma/state.hpp"

namespace hyma {

// Involutive pairing map over the user set. partner[i] == i means OMA.
struct Matching {
  std::vector<int> partner;

  Matching() = default;
  explicit Matching(int n) : partner(n) {
    std::iota(partner.begin(), partner.end(), 0);
  }

  int size() const { return static_cast<int>(partner.size()); }

  bool valid() const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
      if (partner[i] < 0 || partner[i] >= n) return false;
      if (partner[partner[i]] != i) return false;
    }
    return true;
  }
};

// Deterministic role assignment: the weaker-channel member of a pair is the
// non-SIC user; ties break toward the lower index.
inline int weaker_of(int a, int b, const std::vector<UserState>& states) {
  if (states[a].gamma != states[b].gamma)
    return states[a].gamma < states[b].gamma ? a : b;
  return std::min(a, b);
}

// All N^2 directed pair costs solved once per slot, plus the per-user ordered
// preference lists built from them. metric[a][b] is user a's own cost share
// when paired with b; metric[a][a] is its OMA cost.
struct PreferenceTable {
  std::vector<std::vector<int>> prefs;
  std::vector<std::vector<double>> metric;
  std::vector<OmaDecision> oma;
  std::vector<std::vector<NomaDecision>> noma;  // symmetric storage, unused on diagonal
};

inline PreferenceTable build_preferences(const std::vector<UserState>& states,
                                         const SystemParams& params) {
  const int n = static_cast<int>(states.size());
  PreferenceTable t;
  t.prefs.resize(n);
  t.metric.assign(n, std::vector<double>(n, 0.0));
  t.oma.resize(n);
  t.noma.assign(n, std::vector<NomaDecision>(n));

  for (int i = 0; i < n; ++i) {
    t.oma[i] = solve_oma(states[i], params);
    t.metric[i][i] = t.oma[i].metric;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int w = weaker_of(i, j, states);
      const int s = w == i ? j : i;
      const NomaDecision d = solve_noma_pair(states[w], states[s], params);
      t.noma[i][j] = d;
      t.noma[j][i] = d;
      t.metric[w][s] = d.metric_non_sic;
      t.metric[s][w] = d.metric_sic;
    }
  }

  // Only strictly improving partners enter a list; a zero cost is equivalent
  // to staying silent. Self-entries rank the OMA option.
  for (int i = 0; i < n; ++i) {
    auto& list = t.prefs[i];
    for (int j = 0; j < n; ++j)
      if (t.metric[i][j] < 0) list.push_back(j);
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      if (t.metric[i][a] != t.metric[i][b]) return t.metric[i][a] < t.metric[i][b];
      return a < b;
    });
  }
  return t;
}

inline double total_metric(const Matching& m, const PreferenceTable& t) {
  double sum = 0.0;
  for (int i = 0; i < m.size(); ++i) sum += t.metric[i][m.partner[i]];
  return sum;
}

namespace pairing_detail {
inline bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Best remaining preference of `user`, skipping the exclusion set. -1 when the
// list is exhausted (the user stays single).
inline int best_remaining(int user, const std::vector<int>& excluded,
                          const PreferenceTable& t) {
  for (int cand : t.prefs[user])
    if (!contains(excluded, cand)) return cand;
  return -1;
}

inline Matching match_request_impl(int u_i, int u_j, Matching psi, std::vector<int> excluded,
                                   const PreferenceTable& t, int depth);

// A displaced user proposes to its best remaining preference; a self or
// exhausted proposal means it stays single.
inline Matching repropose(int user, Matching psi, std::vector<int> excluded,
                          const PreferenceTable& t, int depth) {
  const int next = best_remaining(user, excluded, t);
  if (next < 0 || next == user) return psi;
  return match_request_impl(user, next, std::move(psi), std::move(excluded), t, depth + 1);
}

inline Matching match_request_impl(int u_i, int u_j, Matching psi, std::vector<int> excluded,
                                   const PreferenceTable& t, int depth) {
  if (depth > psi.size())
    throw std::logic_error("match request displacement chain exceeded user count");

  if (u_i == u_j) {  // a paired user asking to fall back to OMA
    const int m = psi.partner[u_i];
    if (m != u_i) {
      psi.partner[u_i] = u_i;
      psi.partner[m] = m;
      excluded.push_back(u_i);
      psi = repropose(m, std::move(psi), std::move(excluded), t, depth);
    }
    return psi;
  }

  const int m = psi.partner[u_i];
  const int p = psi.partner[u_j];
  psi.partner[u_i] = u_j;
  psi.partner[u_j] = u_i;
  if (m != u_i) psi.partner[m] = m;
  if (p != u_j) psi.partner[p] = p;

  std::vector<int> excl = excluded;
  excl.push_back(u_i);
  excl.push_back(u_j);

  if (m != u_i) {
    const int n = best_remaining(m, excl, t);
    if (n >= 0 && n != m) {
      if (n == p) {
        psi.partner[m] = p;
        psi.partner[p] = m;
      } else {
        psi = match_request_impl(m, n, std::move(psi), excl, t, depth + 1);
      }
    }
  }
  if (p != u_j && psi.partner[p] == p) {
    const int q = best_remaining(p, excl, t);
    if (q >= 0 && q != p)
      psi = match_request_impl(p, q, std::move(psi), excl, t, depth + 1);
  }
  return psi;
}
}  // namespace pairing_detail

// Builds the candidate matching in which u_j accepts u_i's request: the two
// are paired, displaced former partners re-propose down their lists
// (recursively, excluding the users already re-matched along the chain) until
// everyone is matched. Acceptance is decided by the caller.
inline Matching match_request(int u_i, int u_j, const Matching& current,
                              const std::vector<int>& excluded, const PreferenceTable& t) {
  return pairing_detail::match_request_impl(u_i, u_j, current, excluded, t, 0);
}

// Deferred-acceptance pass: each user proposes down its preference list; a
// candidate matching is adopted only when the total cost strictly decreases.
inline Matching pair_users(const PreferenceTable& t, const std::vector<UserState>& states,
                           const SystemParams& params) {
  (void)states;
  (void)params;
  const int n = static_cast<int>(t.prefs.size());
  Matching psi(n);
  double current_total = total_metric(psi, t);

  for (int i = 0; i < n; ++i) {
    for (int j : t.prefs[i]) {
      if (j == psi.partner[i]) break;
      const Matching cand = match_request(i, j, psi, {}, t);
      const double cand_total = total_metric(cand, t);
      if (current_total > cand_total) {
        psi = cand;
        current_total = cand_total;
        break;
      }
    }
  }
  return psi;
}

}  // namespace hyma
