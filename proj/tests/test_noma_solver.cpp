#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hyma/noma_solver.hpp"
#include "hyma/oracle.hpp"
#include "hyma/verify.hpp"

using namespace hyma;

namespace {
UserState state(double gamma, std::uint64_t q_bits, double z, const SystemParams& p) {
  UserState s;
  s.gamma = gamma;
  s.queue_bits = q_bits;
  s.deficit = z;
  s.rho_bps = p.rate_threshold_bps;
  s.eta_bps = p.qos_rate_bps;
  s.qos = true;
  return s;
}

// Smooth both-users-served split objective at fixed q (no outage gating).
double smooth_g(double p_j, double q, const UserState& si, const UserState& sj,
                const SystemParams& p) {
  const RatePair r = noma_rates(q - p_j, p_j, si.gamma, sj.gamma, p);
  return p.v_weight * q - queue_pressure(si, p) * r.rate_non_sic_bps -
         queue_pressure(sj, p) * r.rate_sic_bps;
}
}  // namespace

TEST_CASE("pair metric basics") {
  const SystemParams p;
  const UserState si = state(2e3, 40000, 1e6, p);
  const UserState sj = state(8e4, 20000, 5e5, p);

  REQUIRE(pair_metric(0.0, 0.0, si, sj, p) == 0.0);

  // SIC user silent: reduces to a single-user term with the pair rate formula
  const double p_i = 1.7;
  const RatePair r = noma_rates(p_i, 0.0, si.gamma, sj.gamma, p);
  const double expected =
      p.v_weight * p_i -
      queue_pressure(si, p) * effective_rate(r.rate_non_sic_bps, si.rho_bps);
  REQUIRE(pair_metric(p_i, 0.0, si, sj, p) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pair metric matches the independent re-implementation") {
  const SystemParams p;
  Rng rng(31);
  for (int k = 0; k < 2000; ++k) {
    UserState a = verify::sample_state(rng, p);
    UserState b = verify::sample_state(rng, p);
    if (a.gamma > b.gamma) std::swap(a, b);
    const double p_j = rng.uniform(0.0, p.power_budget_w);
    const double p_i = p_j + rng.uniform(0.0, p.power_budget_w - p_j);
    const double lib = pair_metric(p_i, p_j, a, b, p);
    const double ref = oracle::ref_pair_metric(p_i, p_j, a, b, p);
    if (lib == 0.0 || ref == 0.0)
      REQUIRE(lib == ref);
    else
      REQUIRE(lib == Catch::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("pair total solve_q") {
  const SystemParams p;

  SECTION("empty queue means no pair power") {
    REQUIRE(solve_q(0, 0.0, 1e4, p) == 0.0);
  }

  SECTION("huge pressure clamps at the doubled budget") {
    REQUIRE(solve_q(1000000, 1e9, 1e4, p) == 2.0 * p.power_budget_w);
  }

  SECTION("grid oracle on the q-dependent objective term") {
    // f(q) = V*q - (2*Phi*B*W_i/N)*log2(1 + N*Gamma_i*q/2): the only part of
    // the pair objective that moves with q once the split is held fixed.
    Rng rng(32);
    for (int k = 0; k < 500; ++k) {
      const UserState s = verify::sample_state(rng, p);
      const double q_n = solve_q(s.queue_bits, s.deficit, s.gamma, p);
      const double w = queue_pressure(s, p);
      auto f = [&](double q) {
        return p.v_weight * q -
               2.0 * p.blocklength_factor * p.bandwidth_hz * w / p.n_users *
                   std::log2(1.0 + p.n_users * s.gamma * q / 2.0);
      };
      double grid_best = f(0.0);
      const int points = 10000;
      for (int g = 0; g <= points; ++g)
        grid_best = std::min(grid_best, f(2.0 * p.power_budget_w * g / points));
      REQUIRE(f(q_n) <= grid_best + verify::metric_tolerance(p));
    }
  }
}

TEST_CASE("interior split candidate") {
  const SystemParams p;

  SECTION("degenerate when backlog weights are equal") {
    REQUIRE(!split_candidate(1000, 0.0, 1000, 0.0, 1e3, 1e4, p).has_value());
  }

  SECTION("zero numerator pins the candidate at zero") {
    // Gamma_i*W_i == Gamma_j*W_j with W_i != W_j
    const double tau = p.slot_duration_s;
    const std::uint64_t qi = 20000, qj = 10000;
    const double gi = 1e3;
    const double gj = gi * (tau * qi) / (tau * qj);
    const auto c = split_candidate(qi, 0.0, qj, 0.0, gi, gj, p);
    REQUIRE(c.has_value());
    REQUIRE(std::abs(*c) < 1e-12);
  }

  SECTION("under the precondition the candidate is a positive stationary minimum") {
    Rng rng(33);
    for (int k = 0; k < 300; ++k) {
      const auto [si, sj] = verify::sample_precondition_pair(rng, p);
      const auto c = split_candidate(si.queue_bits, si.deficit, sj.queue_bits, sj.deficit,
                                     si.gamma, sj.gamma, p);
      REQUIRE(c.has_value());
      REQUIRE(*c > 0.0);

      const double q = 2.0 * p.power_budget_w;  // wide interval for the derivative probe
      if (*c >= q / 2.0) continue;

      // central differences carry a cancellation floor of ~eps*|g|/h
      const double h = std::max(*c * 1e-4, 1e-8);
      const double g_scale = std::abs(smooth_g(*c, q, si, sj, p));
      const double noise = 1024.0 * 2.2e-16 * g_scale / h;
      const double d_at_c =
          (smooth_g(*c + h, q, si, sj, p) - smooth_g(*c - h, q, si, sj, p)) / (2.0 * h);
      const double d_at_0 =
          (smooth_g(2.0 * h, q, si, sj, p) - smooth_g(0.0, q, si, sj, p)) / (2.0 * h);
      REQUIRE(std::abs(d_at_c) < 1e-9 * std::abs(d_at_0) + noise);

      // local minimality probe with a slack for flat neighborhoods
      const double delta = std::max(*c * 1e-3, 1e-7);
      const double at = smooth_g(*c, q, si, sj, p);
      REQUIRE(at <= smooth_g(*c + delta, q, si, sj, p) + 1e-12 * g_scale);
      REQUIRE(at <= smooth_g(std::max(*c - delta, 0.0), q, si, sj, p) + 1e-12 * g_scale);
    }
  }
}

TEST_CASE("split solver") {
  const SystemParams p;
  const UserState si = state(2e3, 60000, 2e6, p);
  const UserState sj = state(8e4, 30000, 1e6, p);

  SECTION("no power to split") {
    const SplitResult r = solve_split(0.0, si, sj, p);
    REQUIRE(r.metric == 0.0);
    REQUIRE(r.p_j == 0.0);
  }

  SECTION("non-SIC user unreachable for every split: equal split serves SIC only") {
    // Gamma_i = 1 makes the non-SIC outage bound negative for any q <= 2*P0
    const UserState far = state(1.0, 60000, 2e6, p);
    const double q = 5.0;
    REQUIRE(noma_outage_power_non_sic(far.rho_bps, far.gamma, q, p) < 0.0);
    const SplitResult r = solve_split(q, far, sj, p);
    REQUIRE(r.p_j == q / 2.0);
  }

  SECTION("split stays inside the constraint interval") {
    Rng rng(34);
    for (int k = 0; k < 2000; ++k) {
      UserState a = verify::sample_state(rng, p);
      UserState b = verify::sample_state(rng, p);
      if (a.gamma > b.gamma) std::swap(a, b);
      const double q = rng.uniform(0.0, 2.0 * p.power_budget_w);
      const SplitResult r = solve_split(q, a, b, p);
      REQUIRE(r.p_j >= std::max(0.0, q - p.power_budget_w) - 1e-15);
      REQUIRE(r.p_j <= q / 2.0 + 1e-15);
    }
  }
}

TEST_CASE("pair solver end to end") {
  const SystemParams p;

  SECTION("both queues empty") {
    const UserState a = state(2e3, 0, 0.0, p);
    const UserState b = state(8e4, 0, 0.0, p);
    const NomaDecision d = solve_noma_pair(a, b, p);
    REQUIRE(d.useless);
    REQUIRE(d.power_non_sic_w == 0.0);
    REQUIRE(d.power_sic_w == 0.0);
    REQUIRE(d.metric == 0.0);
  }

  SECTION("decisions are always feasible") {
    Rng rng(35);
    for (int k = 0; k < 5000; ++k) {
      UserState a = verify::sample_state(rng, p);
      UserState b = verify::sample_state(rng, p);
      if (a.gamma > b.gamma) std::swap(a, b);
      const NomaDecision d = solve_noma_pair(a, b, p);
      if (d.useless) {
        REQUIRE(d.power_non_sic_w == 0.0);
        REQUIRE(d.power_sic_w == 0.0);
        REQUIRE(d.metric == 0.0);
        continue;
      }
      REQUIRE(d.metric < 0.0);
      REQUIRE(d.power_sic_w >= 0.0);
      REQUIRE(d.power_sic_w <= d.power_non_sic_w + 1e-12);
      REQUIRE(d.power_non_sic_w <= p.power_budget_w + 1e-12);
      REQUIRE(d.power_non_sic_w + d.power_sic_w ==
              Catch::Approx(d.total_q_w).margin(1e-9));
      REQUIRE(d.metric ==
              Catch::Approx(d.metric_non_sic + d.metric_sic).margin(1e-6));
    }
  }

  SECTION("split stage is exact against a dense 1-D grid at the sequential q") {
    const auto rep = verify::check_split_closed_form(300, 20000, 77, p);
    INFO("max gap " << rep.max_gap << " vs tolerance " << rep.tolerance);
    REQUIRE(rep.violations == 0);
  }

  SECTION("sequential decomposition versus the joint 2-D grid, reported") {
    // The q-then-split decomposition is not jointly optimal once the pair
    // total clamps at 2*P0; the gap distribution is tracked, not asserted.
    const auto rep = verify::check_noma_closed_form(100, 300, 77, p);
    WARN("sequential vs joint: " << rep.violations << "/" << rep.checked
                                 << " above tolerance, median rel gap "
                                 << rep.median_rel_gap << ", max rel gap "
                                 << rep.max_rel_gap);
    REQUIRE(rep.max_gap >= 0.0);
  }

  SECTION("useless or not, the pair never beats zero by accident") {
    Rng rng(36);
    for (int k = 0; k < 2000; ++k) {
      UserState a = verify::sample_state(rng, p);
      UserState b = verify::sample_state(rng, p);
      if (a.gamma > b.gamma) std::swap(a, b);
      const NomaDecision d = solve_noma_pair(a, b, p);
      REQUIRE(d.metric <= 0.0);
    }
  }
}
