#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hyma/rate.hpp"
#include "hyma/rng.hpp"

using namespace hyma;

namespace {
SystemParams table_defaults() { return SystemParams{}; }
}  // namespace

TEST_CASE("oma rate basics") {
  const SystemParams p = table_defaults();
  REQUIRE(oma_rate(0.0, 1e4, p) == 0.0);

  // N*Gamma*p == 1 puts the rate exactly at Phi*B/N
  const double gamma = 1.0, power = 1.0 / p.n_users;
  REQUIRE(oma_rate(power, gamma, p) ==
          Catch::Approx(p.blocklength_factor * p.bandwidth_hz / p.n_users).epsilon(1e-12));

  // plug-in oracle at the default operating point
  REQUIRE(oma_rate(0.075, 1.6e4, p) == Catch::Approx(6997849.578547582).epsilon(1e-9));
}

TEST_CASE("oma outage power inverts the rate") {
  const SystemParams p = table_defaults();
  REQUIRE(oma_outage_power(1.0, 1e4, p) > 0.0);
  REQUIRE(oma_outage_power(1e-6, 1e4, p) < 1e-12);  // rho -> 0 limit
  REQUIRE(std::isinf(oma_outage_power(7e6, 0.0, p)));

  REQUIRE(oma_outage_power(7e6, 1.6e4, p) ==
          Catch::Approx(0.07524884350451065).epsilon(1e-12));

  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const double rho = rng.uniform(1e5, 2e7);
    const double gamma = std::exp(rng.uniform(0.0, std::log(1e6)));
    const double p_th = oma_outage_power(rho, gamma, p);
    REQUIRE(oma_rate(p_th, gamma, p) == Catch::Approx(rho).epsilon(1e-9));
  }
}

TEST_CASE("noma rates") {
  const SystemParams p = table_defaults();
  const double gi = 2e3, gj = 5e4;

  SECTION("zero powers") {
    const RatePair r = noma_rates(0.0, 0.0, gi, gj, p);
    REQUIRE(r.rate_non_sic_bps == 0.0);
    REQUIRE(r.rate_sic_bps == 0.0);
  }

  SECTION("interference-free limit when the SIC user is silent") {
    const double p_i = 1.3;
    const RatePair r = noma_rates(p_i, 0.0, gi, gj, p);
    REQUIRE(r.rate_sic_bps == 0.0);
    const double expected = 2.0 * p.blocklength_factor * p.bandwidth_hz / p.n_users *
                            std::log2(1.0 + p.n_users * gi * p_i / 2.0);
    REQUIRE(r.rate_non_sic_bps == Catch::Approx(expected).epsilon(1e-12));
  }

  SECTION("non-SIC rate strictly decreases in the SIC power") {
    const double p_i = 2.0;
    double prev = noma_rates(p_i, 0.0, gi, gj, p).rate_non_sic_bps;
    for (double p_j = 0.1; p_j <= 2.0; p_j += 0.1) {
      const double cur = noma_rates(p_i, p_j, gi, gj, p).rate_non_sic_bps;
      REQUIRE(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("sic outage power inverts the sic rate") {
  const SystemParams p = table_defaults();
  REQUIRE(noma_outage_power_sic(1e-6, 1e4, p) < 1e-12);
  REQUIRE(std::isinf(noma_outage_power_sic(7e6, 0.0, p)));

  // explicit 1/Gamma_j scaling
  const double t1 = noma_outage_power_sic(7e6, 1e4, p);
  const double t2 = noma_outage_power_sic(7e6, 2e4, p);
  REQUIRE(t1 == Catch::Approx(2.0 * t2).epsilon(1e-12));

  Rng rng(12);
  for (int k = 0; k < 1000; ++k) {
    const double rho = rng.uniform(1e5, 2e7);
    const double gj = std::exp(rng.uniform(0.0, std::log(1e6)));
    const double p_oj = noma_outage_power_sic(rho, gj, p);
    const RatePair r = noma_rates(0.0, p_oj, 1.0, gj, p);
    REQUIRE(r.rate_sic_bps == Catch::Approx(rho).epsilon(1e-9));
  }
}

TEST_CASE("non-sic outage power") {
  const SystemParams p = table_defaults();
  const double gi = 3e3;

  // rho_i -> 0 collapses the exponent to 1: q - 2/(N*Gamma_i)
  const double q = 2.0;
  REQUIRE(noma_outage_power_non_sic(0.0, gi, q, p) ==
          Catch::Approx(q - 2.0 / (p.n_users * gi)).epsilon(1e-12));

  // q = 0 leaves user i in outage for every split
  REQUIRE(noma_outage_power_non_sic(7e6, gi, 0.0, p) < 0.0);

  // The threshold is the conservative closed form: the rate it yields sits
  // above rho_i by exactly (2*Phi*B/N)*log2(1 + 2/(N*Gamma_i*q)).
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) {
    const double rho = rng.uniform(1e5, 1e7);
    const double gamma = std::exp(rng.uniform(std::log(1e2), std::log(1e6)));
    const double qq = rng.uniform(0.5, 6.0);
    const double p_oi = noma_outage_power_non_sic(rho, gamma, qq, p);
    if (p_oi < 0.0) continue;
    const RatePair r = noma_rates(qq - p_oi, p_oi, gamma, 1e6, p);
    const double excess = 2.0 * p.blocklength_factor * p.bandwidth_hz / p.n_users *
                          std::log2(1.0 + 2.0 / (p.n_users * gamma * qq));
    REQUIRE(r.rate_non_sic_bps >= rho);
    REQUIRE(r.rate_non_sic_bps == Catch::Approx(rho + excess).epsilon(1e-9));
    // the exact inverse lands on rho itself
    const double exact = noma_non_sic_rate_inverse(rho, gamma, qq, p);
    if (exact >= 0.0) {
      const RatePair re = noma_rates(qq - exact, exact, gamma, 1e6, p);
      REQUIRE(re.rate_non_sic_bps == Catch::Approx(rho).epsilon(1e-9));
    }
  }
}

TEST_CASE("effective rate gating is boundary inclusive") {
  REQUIRE(effective_rate(7e6, 7e6) == 7e6);
  REQUIRE(effective_rate(7e6 - 1.0, 7e6) == 0.0);
  REQUIRE(effective_rate(14e6, 7e6) == 14e6);
}

TEST_CASE("noma can beat the oma rate sum at equal total power") {
  const SystemParams p = table_defaults();
  Rng rng(14);
  for (int k = 0; k < 50; ++k) {
    const double gi = std::exp(rng.uniform(std::log(1e3), std::log(1e5)));
    const double gj = gi * rng.uniform(2.0, 50.0);
    const double q = rng.uniform(1.0, 6.0);
    const double oma_sum =
        oma_rate(q / 2.0, gi, p) + oma_rate(q / 2.0, gj, p);
    double best = 0.0;
    for (int s = 0; s <= 200; ++s) {
      const double p_j = q / 2.0 * s / 200.0;
      const RatePair r = noma_rates(q - p_j, p_j, gi, gj, p);
      best = std::max(best, r.rate_non_sic_bps + r.rate_sic_bps);
    }
    REQUIRE(best > oma_sum);
  }
}
