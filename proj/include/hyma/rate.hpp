#pragma once

#include <cmath>
#include <limits>

#include "hyma/config.hpp"

namespace hyma {

struct RatePair {
  double rate_non_sic_bps = 0.0;  // R_i, decoded under the SIC user's interference
  double rate_sic_bps = 0.0;      // R_j, interference-free after SIC
};

namespace rate_detail {
constexpr double kLn2 = 0.69314718055994530942;
inline double log2_1p(double x) { return std::log1p(x) / kLn2; }
}  // namespace rate_detail

// Dedicated B/N slice, finite-blocklength degradation Phi.
inline double oma_rate(double p, double gamma, const SystemParams& params) {
  if (p <= 0 || gamma <= 0) return 0.0;
  const double n = params.n_users;
  return params.blocklength_factor * params.bandwidth_hz / n *
         rate_detail::log2_1p(n * gamma * p);
}

// Minimum power that keeps the OMA rate at or above rho. Inverse of oma_rate.
inline double oma_outage_power(double rho, double gamma, const SystemParams& params) {
  if (gamma <= 0) return std::numeric_limits<double>::infinity();
  const double n = params.n_users;
  const double k = std::exp2(n * rho / (params.blocklength_factor * params.bandwidth_hz));
  return (k - 1.0) / (n * gamma);
}

// Pair on a shared 2B/N slice, half-power normalization. The non-SIC user i
// decodes against the SIC user's superposed signal; roles require gamma_j > gamma_i.
inline RatePair noma_rates(double p_i, double p_j, double gamma_i, double gamma_j,
                           const SystemParams& params) {
  const double n = params.n_users;
  const double prelog = 2.0 * params.blocklength_factor * params.bandwidth_hz / n;
  RatePair r;
  if (p_i > 0 && gamma_i > 0)
    r.rate_non_sic_bps =
        prelog * rate_detail::log2_1p(n * gamma_i * p_i / 2.0 /
                                      (n * gamma_i * p_j / 2.0 + 1.0));
  if (p_j > 0 && gamma_j > 0)
    r.rate_sic_bps = prelog * rate_detail::log2_1p(n * gamma_j * p_j / 2.0);
  return r;
}

// Minimum P_j that keeps the SIC user's rate at or above rho_j.
inline double noma_outage_power_sic(double rho_j, double gamma_j,
                                    const SystemParams& params) {
  if (gamma_j <= 0) return std::numeric_limits<double>::infinity();
  const double n = params.n_users;
  const double k =
      std::exp2(n * rho_j / (2.0 * params.blocklength_factor * params.bandwidth_hz));
  return 2.0 / (n * gamma_j) * (k - 1.0);
}

// Largest P_j that keeps the non-SIC user's rate at or above rho_i when the
// pair spends q in total. May be negative: then user i is in outage for every
// split of q. Slightly conservative: the rate at this P_j exceeds rho_i by
// (2*Phi*B/N)*log2(1 + 2/(N*gamma_i*q)).
inline double noma_outage_power_non_sic(double rho_i, double gamma_i, double q,
                                        const SystemParams& params) {
  const double n = params.n_users;
  const double k =
      std::exp2(n * rho_i / (2.0 * params.blocklength_factor * params.bandwidth_hz));
  return (q - 2.0 / (n * gamma_i) * k) / k;
}

// Exact inverse of the non-SIC rate in P_j: rate_non_sic(q - x, x) == rho_i.
inline double noma_non_sic_rate_inverse(double rho_i, double gamma_i, double q,
                                        const SystemParams& params) {
  const double n = params.n_users;
  const double k =
      std::exp2(n * rho_i / (2.0 * params.blocklength_factor * params.bandwidth_hz));
  return (q - 2.0 / (n * gamma_i) * (k - 1.0)) / k;
}

// Outage gating: rates below the instantaneous threshold do not count.
inline double effective_rate(double r, double rho) { return r >= rho ? r : 0.0; }

}  // namespace hyma
