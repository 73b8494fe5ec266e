#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hyma/channel.hpp"
#include "hyma/config.hpp"
#include "hyma/policies.hpp"
#include "hyma/queueing.hpp"
#include "hyma/rng.hpp"

namespace hyma {

// Delays are integer slot counts; everything above the histogram range lands
// in the overflow bucket and only matters for runs with divergent queues.
constexpr std::uint64_t kDelayHistSize = 1 << 16;

struct StabilityReport {
  bool stable = true;
  double middle_mean = 0.0;
  double final_mean = 0.0;
};

// Mean backlog over the middle fifth of the horizon versus the final fifth;
// divergence is flagged when the final window exceeds the middle by >50%.
inline StabilityReport stability_check(const std::vector<double>& backlog_series) {
  StabilityReport r;
  const std::size_t len = backlog_series.size();
  if (len < 5) return r;
  auto window_mean = [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += backlog_series[i];
    return s / static_cast<double>(hi - lo);
  };
  r.middle_mean = window_mean(len * 2 / 5, len * 3 / 5);
  r.final_mean = window_mean(len * 4 / 5, len);
  r.stable = !(r.final_mean > 1.5 * r.middle_mean);
  return r;
}

struct MetricsTrace {
  // run identity
  std::uint64_t horizon_slots = 0;
  std::uint64_t warmup_slots = 0;
  std::uint64_t seed = 0;
  SystemParams params;

  // reported time averages (post warm-up)
  double time_avg_power_sum_w = 0.0;
  std::vector<double> per_user_time_avg_rate_bps;
  double avg_rate_bps = 0.0;  // mean over users
  double max_expected_queueing_delay_s = 0.0;
  double p999_delay_s = 0.0;
  double low_latency_rate = 1.0;
  bool low_latency_defined = false;
  bool stable = true;

  // full-horizon quantities backing the virtual-queue QoS identity
  std::vector<double> full_avg_eff_rate_bps;
  std::vector<double> final_deficit;  // Z(T) per user

  // packet delay census (slots): served delays and ages of packets still
  // queued at the horizon
  std::vector<std::uint64_t> delay_hist;
  std::vector<std::uint64_t> leftover_age_hist;
  std::uint64_t max_delay_slots = 0;
  std::uint64_t served_packets = 0;
  std::uint64_t leftover_packets = 0;

  // full-horizon bit accounting (exact): arrivals - served == final backlog
  std::uint64_t total_arrival_bits = 0;
  std::uint64_t total_served_bits = 0;
  std::uint64_t final_backlog_bits = 0;

  std::vector<double> backlog_series;          // per-slot total queued bits
  std::vector<double> virtual_backlog_series;  // per-slot total deficit
  std::vector<double> power_series;            // per-slot transmit power sum
};

inline std::uint64_t margin_in_slots(double margin_s, const SystemParams& params) {
  return static_cast<std::uint64_t>(
      std::floor(margin_s / params.slot_duration_s * (1.0 + 1e-12)));
}

// Fraction of packets whose queueing delay stayed within margin_s. Packets
// still queued at the horizon count as failures once their age exceeds the
// margin; younger in-flight packets are excluded as undecided.
inline double low_latency_rate(const MetricsTrace& trace, double margin_s) {
  const std::uint64_t margin = margin_in_slots(margin_s, trace.params);
  std::uint64_t ok = 0;
  for (std::uint64_t d = 0; d < trace.delay_hist.size() && d <= margin; ++d)
    ok += trace.delay_hist[d];
  std::uint64_t late_leftovers = 0;
  for (std::uint64_t a = margin + 1; a < trace.leftover_age_hist.size(); ++a)
    late_leftovers += trace.leftover_age_hist[a];
  const std::uint64_t denom = trace.served_packets + late_leftovers;
  if (denom == 0) return 1.0;
  return static_cast<double>(ok) / static_cast<double>(denom);
}

// Nearest-rank percentile over served delays pooled with the current ages of
// still-queued packets (a lower bound on their eventual delay).
inline double delay_percentile_s(const MetricsTrace& trace, double q) {
  const std::uint64_t total = trace.served_packets + trace.leftover_packets;
  if (total == 0) return 0.0;
  const auto rank = static_cast<std::uint64_t>(
      std::ceil(q * static_cast<double>(total)));
  std::uint64_t seen = 0;
  const std::uint64_t buckets =
      std::max(trace.delay_hist.size(), trace.leftover_age_hist.size());
  for (std::uint64_t d = 0; d < buckets; ++d) {
    if (d < trace.delay_hist.size()) seen += trace.delay_hist[d];
    if (d < trace.leftover_age_hist.size()) seen += trace.leftover_age_hist[d];
    if (seen >= rank) {
      const double slots = (d == kDelayHistSize)
                               ? static_cast<double>(trace.max_delay_slots)
                               : static_cast<double>(d);
      return slots * trace.params.slot_duration_s;
    }
  }
  return static_cast<double>(trace.max_delay_slots) * trace.params.slot_duration_s;
}

// One seeded simulation: per slot, sample channels and arrivals, let the
// policy decide from (CSI, Q, Z), serve the pre-arrival backlog, append
// arrivals, update the virtual queues. Deterministic given (params, seed).
inline MetricsTrace run(const SystemParams& params, Policy policy,
                        std::uint64_t horizon_slots, std::uint64_t seed) {
  validate(params);
  if (horizon_slots < 1) throw std::invalid_argument("horizon must be >= 1 slot");

  const int n = params.n_users;
  const double tau = params.slot_duration_s;
  const std::vector<UserProfile> profiles = generate_scenario(params, seed);
  Rng rng(hash_seed(seed));  // slot randomness, separate from placement draws

  std::vector<TransmitQueue> queues(n);
  std::vector<VirtualQueue> vqueues(n);
  std::vector<UserState> states(n);
  std::vector<std::uint64_t> arrivals(n);

  MetricsTrace trace;
  trace.horizon_slots = horizon_slots;
  trace.warmup_slots = horizon_slots / 10;
  trace.seed = seed;
  trace.params = params;
  trace.delay_hist.assign(kDelayHistSize + 1, 0);
  trace.leftover_age_hist.assign(kDelayHistSize + 1, 0);
  trace.backlog_series.reserve(horizon_slots);
  trace.virtual_backlog_series.reserve(horizon_slots);
  trace.power_series.reserve(horizon_slots);

  std::vector<double> eff_sum_full(n, 0.0), eff_sum_post(n, 0.0);
  std::vector<double> delay_sum_slots(n, 0.0);
  std::vector<std::uint64_t> served(n, 0), counted_packets(n, 0);
  double power_sum_acc = 0.0;

  const std::uint64_t warmup = trace.warmup_slots;

  for (std::uint64_t t = 0; t < horizon_slots; ++t) {
    for (int u = 0; u < n; ++u) {
      const ChannelState ch = sample_channel(profiles[u], params, rng);
      states[u].gamma = ch.gain_per_watt;
      states[u].queue_bits = queues[u].backlog_bits();
      states[u].deficit = vqueues[u].deficit;
      states[u].rho_bps = profiles[u].rate_threshold_bps;
      states[u].eta_bps = profiles[u].qos_rate_bps;
      states[u].qos = params.in_qos_set(u);
    }
    for (int u = 0; u < n; ++u) arrivals[u] = sample_arrivals(params, rng);

    const SlotDecision dec = decide(policy, states, params);

    double power_sum = 0.0;
    double backlog_total = 0.0;
    double deficit_total = 0.0;
    for (int u = 0; u < n; ++u) {
      const double eff = dec.effective_rates_bps[u];
      const auto mu_bits = static_cast<std::uint64_t>(std::floor(eff * tau));
      const std::uint64_t before = queues[u].backlog_bits();
      for (std::uint64_t delay : queues[u].serve(mu_bits, t)) {
        if (t + 1 - delay >= warmup + 1) {  // arrival slot past warm-up
          trace.served_packets++;
          served[u]++;
          delay_sum_slots[u] += static_cast<double>(delay);
          trace.delay_hist[std::min(delay, kDelayHistSize)]++;
          trace.max_delay_slots = std::max(trace.max_delay_slots, delay);
        }
      }
      trace.total_served_bits += before - queues[u].backlog_bits();
      // arrivals of slot t first become servable backlog in slot t+1
      queues[u].enqueue(arrivals[u], t + 1);
      trace.total_arrival_bits += arrivals[u];
      if (t + 1 >= warmup + 1) counted_packets[u] += arrivals[u] / params.packet_bits;

      if (states[u].qos) vqueues[u] = update_virtual(vqueues[u], states[u].eta_bps, eff);

      eff_sum_full[u] += eff;
      if (t >= warmup) eff_sum_post[u] += eff;
      power_sum += dec.powers_w[u];
      backlog_total += static_cast<double>(queues[u].backlog_bits());
      deficit_total += vqueues[u].deficit;
    }
    if (t >= warmup) power_sum_acc += power_sum;
    trace.backlog_series.push_back(backlog_total);
    trace.virtual_backlog_series.push_back(deficit_total);
    trace.power_series.push_back(power_sum);
  }

  // census of packets still queued at the horizon
  for (int u = 0; u < n; ++u) {
    for (const auto& pkt : queues[u].packets()) {
      if (pkt.arrival_slot < warmup + 1) continue;
      const std::uint64_t age = horizon_slots - pkt.arrival_slot;
      if (age == 0) continue;  // arrived in the final slot, no observation yet
      trace.leftover_packets++;
      trace.leftover_age_hist[std::min(age, kDelayHistSize)]++;
      trace.max_delay_slots = std::max(trace.max_delay_slots, age);
    }
  }

  const double denom_slots = static_cast<double>(horizon_slots - warmup);
  trace.time_avg_power_sum_w = power_sum_acc / denom_slots;
  trace.per_user_time_avg_rate_bps.resize(n);
  trace.full_avg_eff_rate_bps.resize(n);
  trace.final_deficit.resize(n);
  double rate_mean = 0.0;
  double worst_mean_delay_slots = 0.0;
  for (int u = 0; u < n; ++u) {
    trace.per_user_time_avg_rate_bps[u] = eff_sum_post[u] / denom_slots;
    trace.full_avg_eff_rate_bps[u] = eff_sum_full[u] / static_cast<double>(horizon_slots);
    trace.final_deficit[u] = vqueues[u].deficit;
    rate_mean += trace.per_user_time_avg_rate_bps[u];
    if (served[u] > 0) {
      worst_mean_delay_slots = std::max(
          worst_mean_delay_slots, delay_sum_slots[u] / static_cast<double>(served[u]));
    } else if (counted_packets[u] > 0) {
      worst_mean_delay_slots = std::numeric_limits<double>::infinity();
    }
  }
  trace.avg_rate_bps = rate_mean / n;
  trace.max_expected_queueing_delay_s = worst_mean_delay_slots * tau;
  trace.p999_delay_s = delay_percentile_s(trace, 0.999);
  trace.low_latency_defined = trace.served_packets + trace.leftover_packets > 0;
  trace.low_latency_rate = low_latency_rate(trace, delay_margin(params));
  trace.stable = stability_check(trace.backlog_series).stable;
  std::uint64_t backlog = 0;
  for (const auto& q : queues) backlog += q.backlog_bits();
  trace.final_backlog_bits = backlog;
  return trace;
}

}  // namespace hyma
