#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyma/config.hpp"
#include "hyma/simulator.hpp"

namespace hyma {

enum class SweepAxis { None, Rho, Eta, V };

inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::Rho: return "rho";
    case SweepAxis::Eta: return "eta";
    case SweepAxis::V: return "v";
  }
  return "?";
}

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "rho") return SweepAxis::Rho;
  if (s == "eta") return SweepAxis::Eta;
  if (s == "v") return SweepAxis::V;
  if (s == "none") return SweepAxis::None;
  throw std::invalid_argument("unknown sweep axis: " + s);
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::Rho;
  std::vector<double> values;
  std::vector<Policy> policies;
  std::vector<std::uint64_t> seeds;
  std::uint64_t horizon = 100000;
  // V grid applied to the opt policies when the axis is not V itself.
  std::vector<double> v_values = {1e5, 5e5, 1e6};
};

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::string policy;
  double v = 0.0;
  std::uint64_t seed = 0;
  double power_sum_w = 0.0;
  double max_delay_s = 0.0;
  double p999_delay_s = 0.0;
  double avg_rate_bps = 0.0;
  double low_latency_rate = 0.0;
  bool stable = true;
};

struct SweepTable {
  SystemParams base;
  SweepSpec spec;
  std::vector<SweepRow> rows;
};

inline SweepRow summarize(const MetricsTrace& t, SweepAxis axis, double value, Policy policy,
                          double v, std::uint64_t seed) {
  SweepRow r;
  r.axis = axis_name(axis);
  r.value = value;
  r.policy = policy_name(policy);
  r.v = v;
  r.seed = seed;
  r.power_sum_w = t.time_avg_power_sum_w;
  r.max_delay_s = t.max_expected_queueing_delay_s;
  r.p999_delay_s = t.p999_delay_s;
  r.avg_rate_bps = t.avg_rate_bps;
  r.low_latency_rate = t.low_latency_rate;
  r.stable = t.stable;
  return r;
}

inline SystemParams apply_axis(SystemParams p, SweepAxis axis, double value, double v) {
  switch (axis) {
    case SweepAxis::Rho: p.rate_threshold_bps = value; break;
    case SweepAxis::Eta: p.qos_rate_bps = value; break;
    case SweepAxis::V: break;  // value equals v below
    case SweepAxis::None: break;
  }
  p.v_weight = v;
  return p;
}

// One row per (axis value, policy, V, seed). pMax and pMin ignore V, so they
// contribute a single row per (value, seed); the opt policies fan out over
// the V grid (or the axis itself when sweeping V).
inline SweepTable run_sweep(const SweepSpec& spec, const SystemParams& base) {
  if (spec.values.empty() || spec.policies.empty() || spec.seeds.empty())
    throw std::invalid_argument("sweep needs non-empty values, policies and seeds");

  struct Cell {
    double value;
    Policy policy;
    double v;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double value : spec.values) {
    for (Policy policy : spec.policies) {
      std::vector<double> vs;
      if (!is_opt_policy(policy))
        vs = {base.v_weight};
      else if (spec.axis == SweepAxis::V)
        vs = {value};
      else
        vs = spec.v_values;
      for (double v : vs)
        for (std::uint64_t seed : spec.seeds) cells.push_back({value, policy, v, seed});
    }
  }

  SweepTable table;
  table.base = base;
  table.spec = spec;
  table.rows.resize(cells.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      const Cell& c = cells[k];
      const SystemParams params = apply_axis(base, spec.axis, c.value, c.v);
      const MetricsTrace t = run(params, c.policy, spec.horizon, c.seed);
      table.rows[k] = summarize(t, spec.axis, c.value, c.policy, c.v, c.seed);
    }
  };
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> futs;
  for (unsigned t = 0; t < threads; ++t)
    futs.push_back(std::async(std::launch::async, worker));
  for (auto& f : futs) f.get();
  return table;
}

namespace sweep_detail {
inline std::string num(double x) {
  std::ostringstream oss;
  oss << std::setprecision(17) << x;
  return oss.str();
}

inline void write_raw_csv(const SweepTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "axis,value,policy,v,seed,power_sum_w,max_delay_s,p999_delay_s,"
         "avg_rate_bps,low_latency_rate,stable_flag\n";
  for (const auto& r : t.rows) {
    out << r.axis << ',' << num(r.value) << ',' << r.policy << ',' << num(r.v) << ','
        << r.seed << ',' << num(r.power_sum_w) << ',' << num(r.max_delay_s) << ','
        << num(r.p999_delay_s) << ',' << num(r.avg_rate_bps) << ','
        << num(r.low_latency_rate) << ',' << (r.stable ? 1 : 0) << '\n';
  }
}

struct Agg {
  int n = 0;
  double sum = 0.0, sumsq = 0.0;
  void add(double x) {
    n++;
    sum += x;
    sumsq += x * x;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stderr_() const {
    if (n < 2) return 0.0;
    const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
    return std::sqrt(var / n);
  }
};

inline void write_summary_csv(const SweepTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "axis,value,policy,v,n_seeds,power_sum_w_mean,power_sum_w_stderr,"
         "max_delay_s_mean,max_delay_s_stderr,p999_delay_s_mean,p999_delay_s_stderr,"
         "avg_rate_bps_mean,avg_rate_bps_stderr,low_latency_rate_mean,"
         "low_latency_rate_stderr,stable_fraction\n";
  struct Key {
    double value;
    std::string policy;
    double v;
    bool operator==(const Key& o) const {
      return value == o.value && policy == o.policy && v == o.v;
    }
  };
  std::vector<Key> keys;
  std::vector<std::array<Agg, 5>> aggs;
  std::vector<Agg> stable;
  for (const auto& r : t.rows) {
    const Key k{r.value, r.policy, r.v};
    std::size_t idx = 0;
    for (; idx < keys.size(); ++idx)
      if (keys[idx] == k) break;
    if (idx == keys.size()) {
      keys.push_back(k);
      aggs.emplace_back();
      stable.emplace_back();
    }
    aggs[idx][0].add(r.power_sum_w);
    aggs[idx][1].add(r.max_delay_s);
    aggs[idx][2].add(r.p999_delay_s);
    aggs[idx][3].add(r.avg_rate_bps);
    aggs[idx][4].add(r.low_latency_rate);
    stable[idx].add(r.stable ? 1.0 : 0.0);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out << axis_name(t.spec.axis) << ',' << num(keys[i].value) << ',' << keys[i].policy
        << ',' << num(keys[i].v) << ',' << aggs[i][0].n;
    for (const auto& a : aggs[i]) out << ',' << num(a.mean()) << ',' << num(a.stderr_());
    out << ',' << num(stable[i].mean()) << '\n';
  }
}

inline nlohmann::json spec_json(const SweepSpec& s) {
  nlohmann::json j;
  j["axis"] = axis_name(s.axis);
  j["values"] = s.values;
  std::vector<std::string> pols;
  for (Policy p : s.policies) pols.emplace_back(policy_name(p));
  j["policies"] = pols;
  j["seeds"] = s.seeds;
  j["horizon"] = s.horizon;
  j["v_values"] = s.v_values;
  return j;
}
}  // namespace sweep_detail

// Writes <prefix>_raw.csv, <prefix>_summary.csv and <prefix>_meta.json under
// out_dir. The JSON always echoes the fully resolved configuration; with
// format "json" it additionally embeds every row.
inline void emit(const SweepTable& table, const std::string& out_dir,
                 const std::string& format = "csv", const std::string& prefix = "sweep") {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base = (fs::path(out_dir) / prefix).string();
  sweep_detail::write_raw_csv(table, base + "_raw.csv");
  sweep_detail::write_summary_csv(table, base + "_summary.csv");

  nlohmann::json meta;
  meta["config"] = table.base;
  meta["sweep"] = sweep_detail::spec_json(table.spec);
  if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"axis", r.axis},
                      {"value", r.value},
                      {"policy", r.policy},
                      {"v", r.v},
                      {"seed", r.seed},
                      {"power_sum_w", r.power_sum_w},
                      {"max_delay_s", r.max_delay_s},
                      {"p999_delay_s", r.p999_delay_s},
                      {"avg_rate_bps", r.avg_rate_bps},
                      {"low_latency_rate", r.low_latency_rate},
                      {"stable_flag", r.stable}});
    }
    meta["rows"] = rows;
  }
  std::ofstream out(base + "_meta.json");
  if (!out) throw std::runtime_error("cannot write " + base + "_meta.json");
  out << meta.dump(2) << "\n";
}

}  // namespace hyma
