// Command-line front end: single runs, parameter sweeps, the oracle
// verification suite, and scenario dumps. All outputs are machine-readable
// (CSV + JSON with the resolved configuration echoed for provenance).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyma/hyma.hpp"

namespace {

std::vector<double> split_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<std::uint64_t> split_u64(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

std::vector<hyma::Policy> split_policies(const std::string& csv) {
  std::vector<hyma::Policy> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(hyma::parse_policy(item));
  }
  return out;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string format = "csv";
  std::optional<double> v, rho, eta, tau;
  std::optional<int> n_users;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; defaults used when absent");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--format", o.format, "csv|json (JSON meta always written)")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--v", o.v, "override v_weight");
  cmd->add_option("--rho", o.rho, "override rate_threshold_bps");
  cmd->add_option("--eta", o.eta, "override qos_rate_bps");
  cmd->add_option("--tau", o.tau, "override slot_duration_s");
  cmd->add_option("--n-users", o.n_users, "override n_users");
}

hyma::SystemParams resolve_params(const CommonOpts& o) {
  hyma::SystemParams p;
  if (!o.config_path.empty()) p = hyma::load_params(o.config_path);
  if (o.v) p.v_weight = *o.v;
  if (o.rho) p.rate_threshold_bps = *o.rho;
  if (o.eta) p.qos_rate_bps = *o.eta;
  if (o.tau) p.slot_duration_s = *o.tau;
  if (o.n_users) p.n_users = *o.n_users;
  hyma::validate(p);
  return p;
}

int cmd_run(const CommonOpts& o, const std::string& policy_name, std::uint64_t seed,
            std::uint64_t horizon) {
  const hyma::SystemParams params = resolve_params(o);
  const hyma::Policy policy = hyma::parse_policy(policy_name);
  const hyma::MetricsTrace trace = hyma::run(params, policy, horizon, seed);

  hyma::SweepTable table;
  table.base = params;
  table.spec.axis = hyma::SweepAxis::None;
  table.spec.values = {0.0};
  table.spec.policies = {policy};
  table.spec.seeds = {seed};
  table.spec.horizon = horizon;
  table.rows.push_back(hyma::summarize(trace, hyma::SweepAxis::None, 0.0, policy,
                                       params.v_weight, seed));
  hyma::emit(table, o.out_dir, o.format, "run");

  std::cout << "policy=" << hyma::policy_name(policy) << " seed=" << seed
            << " horizon=" << horizon << "\n"
            << "  time-avg power sum   : " << trace.time_avg_power_sum_w << " W\n"
            << "  mean user rate       : " << trace.avg_rate_bps << " b/s\n"
            << "  max mean queue delay : " << trace.max_expected_queueing_delay_s << " s\n"
            << "  p99.9 queue delay    : " << trace.p999_delay_s << " s\n"
            << "  low-latency rate     : " << trace.low_latency_rate << "\n"
            << "  stable               : " << (trace.stable ? "yes" : "no") << "\n"
            << "results in " << o.out_dir << "/run_*.csv\n";
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& axis, const std::string& values,
              const std::string& policies, const std::string& seeds,
              const std::string& v_values, std::uint64_t horizon) {
  const hyma::SystemParams params = resolve_params(o);
  hyma::SweepSpec spec;
  spec.axis = hyma::parse_axis(axis);
  spec.values = split_doubles(values);
  spec.policies = split_policies(policies);
  spec.seeds = split_u64(seeds);
  spec.horizon = horizon;
  if (!v_values.empty()) spec.v_values = split_doubles(v_values);

  const hyma::SweepTable table = hyma::run_sweep(spec, params);
  hyma::emit(table, o.out_dir, o.format, "sweep");
  std::cout << table.rows.size() << " rows written to " << o.out_dir << "/sweep_*.csv\n";
  return 0;
}

int cmd_verify(const CommonOpts& o, int states, int grid, int pair_states, int pair_grid,
               int matching_states, int matching_users, std::uint64_t seed) {
  const hyma::SystemParams params = resolve_params(o);
  int failures = 0;

  const auto oma = hyma::verify::check_oma_closed_form(states, grid, seed, params);
  const bool oma_ok = oma.violations == 0;
  std::cout << (oma_ok ? "[PASS] " : "[FAIL] ") << "oma closed form vs grid: "
            << oma.violations << "/" << oma.checked << " violations, max gap "
            << oma.max_gap << " (tol " << oma.tolerance << ")\n";
  failures += !oma_ok;

  const auto noma = hyma::verify::check_noma_closed_form(pair_states, pair_grid, seed, params);
  const bool noma_ok = noma.violations <= pair_states / 1000;
  std::cout << (noma_ok ? "[PASS] " : "[FAIL] ") << "noma sequential vs 2-d grid: "
            << noma.violations << "/" << noma.checked << " violations, median rel gap "
            << noma.median_rel_gap << ", max gap " << noma.max_gap << "\n";
  failures += !noma_ok;

  const auto match =
      hyma::verify::check_matching(matching_states, matching_users, seed, params);
  const bool match_ok = match.invalid == 0 && match.worse_than_identity == 0;
  std::cout << (match_ok ? "[PASS] " : "[FAIL] ") << "matching vs exhaustive: "
            << match.invalid << " invalid, " << match.worse_than_identity
            << " worse than identity, mean rel gap " << match.mean_rel_gap << "\n";
  failures += !match_ok;

  return failures == 0 ? 0 : 1;
}

int cmd_scenario(const CommonOpts& o, std::uint64_t seed) {
  const hyma::SystemParams params = resolve_params(o);
  const auto profiles = hyma::generate_scenario(params, seed);

  namespace fs = std::filesystem;
  fs::create_directories(o.out_dir);
  const std::string path = (fs::path(o.out_dir) / "scenario.csv").string();
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  out << "user,distance_m,rate_threshold_bps,qos_rate_bps\n";
  out.precision(17);
  for (std::size_t i = 0; i < profiles.size(); ++i)
    out << i << ',' << profiles[i].distance_m << ',' << profiles[i].rate_threshold_bps
        << ',' << profiles[i].qos_rate_bps << '\n';

  nlohmann::json meta;
  meta["config"] = params;
  meta["seed"] = seed;
  std::ofstream meta_out((fs::path(o.out_dir) / "scenario_meta.json").string());
  meta_out << meta.dump(2) << "\n";
  std::cout << profiles.size() << " users written to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid OMA/NOMA downlink scheduling simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, verify_opts, scen_opts;

  auto* run_cmd = app.add_subcommand("run", "single seeded simulation");
  std::string policy = "opt-hybrid";
  std::uint64_t seed = 1;
  std::uint64_t horizon = 100000;
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--policy", policy, "opt-hybrid|opt-oma|pmax|pmin");
  run_cmd->add_option("--seed", seed, "rng seed");
  run_cmd->add_option("--horizon", horizon, "slots to simulate");

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep over rho, eta or v");
  std::string axis = "rho";
  std::string values = "5e6,6e6,7e6,8e6,9e6";
  std::string policies = "pmax,pmin,opt-oma,opt-hybrid";
  std::string seeds = "1,2,3,4,5";
  std::string v_values;
  std::uint64_t sweep_horizon = 100000;
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--sweep-axis", axis, "rho|eta|v");
  sweep_cmd->add_option("--sweep-values", values, "comma-separated axis values");
  sweep_cmd->add_option("--policies", policies, "comma-separated policy names");
  sweep_cmd->add_option("--seeds", seeds, "comma-separated seeds");
  sweep_cmd->add_option("--v-values", v_values, "V grid for the opt policies");
  sweep_cmd->add_option("--horizon", sweep_horizon, "slots per run");

  auto* verify_cmd = app.add_subcommand("verify", "closed-form vs brute-force oracle suite");
  int states = 2000, grid = 20000, pair_states = 500, pair_grid = 300;
  int matching_states = 25, matching_users = 8;
  std::uint64_t verify_seed = 7;
  add_common(verify_cmd, verify_opts);
  verify_cmd->add_option("--states", states, "random states for the oma check");
  verify_cmd->add_option("--grid", grid, "grid points for the oma check");
  verify_cmd->add_option("--pair-states", pair_states, "random states for the noma check");
  verify_cmd->add_option("--pair-grid", pair_grid, "grid points per axis for the noma check");
  verify_cmd->add_option("--matching-states", matching_states, "states for the matching check");
  verify_cmd->add_option("--matching-users", matching_users, "users per matching state (<=8)");
  verify_cmd->add_option("--seed", verify_seed, "rng seed");

  auto* scen_cmd = app.add_subcommand("scenario", "dump the generated user layout");
  std::uint64_t scen_seed = 1;
  add_common(scen_cmd, scen_opts);
  scen_cmd->add_option("--seed", scen_seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, policy, seed, horizon);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_opts, axis, values, policies, seeds, v_values, sweep_horizon);
    if (verify_cmd->parsed())
      return cmd_verify(verify_opts, states, grid, pair_states, pair_grid, matching_states,
                        matching_users, verify_seed);
    if (scen_cmd->parsed()) return cmd_scenario(scen_opts, scen_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
