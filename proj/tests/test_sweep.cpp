#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyma/sweep.hpp"

using namespace hyma;
namespace fs = std::filesystem;

namespace {
SystemParams tiny_params() {
  SystemParams p;
  p.n_users = 4;
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}
}  // namespace

TEST_CASE("single cell produces a single row") {
  SweepSpec spec;
  spec.axis = SweepAxis::Rho;
  spec.values = {7e6};
  spec.policies = {Policy::PMin};
  spec.seeds = {1};
  spec.horizon = 200;
  const SweepTable t = run_sweep(spec, tiny_params());
  REQUIRE(t.rows.size() == 1);
  REQUIRE(t.rows[0].policy == std::string("pmin"));
  REQUIRE(t.rows[0].axis == std::string("rho"));
}

TEST_CASE("reproduction sweep has the expected combinatorial count") {
  SweepSpec spec;
  spec.axis = SweepAxis::Rho;
  spec.values = {5e6, 6e6, 7e6, 8e6, 9e6};
  spec.policies = {Policy::PMax, Policy::PMin, Policy::OptOma, Policy::OptHybrid};
  spec.seeds = {1, 2, 3, 4, 5};
  spec.v_values = {1e5, 5e5, 1e6};
  spec.horizon = 50;
  const SweepTable t = run_sweep(spec, tiny_params());
  // 5 values x (2 non-opt + 2 opt x 3 V) x 5 seeds
  REQUIRE(t.rows.size() == 5 * (2 + 3 * 2) * 5);
}

TEST_CASE("emitted files are deterministic and parseable") {
  SweepSpec spec;
  spec.axis = SweepAxis::V;
  spec.values = {1e5, 1e6};
  spec.policies = {Policy::OptOma, Policy::PMin};
  spec.seeds = {1, 2};
  spec.horizon = 300;
  const SystemParams base = tiny_params();
  const SweepTable t = run_sweep(spec, base);

  const fs::path dir_a = fs::temp_directory_path() / "hyma_sweep_a";
  const fs::path dir_b = fs::temp_directory_path() / "hyma_sweep_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  emit(t, dir_a.string(), "json");
  emit(run_sweep(spec, base), dir_b.string(), "json");

  for (const char* name : {"sweep_raw.csv", "sweep_summary.csv", "sweep_meta.json"})
    REQUIRE(slurp(dir_a / name) == slurp(dir_b / name));

  SECTION("raw csv round-trips through a generic parser") {
    const auto rows = parse_csv(slurp(dir_a / "sweep_raw.csv"));
    REQUIRE(rows.size() == t.rows.size() + 1);
    REQUIRE(rows[0].size() == 11);  // fixed schema
    REQUIRE(rows[0][0] == "axis");
    REQUIRE(rows[0][10] == "stable_flag");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      REQUIRE(rows[i].size() == 11);
      const SweepRow& expect = t.rows[i - 1];
      REQUIRE(rows[i][2] == expect.policy);
      REQUIRE(std::stod(rows[i][5]) == expect.power_sum_w);
      REQUIRE(std::stod(rows[i][9]) == expect.low_latency_rate);
      REQUIRE(std::stoull(rows[i][4]) == expect.seed);
    }
  }

  SECTION("meta json echoes the exact resolved config") {
    nlohmann::json meta;
    std::ifstream in(dir_a / "sweep_meta.json");
    in >> meta;
    const SystemParams echoed = meta.at("config").get<SystemParams>();
    REQUIRE(echoed.n_users == base.n_users);
    REQUIRE(echoed.v_weight == base.v_weight);
    REQUIRE(echoed.slot_duration_s == base.slot_duration_s);
    REQUIRE(echoed.rate_threshold_bps == base.rate_threshold_bps);
    REQUIRE(meta.at("rows").size() == t.rows.size());
    REQUIRE(meta.at("sweep").at("axis") == "v");
  }
}
