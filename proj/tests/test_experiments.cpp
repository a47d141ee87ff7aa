// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "doctest.h"
#include "netisac/experiments.hpp"

using namespace netisac;
using nlohmann::json;

namespace {

std::string config_error_path(const json& j) {
  try {
    exp::parse_config(j);
  } catch (const exp::ConfigError& e) {
    return e.path();
  }
  return "";
}

std::size_t count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

}  // namespace

TEST_CASE("configuration parsing") {
  const json ok = json::parse(R"({
    "version": 1,
    "scenario": {"preset": "table2", "num_antennas": 4, "rcs": 2.0},
    "grid": [{"gamma_db": 6}, {"gamma_db": 10, "crlb_eps": 0.5}],
    "schemes": ["proposed", "scheme3"],
    "num_seeds": 3, "first_seed": 7,
    "ao": {"mu": 100, "init": "first", "solver_tol": 1e-7}
  })");
  const exp::ExperimentConfig c = exp::parse_config(ok);
  CHECK(c.preset == "table2");
  CHECK(c.scenario.num_antennas == 4);
  CHECK(c.scenario.target_position.has_value());
  CHECK(c.scenario.rcs == 2.0);
  REQUIRE(c.grid.size() == 2u);
  CHECK(c.grid[0].crlb_eps == 1.0);
  CHECK(c.grid[1].crlb_eps == 0.5);
  CHECK(c.first_seed == 7u);
  CHECK(c.ao.mu == 100.0);
  CHECK(c.ao.init == InitPolicy::FirstFeasible);
  CHECK(c.ao.solver.tol == 1e-7);

  const exp::ExperimentConfig back = exp::parse_config(exp::to_json(c));
  CHECK(exp::to_json(back) == exp::to_json(c));

  CHECK(config_error_path(json::parse(R"({"grid": []})")) == "$.version");
  CHECK(config_error_path(json::parse(R"({"version": 2})")) == "$.version");
  CHECK(config_error_path(json::parse(R"({"version": 1, "bogus": 1})")).find("bogus") != std::string::npos);
  CHECK(config_error_path(json::parse(R"({"version": 1, "schemes": ["nope"]})")) == "$.schemes[0]");
  CHECK(config_error_path(json::parse(R"({"version": 1, "scenario": {"preset": "x"}})")) == "$.scenario.preset");
  CHECK(config_error_path(json::parse(R"({"version": 1, "num_seeds": 0})")) == "$.num_seeds");
  CHECK(config_error_path(json::parse(R"({"version": 1, "grid": [{"gamma_db": "a"}]})")).find("$.grid[0]") == 0);
  CHECK(config_error_path(json::parse(R"({"version": 1, "scenario": {"num_bs": 3}})")).find("$.scenario") == 0);
  CHECK_THROWS_AS(exp::load_config("/nonexistent/config.json"), exp::ConfigError);
}

TEST_CASE("trials are reproducible") {
  const exp::Trial a = exp::make_trial(default_scenario(), 5), b = exp::make_trial(default_scenario(), 5);
  CHECK((a.scene.target - b.scene.target).norm() == 0.0);
  CHECK((a.channels.h[1][2] - b.channels.h[1][2]).norm() == 0.0);
  const exp::Trial c = exp::make_trial(default_scenario(), 6);
  CHECK((a.channels.h[1][2] - c.channels.h[1][2]).norm() > 0.0);
}

TEST_CASE("CSV rows and summaries") {
  exp::ResultRow r{3, "scheme2", {8.0, 1.0}, {}};
  r.report.status = ReportStatus::Feasible;
  r.report.total_power = 1e-3;
  r.report.rx_bs = 1;
  r.report.crlb = 0.5;
  r.report.sinr = Vec::Constant(2, db_to_linear(8.0));
  const std::string line = exp::csv_row(r);
  CHECK(count(line, ',') == count(exp::kCsvHeader, ','));
  CHECK(line.rfind("3,scheme2,8,1,1,0,2,", 0) == 0);

  exp::ResultRow r2 = r;
  r2.report.total_power = 1e-2;
  exp::ResultRow r3 = r;
  r3.report.status = ReportStatus::Infeasible;
  exp::ResultRow r4 = r;
  r4.report.status = ReportStatus::SolverError;
  CHECK(exp::csv_row(r3).find(",0,nan,") != std::string::npos);
  const auto s = exp::summarize({r, r2, r3, r4}, {"scheme2"}, {{8.0, 1.0}});
  REQUIRE(s.size() == 1u);
  CHECK(s[0].trials == 4);
  CHECK(s[0].feasible == 2);
  CHECK(s[0].solver_errors == 1);
  CHECK(s[0].infeasibility_rate == doctest::Approx(0.25));
  CHECK(s[0].mean_power_dbm == doctest::Approx(watts_to_dbm(5.5e-3)));
}

TEST_CASE("small sweep is deterministic across thread counts") {
  exp::ExperimentConfig cfg;
  cfg.scenario.num_bs = 3;
  cfg.scenario.num_cu = 2;
  cfg.scenario.num_antennas = 2;
  cfg.scenario.bs_positions.resize(3);
  cfg.grid = {{6.0, 1.0}, {10.0, 1.0}};
  cfg.schemes = {"scheme2", "scheme3"};
  cfg.num_seeds = 2;
  const exp::SweepResult a = exp::run_sweep(cfg);
  cfg.threads = 2;
  const exp::SweepResult b = exp::run_sweep(cfg);
  REQUIRE(a.rows.size() == 8u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].scheme == b.rows[i].scheme);
    CHECK(a.rows[i].seed == b.rows[i].seed);
    CHECK(a.rows[i].report.total_power == b.rows[i].report.total_power);
  }
  std::ostringstream os;
  exp::write_sweep_csv(os, a);
  CHECK(os.str().rfind(std::string(exp::kCsvHeader) + "\n", 0) == 0);
  CHECK(os.str().find("\n# scheme,") != std::string::npos);
  const json j = exp::to_json(a.rows[0].report);
  CHECK(j.contains("beamformers"));
}
