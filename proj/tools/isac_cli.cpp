// SPDX-License-Identifier: Apache-2.0
//
// isac_cli: solve | sweep | table2 | oracle | validate
//
// Exit codes: 0 success (an infeasible instance is a success, flagged in the
// output), 2 configuration error, 3 solver error.
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "netisac/experiments.hpp"
#include "netisac/validation.hpp"

using namespace netisac;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<double> gamma_db;
  std::optional<double> crlb_eps;
  std::string scheme;
  std::string out;
  std::optional<int> threads;
};

void add_common(CLI::App* app, Common& c, bool many_seeds) {
  app->add_option("--config", c.config, "Versioned JSON configuration")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, many_seeds ? "First seed" : "Seed");
  if (many_seeds) {
    app->add_option("--seeds", c.seeds, "Number of seeds")->check(CLI::PositiveNumber);
    app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  }
  app->add_option("--gamma-db", c.gamma_db, "SINR threshold in dB (replaces the grid)");
  app->add_option("--crlb-eps", c.crlb_eps, "CRLB threshold in m^2 (replaces the grid)");
  app->add_option("--out", c.out, "Output file (default: stdout)");
}

exp::ExperimentConfig resolve(const Common& c, const std::string& preset) {
  exp::ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = exp::load_config(c.config);
  } else if (preset == "table2") {
    cfg.preset = "table2";
    cfg.scenario = table2_scenario();
    cfg.num_seeds = 50;
  }
  if (c.seed) cfg.first_seed = *c.seed;
  if (c.seeds) cfg.num_seeds = *c.seeds;
  if (c.threads) cfg.threads = *c.threads;
  if (c.gamma_db || c.crlb_eps) {
    exp::QosPoint q = cfg.grid.front();
    if (c.gamma_db) q.gamma_db = *c.gamma_db;
    if (c.crlb_eps) q.crlb_eps = *c.crlb_eps;
    cfg.grid = {q};
  }
  if (!c.scheme.empty()) {
    cfg.schemes.clear();
    std::stringstream ss(c.scheme);
    for (std::string s; std::getline(ss, s, ',');) cfg.schemes.push_back(s);
  }
  if (!c.out.empty()) cfg.out = c.out;
  cfg.validate();
  return cfg;
}

// Writes to cfg.out or stdout.
template <class F>
void emit(const std::string& path, F write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path);
  if (!f) throw exp::ConfigError("--out", "cannot open " + path);
  write(f);
}

void log_row(const exp::ResultRow& r) {
  std::cerr << "seed " << r.seed << " " << r.scheme << " gamma " << r.qos.gamma_db << " dB: "
            << to_string(r.report.status);
  if (r.report.feasible()) std::cerr << ", " << r.report.total_power_dbm() << " dBm";
  std::cerr << " (" << r.report.runtime_s << " s)\n";
}

int cmd_solve(const Common& c, const std::string& dump) {
  exp::ExperimentConfig cfg = resolve(c, "default");
  if (cfg.schemes.size() != 1) throw exp::ConfigError("--scheme", "solve takes exactly one scheme");
  const exp::QosPoint q = cfg.grid.front();
  const exp::Trial t = exp::make_trial(cfg.scenario, cfg.first_seed);
  const Instance inst(t.scene, t.channels, exp::make_qos(t.scene, q));
  const SolutionReport r = exp::run_scheme(cfg.schemes.front(), inst, cfg.ao, cfg.first_seed, cfg.oracle_cap);

  json j = exp::to_json(r);
  j["seed"] = cfg.first_seed;
  j["gamma_db"] = q.gamma_db;
  j["crlb_eps"] = q.crlb_eps;
  emit(cfg.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });

  if (!dump.empty()) {
    if (r.rx_bs < 0 || static_cast<int>(r.serving.size()) != inst.K()) {
      std::cerr << "no binary configuration to dump\n";
    } else {
      FixedAssignment fa;
      fa.rx = r.rx_bs;
      fa.serving = r.serving;
      std::ofstream f(dump);
      if (!f) throw exp::ConfigError("--dump-sdpa", "cannot open " + dump);
      f << conic::build_fixed_binary(inst, fa).prog.to_sdpa();
    }
  }
  std::cerr << to_string(r.status) << (r.message.empty() ? "" : ": " + r.message) << '\n';
  return r.status == ReportStatus::SolverError ? kExitSolver : 0;
}

int solver_errors(const std::vector<exp::SummaryRow>& s) {
  int n = 0;
  for (const auto& r : s) n += r.solver_errors;
  return n;
}

int cmd_sweep(const Common& c) {
  const exp::ExperimentConfig cfg = resolve(c, "default");
  const exp::SweepResult r = exp::run_sweep(cfg, log_row);
  emit(cfg.out, [&](std::ostream& os) { exp::write_sweep_csv(os, r); });
  return solver_errors(r.summary) ? kExitSolver : 0;
}

int cmd_table2(const Common& c) {
  const exp::ExperimentConfig cfg = resolve(c, "table2");
  const exp::Table2Result r = exp::run_table2(cfg, log_row);
  emit(cfg.out, [&](std::ostream& os) { os << exp::to_json(r).dump(2) << '\n'; });
  for (const auto* rows : {&r.proposed, &r.scheme1})
    for (const auto& row : *rows)
      if (row.report.status == ReportStatus::SolverError) return kExitSolver;
  return 0;
}

int cmd_oracle(const Common& c) {
  Common cc = c;
  if (!cc.seeds && cc.config.empty()) cc.seeds = 1;
  exp::ExperimentConfig cfg = resolve(cc, "default");
  if (c.config.empty()) {
    // Small enough to enumerate.
    cfg.scenario.num_bs = 3;
    cfg.scenario.num_cu = 2;
    cfg.scenario.num_antennas = 4;
    cfg.scenario.bs_positions.resize(3);
    cfg.scenario.cu_positions.reset();
    cfg.validate();
  }
  const auto probes = exp::run_oracle_probe(cfg, [](const exp::OracleProbe& p) {
    std::cerr << "seed " << p.seed << ": oracle " << to_string(p.oracle.best.status) << ", gap "
              << p.gap_db << " dB\n";
  });
  emit(cfg.out, [&](std::ostream& os) { exp::write_oracle_probe_csv(os, probes); });
  for (const auto& p : probes)
    if (p.oracle.best.status == ReportStatus::SolverError) return kExitSolver;
  return 0;
}

int cmd_validate(const validation::Options& o) {
  bool ok = true;
  for (const auto& r : validation::run_all(o)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " (" << r.seconds
              << " s)\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint BS selection, user association and beamforming for networked ISAC"};
  app.require_subcommand(1);

  Common solve_o, sweep_o, table2_o, oracle_o;
  std::string dump;
  auto* solve = app.add_subcommand("solve", "Solve one instance, JSON report");
  add_common(solve, solve_o, false);
  solve->add_option("--scheme", solve_o.scheme, "proposed | scheme1 | scheme2 | scheme3 | oracle");
  solve->add_option("--dump-sdpa", dump, "Write the final beamforming program in SDPA format");

  auto* sweep = app.add_subcommand("sweep", "Seeds x grid x schemes, CSV");
  add_common(sweep, sweep_o, true);
  sweep->add_option("--scheme", sweep_o.scheme, "Comma-separated schemes");

  auto* table2 = app.add_subcommand("table2", "Receiving-BS comparison on the fixed geometry, JSON");
  add_common(table2, table2_o, true);

  auto* oracle = app.add_subcommand("oracle", "Exhaustive enumeration vs the optimizer, CSV");
  add_common(oracle, oracle_o, true);

  validation::Options vo;
  auto* validate = app.add_subcommand("validate", "Built-in self checks");
  validate->add_option("--seed", vo.seed, "Seed");
  validate->add_flag("--inject-fpa-sign-error", vo.inject_fpa_sign_error,
                     "Corrupt one FIM coupling coefficient (the checks must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_o, dump);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*table2) return cmd_table2(table2_o);
    if (*oracle) return cmd_oracle(oracle_o);
    if (*validate) return cmd_validate(vo);
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
