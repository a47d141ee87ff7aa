// SPDX-License-Identifier: Apache-2.0
//
// Versioned JSON configuration, seeded campaigns over schemes and QoS grid
// points, the fixed-geometry BS-selection comparison, the oracle probe and
// CSV/JSON emission.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "netisac/baselines.hpp"
#include "json.hpp"

namespace netisac::exp {

inline constexpr int kConfigVersion = 1;

/// Malformed or inconsistent configuration; `path` points at the field.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string path, const std::string& what)
      : InvalidArgument(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct QosPoint {
  double gamma_db = 8.0;
  double crlb_eps = 1.0;
};

inline const std::vector<std::string>& known_schemes() {
  static const std::vector<std::string> s{"proposed", "scheme1", "scheme2", "scheme3", "oracle"};
  return s;
}

struct ExperimentConfig {
  int version = kConfigVersion;
  std::string preset = "default";  // "default" or "table2"
  ScenarioConfig scenario = default_scenario();
  std::vector<QosPoint> grid{QosPoint{}};
  std::vector<std::string> schemes{"proposed"};
  int num_seeds = 1;
  std::uint64_t first_seed = 0;
  AoConfig ao;
  std::uint64_t oracle_cap = 2000;
  int threads = 1;
  std::string out;

  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// The scene and channels of one seed.
struct Trial {
  Scene scene;
  ChannelSet channels;
};
Trial make_trial(const ScenarioConfig& scenario, std::uint64_t seed);
QosSpec make_qos(const Scene& scene, const QosPoint& q);

/// Runs one scheme on one seed and grid point.
SolutionReport run_scheme(const std::string& scheme, const Instance& inst, const AoConfig& ao,
                          std::uint64_t seed, std::uint64_t oracle_cap);

struct ResultRow {
  std::uint64_t seed = 0;
  std::string scheme;
  QosPoint qos;
  SolutionReport report;
};

inline constexpr const char* kCsvHeader =
    "seed,scheme,gamma_db,crlb_eps,feasible,total_power_dbm,rx_bs,iterations,crlb_m2,"
    "min_sinr_db,runtime_s";

/// One CSV line (no newline). BS indices are printed 1-based.
std::string csv_row(const ResultRow& r);

struct SummaryRow {
  std::string scheme;
  QosPoint qos;
  int trials = 0;
  int feasible = 0;
  int infeasible = 0;
  int solver_errors = 0;
  double infeasibility_rate = 0.0;  // infeasible / trials
  double mean_power_dbm = 0.0;      // mean Watts over feasible trials, in dBm
};

struct SweepResult {
  std::vector<ResultRow> rows;  // ordered by grid point, seed, scheme
  std::vector<SummaryRow> summary;
};

using Progress = std::function<void(const ResultRow&)>;

/// Every (grid point, seed, scheme). Failures are recorded per row.
SweepResult run_sweep(const ExperimentConfig& cfg, const Progress& progress = {});
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows,
                                  const std::vector<std::string>& schemes,
                                  const std::vector<QosPoint>& grid);
/// Rows, then a '#'-prefixed summary block.
void write_sweep_csv(std::ostream& os, const SweepResult& r);

struct Table2Result {
  std::vector<ResultRow> proposed, scheme1;
  std::vector<int> rx_histogram;  // proposed, per BS
  int modal_rx = -1;              // 0-based
  int scheme1_rx = -1;
  double proposed_mean_dbm = 0.0;
  double scheme1_mean_dbm = 0.0;
  int proposed_feasible = 0, scheme1_feasible = 0;
};
Table2Result run_table2(const ExperimentConfig& cfg, const Progress& progress = {});
nlohmann::json to_json(const Table2Result& r);

struct OracleProbe {
  std::uint64_t seed = 0;
  QosPoint qos;
  OracleResult oracle;
  SolutionReport ao;
  double gap_db = 0.0;  // AO minus oracle, NaN unless both feasible
};
std::vector<OracleProbe> run_oracle_probe(const ExperimentConfig& cfg,
                                          const std::function<void(const OracleProbe&)>& progress = {});
/// Oracle table of every probe, config column prefixed with the seed.
void write_oracle_probe_csv(std::ostream& os, const std::vector<OracleProbe>& probes);

nlohmann::json to_json(const SolutionReport& r);

}  // namespace netisac::exp
