// SPDX-License-Identifier: Apache-2.0
#include "netisac/baselines.hpp"

#include <chrono>
#include <limits>
#include <ostream>
#include <random>

namespace netisac {

SolutionReport solve_fixed_assignment(const Instance& inst, const FixedAssignment& fa,
                                      const AoConfig& cfg, const std::string& scheme) {
  const auto t0 = std::chrono::steady_clock::now();
  fa.validate(inst.S(), inst.K());
  SolutionReport r = make_report(inst, solve_fixed(inst, fa, cfg.solver), cfg, scheme);
  if (!r.feasible()) r.rx_bs = fa.rx;
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SolutionReport scheme1_closest(const Instance& inst, const AoConfig& cfg) {
  return run_ao(inst, cfg, inst.scene().closest_bs_to_target(), "scheme1");
}

FixedAssignment random_assignment(int S, int K, std::uint64_t seed) {
  if (S < 2) throw InvalidArgument("random assignment: at least two BSs are required");
  std::mt19937_64 rng(derive_seed(seed, SeedStream::Scheme2));
  FixedAssignment fa;
  fa.rx = std::uniform_int_distribution<int>(0, S - 1)(rng);
  std::uniform_int_distribution<int> pick(0, S - 2);
  for (int k = 0; k < K; ++k) {
    const int j = pick(rng);
    fa.serving.push_back(j < fa.rx ? j : j + 1);
  }
  return fa;
}

SolutionReport scheme2_random(const Instance& inst, const AoConfig& cfg, std::uint64_t seed) {
  return solve_fixed_assignment(inst, random_assignment(inst.S(), inst.K(), seed), cfg, "scheme2");
}

SolutionReport scheme3_bistatic(const Instance& inst, const AoConfig& cfg, int tx, int rx) {
  const int S = inst.S();
  if (tx < 0 || tx >= S || rx < 0 || rx >= S || tx == rx)
    throw InvalidArgument("bistatic scheme: tx and rx must be distinct BSs");
  FixedAssignment fa;
  fa.rx = rx;
  fa.serving.assign(inst.K(), tx);
  fa.silent.assign(S, 1);
  fa.silent[tx] = 0;
  fa.silent[rx] = 0;
  return solve_fixed_assignment(inst, fa, cfg, "scheme3");
}

std::uint64_t enumeration_size(int S, int K) {
  if (S < 2) return 0;
  const std::uint64_t big = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n = static_cast<std::uint64_t>(S);
  for (int k = 0; k < K; ++k) {
    if (n > big / static_cast<std::uint64_t>(S - 1)) return big;
    n *= static_cast<std::uint64_t>(S - 1);
  }
  return n;
}

std::string describe(const FixedAssignment& fa) {
  std::string s = "rx=" + std::to_string(fa.rx + 1) + ";serve=";
  for (std::size_t k = 0; k < fa.serving.size(); ++k) {
    if (k) s += '|';
    s += std::to_string(fa.serving[k] + 1);
  }
  return s;
}

OracleResult brute_force(const Instance& inst, const AoConfig& cfg, std::uint64_t cap) {
  const int S = inst.S();
  const int K = inst.K();
  const std::uint64_t total = enumeration_size(S, K);
  if (total == 0) throw InvalidArgument("oracle: at least two BSs are required");
  if (total > cap)
    throw InvalidArgument("oracle: " + std::to_string(total) + " configurations exceed the cap of " +
                          std::to_string(cap));
  OracleResult out;
  out.best.scheme = "oracle";
  out.best.message = "no feasible configuration";
  bool have = false;
  bool any_error = false;
  for (int rx = 0; rx < S; ++rx) {
    std::vector<int> digit(K, 0);  // index among the S-1 transmitters
    while (true) {
      FixedAssignment fa;
      fa.rx = rx;
      for (int k = 0; k < K; ++k) fa.serving.push_back(digit[k] < rx ? digit[k] : digit[k] + 1);
      SolutionReport r = solve_fixed_assignment(inst, fa, cfg, "oracle");
      OracleRow row;
      row.assignment = fa;
      row.config = describe(fa);
      row.status = r.status;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.power_dbm = r.feasible() ? r.total_power_dbm() : nan;
      row.crlb = r.feasible() ? r.crlb : nan;
      row.min_sinr_db = r.feasible() ? r.min_sinr_db() : nan;
      out.table.push_back(row);
      any_error = any_error || r.status == ReportStatus::SolverError;
      if (r.feasible() && (!have || r.total_power < out.best.total_power)) {
        out.best = std::move(r);
        have = true;
      }
      int k = 0;
      while (k < K && ++digit[k] == S - 1) digit[k++] = 0;
      if (k == K) break;
    }
  }
  if (!have) {
    out.best.status = any_error ? ReportStatus::SolverError : ReportStatus::Infeasible;
    if (any_error) out.best.message = "no feasible configuration; some solves failed";
  }
  return out;
}

void write_oracle_csv(std::ostream& os, const OracleResult& r) {
  os << "config,status,power_dbm,crlb,min_sinr_db\n";
  for (const OracleRow& row : r.table)
    os << row.config << ',' << to_string(row.status) << ',' << row.power_dbm << ',' << row.crlb
       << ',' << row.min_sinr_db << '\n';
}

}  // namespace netisac
