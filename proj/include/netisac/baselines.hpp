// SPDX-License-Identifier: Apache-2.0
//
// Reference schemes (closest receiver, random selection, fixed bistatic pair)
// and an exhaustive oracle over all binary configurations of small instances.
// All of them share the fixed-binary beamforming program with the optimizer.
#pragma once

#include <cstdint>
#include <iosfwd>

#include "netisac/ao.hpp"

namespace netisac {

/// Beamforming only, for a given receiver and association.
SolutionReport solve_fixed_assignment(const Instance& inst, const FixedAssignment& fa,
                                      const AoConfig& cfg, const std::string& scheme = "fixed");

/// Receiver = BS closest to the target, association and beamforming by AO.
SolutionReport scheme1_closest(const Instance& inst, const AoConfig& cfg);

/// Uniform receiver, each CU uniform among the remaining BSs. `seed` is the
/// trial seed; the draw uses its own stream.
FixedAssignment random_assignment(int S, int K, std::uint64_t seed);
SolutionReport scheme2_random(const Instance& inst, const AoConfig& cfg, std::uint64_t seed);

/// One transmitter serves everyone, one receiver listens, the rest stay idle.
SolutionReport scheme3_bistatic(const Instance& inst, const AoConfig& cfg, int tx = 0, int rx = 1);

struct OracleRow {
  FixedAssignment assignment;
  std::string config;  // "rx=2;serve=1|3|...", BSs 1-based
  ReportStatus status = ReportStatus::Infeasible;
  double power_dbm = 0.0;
  double crlb = 0.0;
  double min_sinr_db = 0.0;
};

struct OracleResult {
  SolutionReport best;  // Infeasible when no configuration is
  std::vector<OracleRow> table;
};

/// S (S-1)^K, saturating.
std::uint64_t enumeration_size(int S, int K);

/// Every receiver and every CU-to-transmitter map. Throws InvalidArgument
/// when the enumeration exceeds `cap`.
OracleResult brute_force(const Instance& inst, const AoConfig& cfg, std::uint64_t cap = 2000);

std::string describe(const FixedAssignment& fa);

/// CSV: config,status,power_dbm,crlb,min_sinr_db
void write_oracle_csv(std::ostream& os, const OracleResult& r);

}  // namespace netisac
