// SPDX-License-Identifier: Apache-2.0
//
// Alternating optimization over the binary-selection block and the continuous
// block, with a penalty on non-binary values, followed by rounding, a
// fixed-binary polish solve and rank-one beamformer extraction.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netisac/conic/builders.hpp"
#include "netisac/conic/solver.hpp"

namespace netisac {

using conic::FixedAssignment;
using conic::Instance;

enum class InitPolicy {
  FirstFeasible,  // candidates by ascending communication load, first feasible wins
  BestOfAll,      // every candidate solved, lowest power wins
};

struct AoConfig {
  double mu = 3e4;
  double eps_tol = 1e-3;
  int max_iter = 50;
  double rank_tol = 1e-4;
  double binary_tol = 1e-3;
  InitPolicy init = InitPolicy::BestOfAll;
  conic::SolverOptions solver;

  void validate() const;
};

/// Largest relative power increase applied to a beam whose SINR the solver
/// left marginally short.
inline constexpr double kMaxSinrBoost = 1e-2;

enum class ReportStatus { Feasible, Infeasible, SolverError };
const char* to_string(ReportStatus s);

struct SolveRecord {
  std::string stage;
  conic::SolveStatus status = conic::SolveStatus::SolverError;
  int iterations = 0;
  double runtime_s = 0.0;
};

struct SolutionReport {
  std::string scheme = "proposed";
  ReportStatus status = ReportStatus::Infeasible;
  std::string message;
  int rx_bs = -1;
  Mat a;                                  // S x K binary
  std::vector<int> serving;               // serving BS per CU
  std::vector<std::vector<CVec>> w;       // [s][k], empty when not served
  std::vector<CMat> R;
  double total_power = 0.0;               // Watts
  double crlb = 0.0;                      // m^2
  Vec sinr;                               // linear
  Vec bs_power;                           // Watts per BS
  int iterations = 0;
  bool converged = false;
  std::vector<double> fbar_history;
  std::vector<SolveRecord> trail;
  double raw_rank_ratio = 0.0;  // largest lambda2/lambda1 of the solver's W
  double rank_ratio = 0.0;      // same for the returned W = w w^H
  double sinr_boost = 0.0;      // largest relative beam power increase after the solve
  bool inaccurate = false;
  double runtime_s = 0.0;

  bool feasible() const { return status == ReportStatus::Feasible; }
  double total_power_dbm() const { return watts_to_dbm(total_power); }
  double min_sinr_db() const;
};

/// Dominant eigenpair extraction: w = sqrt(l1) u1, with ratio = l2 / l1.
struct Beamformer {
  CVec w;
  double ratio = 0.0;
  bool rank_one = false;
};
Beamformer extract_beamformer(const CMat& W, double rank_tol);

/// A solved fixed-binary program.
struct FixedSolve {
  FixedAssignment assignment;
  conic::SolveOutcome outcome;
  DecisionPoint point;  // valid when outcome.usable()
  double power = 0.0;
};

FixedSolve solve_fixed(const Instance& inst, const FixedAssignment& fa,
                       const conic::SolverOptions& opts);

/// Rank-one reduction, metrics-level validation and report assembly.
SolutionReport make_report(const Instance& inst, const FixedSolve& fs, const AoConfig& cfg,
                           std::string scheme);

/// Strongest-channel association with `rx` receiving and `silent` BSs idle.
FixedAssignment strongest_association(const Instance& inst, int rx,
                                      const std::vector<char>& silent = {});

struct InitResult {
  bool feasible = false;
  FixedSolve best;
  std::vector<FixedSolve> candidates;  // in the order they were tried
};

/// Candidate sweep over receiving BSs (only `fixed_rx` when given).
InitResult initialize(const Instance& inst, const AoConfig& cfg,
                      std::optional<int> fixed_rx = std::nullopt);

struct AoState {
  DecisionPoint d;
  double fbar = 0.0;
  int iteration = 0;
  bool failed = false;
  std::vector<SolveRecord> trail;
};

/// f + mu * penalty at d, the quantity the surrogate majorizes.
double merit(const DecisionPoint& d, double mu);

/// One block-coordinate pass: b update (skipped when `freeze_b`), then the
/// continuous block.
AoState ao_step(const Instance& inst, const AoState& state, const AoConfig& cfg, bool freeze_b);

/// Binary projection of a relaxed point.
FixedAssignment round_assignment(const Instance& inst, const DecisionPoint& d);

/// Full pipeline. With `fixed_rx` the receiving BS is frozen.
SolutionReport run_ao(const Instance& inst, const AoConfig& cfg,
                      std::optional<int> fixed_rx = std::nullopt,
                      const std::string& scheme = "proposed");

}  // namespace netisac
