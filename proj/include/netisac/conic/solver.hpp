// SPDX-License-Identifier: Apache-2.0
//
// Primal-dual interior-point method for ConicProgram (nonnegative orthant,
// PSD cones and linear equalities). Infeasible start, HKM search direction,
// Mehrotra predictor-corrector.
#pragma once

#include <stdexcept>
#include <string>

#include "netisac/conic/program.hpp"

namespace netisac::conic {

enum class SolveStatus { Optimal, Infeasible, Inaccurate, SolverError };

const char* to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-8;             // relative primal/dual residual and gap
  double inaccurate_tol = 1e-5;  // accepted with status Inaccurate
  int max_iter = 120;
  bool verbose = false;
};

struct SolveStats {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double runtime_s = 0.0;
  int num_variables = 0;  // after presolve
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::SolverError;
  Vec x;  // one entry per declared scalar
  double objective = 0.0;
  SolveStats stats;
  std::string message;

  /// Optimal or Inaccurate: x is a usable approximate optimum.
  bool usable() const { return status == SolveStatus::Optimal || status == SolveStatus::Inaccurate; }
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves the program. Numerical trouble is reported through the status,
/// never thrown; a malformed program throws InvalidArgument.
SolveOutcome solve(const ConicProgram& prog, const SolverOptions& opts = {});

}  // namespace netisac::conic
