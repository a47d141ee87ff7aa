// SPDX-License-Identifier: Apache-2.0
//
// Self-check suites run by `isac_cli validate`: derivative fidelity, FIM
// linearity, reformulation equivalences, big-M exactness, solver sanity and
// oracle dominance on tiny instances.
#pragma once

#include <string>
#include <vector>

#include "netisac/types.hpp"

namespace netisac::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  int geometries = 20;
  int points = 20;
  int oracle_seeds = 3;
  std::uint64_t seed = 7;
  // Flips the sign of the imaginary F_p-alpha coupling of the x coordinate
  // inside the LMI builder's coefficients (mutation check).
  bool inject_fpa_sign_error = false;
};

CheckResult check_gradients(const Options& o);
CheckResult check_fim_linearity(const Options& o);
CheckResult check_reformulation(const Options& o);
CheckResult check_bigm(const Options& o);
CheckResult check_solver(const Options& o);
CheckResult check_oracle_dominance(const Options& o);

std::vector<CheckResult> run_all(const Options& o = {});

}  // namespace netisac::validation
