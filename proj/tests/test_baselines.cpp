// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "doctest.h"
#include "netisac/baselines.hpp"
#include "netisac/experiments.hpp"

using namespace netisac;

TEST_CASE("random assignment is seeded and well formed") {
  const FixedAssignment a = random_assignment(4, 5, 11), b = random_assignment(4, 5, 11);
  CHECK(a.rx == b.rx);
  CHECK(a.serving == b.serving);
  a.validate(4, 5);
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) {
    const FixedAssignment c = random_assignment(4, 5, s);
    differs = c.rx != a.rx || c.serving != a.serving;
  }
  CHECK(differs);
  CHECK_THROWS_AS(random_assignment(1, 2, 0), InvalidArgument);
}

TEST_CASE("enumeration size") {
  CHECK(enumeration_size(3, 2) == 12u);
  CHECK(enumeration_size(4, 5) == 4u * 243u);
  CHECK(enumeration_size(1, 3) == 0u);
  CHECK(enumeration_size(100, 100) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("schemes on a small instance") {
  ScenarioConfig sc = default_scenario();
  sc.num_bs = 3;
  sc.num_cu = 2;
  sc.num_antennas = 2;
  sc.bs_positions.resize(3);
  const exp::Trial t = exp::make_trial(sc, 4);
  const Instance inst(t.scene, t.channels, exp::make_qos(t.scene, {8.0, 1.0}));
  AoConfig cfg;

  const OracleResult o = brute_force(inst, cfg);
  CHECK(o.table.size() == 12u);
  CHECK_THROWS_AS(brute_force(inst, cfg, 5), InvalidArgument);
  std::ostringstream csv;
  write_oracle_csv(csv, o);
  CHECK(csv.str().rfind("config,status,power_dbm,crlb,min_sinr_db\n", 0) == 0);
  CHECK(csv.str().find("rx=1;serve=") != std::string::npos);

  const SolutionReport ao = run_ao(inst, cfg);
  const SolutionReport s1 = scheme1_closest(inst, cfg);
  const SolutionReport s2 = scheme2_random(inst, cfg, 4);
  const SolutionReport s3 = scheme3_bistatic(inst, cfg);
  CHECK(s1.rx_bs == t.scene.closest_bs_to_target());
  for (const SolutionReport* r : {&ao, &s1, &s2, &s3}) {
    if (!r->feasible()) continue;
    REQUIRE(o.best.feasible());
    CHECK(r->total_power >= o.best.total_power * (1.0 - 1e-6));
  }
  if (s3.feasible()) {
    CHECK(s3.rx_bs == 1);
    CHECK(s3.bs_power(2) == 0.0);
    for (int s : s3.serving) CHECK(s == 0);
  }
  CHECK_THROWS_AS(scheme3_bistatic(inst, cfg, 1, 1), InvalidArgument);
  CHECK(describe(FixedAssignment{1, {0, 2}, {}}) == "rx=2;serve=1|3");
}
