// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "netisac/ao.hpp"
#include "netisac/conic/builders.hpp"
#include "netisac/conic/solver.hpp"
#include "oracles.hpp"

using namespace netisac;
using namespace netisac::conic;

namespace {

struct Small {
  Scene scene;
  ChannelSet ch;
};

Small small(std::uint64_t seed, int N = 4) {
  ScenarioConfig c = default_scenario();
  c.num_bs = 3;
  c.num_cu = 2;
  c.num_antennas = N;
  c.bs_positions.resize(3);
  c.rng_seed = seed;
  Small s{build_scene(c), {}};
  s.ch = sample_channels(s.scene, seed + 1);
  return s;
}

}  // namespace

TEST_CASE("trace-inverse epigraph attains tr(J^-1)") {
  Mat2 J0;
  J0 << 3.0, 1.0, 1.0, 2.0;
  ConicProgram p;
  const MatrixVar J = p.add_symmetric("J", 2, false);
  Vec x0 = Vec::Zero(p.num_variables());
  set_sym_value(J, J0, x0);
  for (int i = 0; i < 3; ++i)
    p.add_linear(LinExpr::variable(J.offset + i) - LinExpr(x0(J.offset + i)), Sense::Equal);
  const EpigraphHandles h = add_trace_inverse_epigraph(p, J, 10.0);
  p.set_objective(p.trace(h.U));
  const SolveOutcome o = solve(p);
  REQUIRE(o.status == SolveStatus::Optimal);
  CHECK(o.objective == doctest::Approx(J0.inverse().trace()).epsilon(1e-7));
  CHECK_THROWS_AS(add_trace_inverse_epigraph(p, J, 0.0), InvalidArgument);
}

TEST_CASE("sensing check optimum is the CRLB") {
  const Small s = small(21);
  const Instance inst(s.scene, s.ch, QosSpec::uniform(2, 8.0, 1e6, s.scene.max_power()));
  DecisionPoint d = DecisionPoint::zeros(3, 2, 4);
  d.b(1) = 0.0;
  d.a(0, 0) = d.a(2, 1) = 1.0;
  d.W[0][0] = d.Wt[0][0] = oracle::random_psd(1, 4, 1, 1e-2);
  d.W[2][1] = d.Wt[2][1] = oracle::random_psd(2, 4, 1, 1e-2);
  d.R[0] = oracle::random_psd(3, 4, 2, 1e-2);
  const CrlbResult c = crlb(fim_blocks(1, d, inst.links(1), 1024, s.ch.sigma2_r(1)));
  REQUIRE(c.ok());
  const BuiltProgram bp = build_sensing_check(inst, d, 10.0 * c.value);
  const SolveOutcome o = solve(bp.prog);
  REQUIRE(o.usable());
  CHECK(o.objective == doctest::Approx(c.value).epsilon(1e-5));
  CHECK(solve(build_sensing_check(inst, d, 0.5 * c.value).prog).status == SolveStatus::Infeasible);
}

TEST_CASE("fixed-binary program yields a feasible, tight design") {
  const Small s = small(22);
  const Instance inst(s.scene, s.ch, QosSpec::uniform(2, 8.0, 1.0, s.scene.max_power()));
  FixedAssignment fa;
  fa.rx = 0;
  fa.serving = {1, 2};
  const BuiltProgram bp = build_fixed_binary(inst, fa);
  const SolveOutcome o = solve(bp.prog);
  REQUIRE(o.usable());
  const DecisionPoint d = bp.vars.extract(o.x);
  CHECK(d.receiving_bs() == 0);
  double min_ratio = 1e300;
  for (int k = 0; k < 2; ++k) min_ratio = std::min(min_ratio, sinr(k, d, s.ch) / inst.qos().gamma(k));
  CHECK(min_ratio >= 1.0 - 1e-5);
  const CrlbResult c = crlb(fim_blocks(0, d, inst.links(0), 1024, s.ch.sigma2_r(0)));
  REQUIRE(c.ok());
  CHECK(c.value <= 1.0 + 1e-5);
  // Minimum power: at least one QoS constraint is active.
  CHECK((c.value >= 1.0 - 1e-4 || min_ratio <= 1.0 + 1e-4));
  CHECK(objective_f(d) == doctest::Approx(o.objective * bp.objective_scale).epsilon(1e-9));
}

TEST_CASE("assignment and product preconditions") {
  FixedAssignment fa;
  fa.rx = 1;
  fa.serving = {1, 0};
  CHECK_THROWS_AS(fa.validate(3, 2), InvalidArgument);
  fa.serving = {0};
  CHECK_THROWS_AS(fa.validate(3, 2), InvalidArgument);
  fa.serving = {0, 2};
  fa.silent = {0, 0, 1};
  CHECK_THROWS_AS(fa.validate(3, 2), InvalidArgument);
  fa.silent.clear();
  fa.validate(3, 2);
  CHECK(fa.b(3)(1) == 0.0);
  CHECK(fa.a(3)(2, 1) == 1.0);
  CHECK_THROWS_AS(product(LinExpr::variable(0), LinExpr::variable(1), "x"), InvalidArgument);
  CHECK(product(LinExpr(2.0), LinExpr::variable(1), "x").terms()[0].coef == 2.0);
}

TEST_CASE("binary update keeps a binary incumbent under a strong penalty") {
  const Small s = small(23);
  const Instance inst(s.scene, s.ch, QosSpec::uniform(2, 8.0, 1.0, s.scene.max_power()));
  FixedAssignment fa;
  fa.rx = 2;
  fa.serving = {0, 1};
  const FixedSolve fs = solve_fixed(inst, fa, {});
  REQUIRE(fs.outcome.usable());
  const BuiltProgram bp = build_subproblem_b(inst, fs.point, 3e4);
  const SolveOutcome o = solve(bp.prog);
  REQUIRE(o.usable());
  const Vec b = bp.vars.extract(o.x).b;
  CHECK(b(2) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(b(0) == doctest::Approx(1.0).epsilon(1e-6));
}
