// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "netisac/conic/solver.hpp"
#include "oracles.hpp"

using namespace netisac;
using namespace netisac::conic;

TEST_CASE("LP with bounds and an equality") {
  // min -x - 2y  s.t. x + y <= 4, x - y = 1, 0 <= x, y <= 2
  ConicProgram p;
  const int x = p.add_scalar("x", 0.0, kInf);
  const int y = p.add_scalar("y", -kInf, 2.0);
  p.add_linear(LinExpr(4.0) - LinExpr::variable(x) - LinExpr::variable(y), Sense::GreaterEq);
  p.add_linear(LinExpr::variable(x) - LinExpr::variable(y) - LinExpr(1.0), Sense::Equal);
  p.set_objective(-1.0 * LinExpr::variable(x) - 2.0 * LinExpr::variable(y));
  const SolveOutcome o = solve(p);
  REQUIRE(o.status == SolveStatus::Optimal);
  CHECK(o.x(x) == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(o.x(y) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(o.objective == doctest::Approx(-5.5).epsilon(1e-7));
}

TEST_CASE("largest eigenvalue as an SDP") {
  Mat A(3, 3);
  A << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  ConicProgram p;
  const int t = p.add_scalar("t");
  ExprMatrix m(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      m(i, j) = LinExpr(-A(i, j));
      if (i == j) m(i, j) += LinExpr::variable(t);
    }
  p.add_lmi(m);
  p.set_objective(LinExpr::variable(t));
  const SolveOutcome o = solve(p);
  REQUIRE(o.status == SolveStatus::Optimal);
  CHECK(o.x(t) == doctest::Approx(Eigen::SelfAdjointEigenSolver<Mat>(A).eigenvalues()(2)).epsilon(1e-7));
}

TEST_CASE("minimum-power beamforming for one user has the matched-filter optimum") {
  const CVec h = oracle::steering(0.3, 4) * cd(0.2, 0.1);
  ConicProgram p;
  const MatrixVar W = p.add_hermitian("W", 4, true);
  p.add_linear(p.re_trace_product(W, h * h.adjoint()) - LinExpr(1.0), Sense::GreaterEq);
  p.set_objective(p.trace(W));
  const SolveOutcome o = solve(p);
  REQUIRE(o.status == SolveStatus::Optimal);
  CHECK(o.objective == doctest::Approx(1.0 / h.squaredNorm()).epsilon(1e-6));
  const CMat Wv = herm_value(W, o.x);
  Eigen::SelfAdjointEigenSolver<CMat> es(Wv);
  CHECK(es.eigenvalues()(2) <= 1e-6 * es.eigenvalues()(3));
}

TEST_CASE("infeasibility is reported, not thrown") {
  ConicProgram p;
  const MatrixVar X = p.add_symmetric("X", 2, true);
  ExprMatrix m = p.sym_expr(X);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = -1.0 * m(i, j);
  m(0, 0).add_constant(-1.0);
  p.add_lmi(m);  // -X - e1 e1' >= 0 with X >= 0
  p.set_objective(p.trace(X));
  const SolveOutcome o = solve(p);
  CHECK(o.status == SolveStatus::Infeasible);
  CHECK_FALSE(o.usable());
}

TEST_CASE("malformed programs throw") {
  ConicProgram p;
  p.set_objective(LinExpr::variable(2));
  CHECK_THROWS_AS(solve(p), InvalidArgument);
}
