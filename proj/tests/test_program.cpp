// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "netisac/conic/program.hpp"
#include "oracles.hpp"

using namespace netisac;
using namespace netisac::conic;

TEST_CASE("linear expressions") {
  LinExpr e = LinExpr::variable(0, 2.0) + LinExpr::variable(1, -1.0) + LinExpr(3.0);
  e += LinExpr::variable(0, 1.0);
  e.compress();
  REQUIRE(e.terms().size() == 2);
  Vec x(2);
  x << 1.0, 4.0;
  CHECK(e.evaluate(x) == doctest::Approx(3.0 - 4.0 + 3.0));
  const LinExpr z = e - e;
  LinExpr zc = z;
  zc.compress();
  CHECK(zc.is_constant());
  CHECK((2.0 * e).evaluate(x) == doctest::Approx(4.0));
  CHECK((-e).constant() == -3.0);
}

TEST_CASE("matrix variables round-trip") {
  ConicProgram p;
  const MatrixVar S = p.add_symmetric("S", 3, false);
  const MatrixVar H = p.add_hermitian("H", 3, true);
  CHECK(S.num_scalars() == 6);
  CHECK(H.num_scalars() == 9);
  CHECK(p.num_variables() == 15);
  Vec x = Vec::Zero(p.num_variables());
  Mat s(3, 3);
  s << 1, 2, 3, 2, 5, 6, 3, 6, 9;
  const CMat h = oracle::random_psd(4, 3, 2, 2.0);
  set_sym_value(S, s, x);
  set_herm_value(H, h, x);
  CHECK((sym_value(S, x) - s).norm() == 0.0);
  CHECK((herm_value(H, x) - h).norm() < 1e-15);
  CHECK(p.trace(H).evaluate(x) == doctest::Approx(2.0));
  const CMat Q = oracle::random_psd(5, 3, 3, 1.0);
  CHECK(p.re_trace_product(H, Q).evaluate(x) == doctest::Approx((Q * h).trace().real()));
  const CLinExpr e = p.hentry(H, 0, 2);
  CHECK(e.re.evaluate(x) == doctest::Approx(h(0, 2).real()));
  CHECK(e.im.evaluate(x) == doctest::Approx(h(0, 2).imag()));
  CHECK(p.entry(S, 2, 1).evaluate(x) == 6.0);
  // One LMI per PSD variable.
  CHECK(p.lmi_constraints().size() == 1);
}

TEST_CASE("real embedding of Hermitian matrices preserves the spectrum") {
  ConicProgram p;
  const MatrixVar H = p.add_hermitian("H", 2, false);
  Vec x = Vec::Zero(p.num_variables());
  CMat h(2, 2);
  h << cd(2, 0), cd(1, 1), cd(1, -1), cd(3, 0);
  set_herm_value(H, h, x);
  const Mat E = evaluate(embed_hermitian(p.herm_expr(H)), x);
  Eigen::SelfAdjointEigenSolver<Mat> er(E);
  Eigen::SelfAdjointEigenSolver<CMat> ec(h);
  CHECK(er.eigenvalues()(0) == doctest::Approx(ec.eigenvalues()(0)));
  CHECK(er.eigenvalues()(1) == doctest::Approx(ec.eigenvalues()(0)));
  CHECK(er.eigenvalues()(3) == doctest::Approx(ec.eigenvalues()(1)));
}

TEST_CASE("program validation and SDPA export") {
  ConicProgram p;
  const int y = p.add_scalar("y", 0.0, 1.0);
  p.add_linear(LinExpr::variable(y) - LinExpr(0.5), Sense::GreaterEq, "lb");
  p.set_objective(LinExpr::variable(y));
  p.validate();
  const std::string sdpa = p.to_sdpa();
  CHECK(sdpa.find("= mDIM") != std::string::npos);
  CHECK(sdpa.find("= nBLOCK") != std::string::npos);
  ConicProgram q;
  CHECK_THROWS_AS(q.add_linear(LinExpr::variable(3), Sense::GreaterEq), InvalidArgument);
}
