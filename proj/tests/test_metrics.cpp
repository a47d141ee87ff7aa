// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "doctest.h"
#include "netisac/metrics.hpp"
#include "oracles.hpp"

using namespace netisac;

namespace {

struct Fixture {
  Scene scene;
  ChannelSet ch;
  DecisionPoint d;
  int rx = 2;
};

// Binary point: rx = 2, CU k served by BS (k % 2 == 0 ? 0 : 3), everyone else sensing.
Fixture make(std::uint64_t seed, int K = 2, int N = 4) {
  ScenarioConfig c = default_scenario();
  c.num_cu = K;
  c.num_antennas = N;
  c.rng_seed = seed;
  Fixture f{build_scene(c), {}, DecisionPoint::zeros(4, K, N)};
  f.ch = sample_channels(f.scene, seed + 100);
  f.d.b(f.rx) = 0.0;
  for (int k = 0; k < K; ++k) {
    const int s = k % 2 == 0 ? 0 : 3;
    f.d.a(s, k) = 1.0;
    f.d.W[s][k] = oracle::random_psd(seed * 10 + k, N, 1, 1e-2);
    f.d.Wt[s][k] = f.d.W[s][k];
  }
  for (int s : {0, 1, 3}) f.d.R[s] = oracle::random_psd(seed * 10 + 7 + s, N, 2, 1e-3);
  return f;
}

}  // namespace

TEST_CASE("SINR matches the direct formula and a symbol-level simulation") {
  const Fixture f = make(3);
  for (int k = 0; k < 2; ++k) {
    const double direct = oracle::sinr_direct(k, f.ch.h, f.d.a, f.d.b, f.d.W, f.d.R, f.ch.sigma2_c(k));
    CHECK(sinr(k, f.d, f.ch) == doctest::Approx(direct).epsilon(1e-12));
    const double mc = oracle::sinr_monte_carlo(k, f.ch.h, f.d.a, f.d.b, f.d.W, f.d.R, f.ch.sigma2_c(k),
                                               100000, 17 + k);
    CHECK(sinr(k, f.d, f.ch) == doctest::Approx(mc).epsilon(0.01));
    const double g = direct;
    CHECK(sinr_linear_residual(k, f.d, f.ch, g * 0.99) > 0.0);
    CHECK(sinr_linear_residual(k, f.d, f.ch, g * 1.01) < 0.0);
  }
  DecisionPoint relaxed = f.d;
  relaxed.a(0, 0) = 0.5;
  CHECK_THROWS_AS(sinr(0, relaxed, f.ch), InvalidArgument);
}

TEST_CASE("FIM is linear in the covariances and PSD") {
  const Fixture f = make(5);
  const auto links = links_for_rx(f.scene, f.rx);
  const double s2 = f.ch.sigma2_r(f.rx);
  std::vector<CMat> c1 = f.d.covariances(), c2(4), mix(4);
  for (int s = 0; s < 4; ++s) {
    c2[s] = oracle::random_psd(900 + s, 4, 3, 0.1);
    mix[s] = 0.3 * c1[s] + 2.0 * c2[s];
  }
  const Mat F1 = fim_blocks(f.rx, c1, links, 1024, s2).full();
  const Mat F2 = fim_blocks(f.rx, c2, links, 1024, s2).full();
  const Mat Fm = fim_blocks(f.rx, mix, links, 1024, s2).full();
  CHECK((Fm - (0.3 * F1 + 2.0 * F2)).norm() <= 1e-10 * Fm.norm());
  const Eigen::SelfAdjointEigenSolver<Mat> es(F1);
  CHECK(es.eigenvalues()(0) >= -1e-8 * F1.trace());
  const FimBlocks b = fim_blocks(f.rx, c1, links, 1024, s2);
  CHECK(b.F_aa.rows() == 6);
  CHECK(b.F_aa(0, 0) == doctest::Approx(b.F_aa(3, 3)));
  CHECK(b.F_aa(0, 1) == 0.0);
}

TEST_CASE("FIM coefficients reproduce the blocks") {
  const Fixture f = make(6);
  const auto links = links_for_rx(f.scene, f.rx);
  const double s2 = f.ch.sigma2_r(f.rx);
  const auto cov = f.d.covariances();
  const FimBlocks b = fim_blocks(f.rx, cov, links, 1024, s2);
  const auto coef = fim_coefficients(links, 1024, s2);
  Mat2 pp = Mat2::Zero();
  for (std::size_t l = 0; l < coef.size(); ++l) {
    const CMat& C = cov[coef[l].tx];
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) pp(i, j) += (coef[l].pp[i][j] * C).trace().real();
      CHECK((coef[l].pa_re[i] * C).trace().real() == doctest::Approx(b.F_pa(i, l)));
      CHECK((coef[l].pa_im[i] * C).trace().real() == doctest::Approx(b.F_pa(i, 3 + l)));
    }
    CHECK((coef[l].aa * C).trace().real() == doctest::Approx(b.F_aa(l, l)));
  }
  CHECK((pp - b.F_pp).norm() <= 1e-10 * b.F_pp.norm());
}

TEST_CASE("CRLB equals the pseudo-inverse marginalization") {
  SUBCASE("single pair, N = 2") {
    ScenarioConfig c = default_scenario();
    c.num_bs = 2;
    c.bs_positions = {Vec2(-80, 0), Vec2(80, 0)};
    c.num_antennas = 2;
    c.target_position = Vec2(10, 70);
    const Scene scene = build_scene(c);
    const auto links = links_for_rx(scene, 0);
    const std::vector<CMat> cov{CMat::Zero(2, 2), oracle::random_psd(1, 2, 2, 1.0)};
    const FimBlocks f = fim_blocks(0, cov, links, 1024, 1e-9);
    const CrlbResult r = crlb(f);
    REQUIRE(r.ok());
    CHECK(r.value == doctest::Approx(oracle::crlb_pinv(f.full())).epsilon(1e-8));
  }
  SUBCASE("silent transmitter is marginalized away") {
    Fixture f = make(8);
    f.d.R[1].setZero();
    const FimBlocks b = fim_blocks(f.rx, f.d, links_for_rx(f.scene, f.rx), 1024, f.ch.sigma2_r(f.rx));
    const CrlbResult r = crlb(b);
    REQUIRE(r.ok());
    CHECK(r.value == doctest::Approx(oracle::crlb_pinv(b.full())).epsilon(1e-8));
  }
  SUBCASE("no energy is unlocalizable") {
    const Fixture f = make(9);
    const std::vector<CMat> zero(4, CMat::Zero(4, 4));
    CHECK(crlb(fim_blocks(f.rx, zero, links_for_rx(f.scene, f.rx), 1024, 1.0)).status ==
          CrlbStatus::Unlocalizable);
  }
  SUBCASE("scaling the covariances by kappa divides the bound by kappa") {
    const Fixture f = make(10);
    const auto links = links_for_rx(f.scene, f.rx);
    auto cov = f.d.covariances();
    const double base = crlb(fim_blocks(f.rx, cov, links, 1024, 1e-9)).value;
    for (auto& m : cov) m *= 10.0;
    CHECK(crlb(fim_blocks(f.rx, cov, links, 1024, 1e-9)).value == doctest::Approx(base / 10.0).epsilon(1e-10));
  }
}

TEST_CASE("objective, penalty and surrogate") {
  Fixture f = make(11);
  double tr = 0.0;
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < 2; ++k) tr += f.d.Wt[s][k].trace().real();
    tr += f.d.b(s) * f.d.R[s].trace().real();
  }
  CHECK(objective_f(f.d) == doctest::Approx(tr));
  CHECK(binary_penalty(f.d) == 0.0);
  DecisionPoint x = f.d;
  x.a(0, 0) = 0.25;
  x.b(1) = 0.5;
  CHECK(binary_penalty(x) == doctest::Approx(0.1875 + 0.25));
  CHECK(surrogate_fbar(x, f.d, 10.0) >= objective_f(x) + 10.0 * binary_penalty(x));
  CHECK(surrogate_fbar(x, x, 10.0) == doctest::Approx(objective_f(x) + 10.0 * binary_penalty(x)));
}

TEST_CASE("decision point helpers") {
  Fixture f = make(12);
  CHECK(f.d.is_binary());
  CHECK(f.d.receiving_bs() == 2);
  f.d.validate(4);
  DecisionPoint bad = f.d;
  bad.R[0](0, 0) = -1.0;
  CHECK_THROWS_AS(bad.validate(4), InvalidArgument);
  bad = f.d;
  bad.b(0) = 0.0;
  CHECK(bad.receiving_bs() == -1);
  CHECK_THROWS_AS(QosSpec::uniform(2, 8.0, -1.0, 1.0).validate(2), InvalidArgument);
  CHECK(QosSpec::uniform(2, 10.0, 1.0, 1.0).gamma(1) == doctest::Approx(10.0));
}
