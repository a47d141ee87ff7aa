// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "netisac/scene.hpp"
#include "oracles.hpp"

using namespace netisac;

TEST_CASE("steering vector matches the array phase progression") {
  for (double th : {-1.2, -0.3, 0.0, 0.7, 1.4}) {
    const CVec a = steering_vector(th, 6);
    CHECK((a - oracle::steering(th, 6)).norm() < 1e-14);
    CHECK(a(0) == cd(1.0, 0.0));
    const double h = 1e-6;
    const CVec fd = (steering_vector(th + h, 6) - steering_vector(th - h, 6)) / (2 * h);
    CHECK((fd - steering_derivative(th, 6)).norm() <= 1e-7 * fd.norm() + 1e-9);
  }
}

TEST_CASE("bearing convention: boresight +y, positive towards +x") {
  const Vec2 q(10.0, -5.0);
  CHECK(bearing(q, q + Vec2(0, 7)) == doctest::Approx(0.0));
  CHECK(bearing(q, q + Vec2(3, 0)) == doctest::Approx(kPi / 2));
  CHECK(bearing(q, q + Vec2(-3, 3)) == doctest::Approx(-kPi / 4));
  const Vec2 p(40.0, 25.0);
  const double h = 1e-5;
  const Vec2 fd((bearing(q, p + Vec2(h, 0)) - bearing(q, p - Vec2(h, 0))) / (2 * h),
                (bearing(q, p + Vec2(0, h)) - bearing(q, p - Vec2(0, h))) / (2 * h));
  CHECK((fd - bearing_gradient(q, p)).norm() < 1e-9);
}

TEST_CASE("path gain is 0 dB at one meter") {
  CHECK(path_gain(1.0, 3.0) == doctest::Approx(1.0));
  CHECK(path_gain(10.0, 2.0) == doctest::Approx(1e-2));
  CHECK(path_gain(100.0, 3.0) == doctest::Approx(1e-6));
}

TEST_CASE("scenario validation names the offending field") {
  ScenarioConfig c = default_scenario();
  c.num_bs = 3;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("bs_positions"), InvalidArgument);
  c = default_scenario();
  c.rcs = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = default_scenario();
  c.cu_positions = std::vector<Vec2>{Vec2(0, 0)};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("cu_positions"), InvalidArgument);
  c = default_scenario();
  c.target_position = Vec2(500, 0);
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("target_position"), InvalidArgument);
}

TEST_CASE("scene placement is seeded and respects the disc") {
  ScenarioConfig c = default_scenario();
  c.rng_seed = 42;
  const Scene a = build_scene(c), b = build_scene(c);
  c.rng_seed = 43;
  const Scene other = build_scene(c);
  REQUIRE(a.num_cu() == 5);
  CHECK((a.target - b.target).norm() == 0.0);
  CHECK((a.target - other.target).norm() > 0.0);
  for (const Vec2& p : a.cu) {
    CHECK(p.norm() <= c.service_radius);
    for (const Vec2& q : a.bs) CHECK((p - q).norm() >= c.min_separation);
  }
  for (int s = 0; s < 4; ++s) {
    CHECK(a.dist_bs_target(s) == doctest::Approx((a.bs[s] - a.target).norm()));
    for (int k = 0; k < 5; ++k) CHECK(a.dist_bs_cu(s, k) == doctest::Approx((a.bs[s] - a.cu[k]).norm()));
  }
}

TEST_CASE("fixed geometry: the closest BS to the target is BS1") {
  const Scene s = build_scene(table2_scenario());
  CHECK(s.closest_bs_to_target() == 0);
  CHECK(s.target.x() == 30.0);
  CHECK(s.num_cu() == 5);
}

TEST_CASE("channel power follows the path loss (Monte Carlo)") {
  ScenarioConfig c = default_scenario();
  c.num_bs = 2;
  c.num_cu = 1;
  c.bs_positions = {Vec2(0, 0), Vec2(60, 0)};
  c.cu_positions = std::vector<Vec2>{Vec2(0, 50)};
  c.num_antennas = 4;
  const Scene scene = build_scene(c);
  double acc = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) acc += sample_channels(scene, static_cast<std::uint64_t>(i)).gain(0, 0);
  const double mean = acc / draws / c.num_antennas;
  CHECK(mean == doctest::Approx(std::pow(50.0, -3.0)).epsilon(0.02));
  const ChannelSet ch = sample_channels(scene, 5);
  CHECK(ch.sigma2_c(0) == doctest::Approx(dbm_to_watts(-85.0)));
  CHECK(ch.sigma2_r(1) == doctest::Approx(dbm_to_watts(-65.0)));
  CHECK((ch.h[0][0] - sample_channels(scene, 5).h[0][0]).norm() == 0.0);
}

TEST_CASE("sensing link: response, delay and gain from first principles") {
  ScenarioConfig c = default_scenario();
  c.target_position = Vec2(30, 60);
  c.rcs = 2.5;
  const Scene scene = build_scene(c);
  const SensingLink l = link_geometry(scene, 1, 3);
  const Vec2 qr = scene.bs[1], qt = scene.bs[3], p = scene.target;
  const double tr = std::atan2(p.x() - qr.x(), p.y() - qr.y());
  const double tt = std::atan2(p.x() - qt.x(), p.y() - qt.y());
  const CMat G = oracle::steering(tr, 8) * oracle::steering(tt, 8).adjoint();
  CHECK((l.G - G).norm() < 1e-12);
  const double dr = (p - qr).norm(), dt = (p - qt).norm();
  CHECK(l.tau == doctest::Approx((dr + dt) * 10e6 / 299792458.0));
  CHECK(std::abs(l.alpha) == doctest::Approx(2.5 / (dr * dt)));
  CHECK(std::abs(link_geometry(scene, 1, 3).alpha - l.alpha) == 0.0);
  CHECK_THROWS_AS(link_geometry(scene, 2, 2), InvalidArgument);
  const auto links = links_for_rx(scene, 2);
  REQUIRE(links.size() == 3);
  CHECK(links[0].tx == 0);
  CHECK(links[2].tx == 3);
}
