// SPDX-License-Identifier: Apache-2.0
#include "netisac/scene.hpp"

#include <random>

namespace netisac {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

Vec2 sample_in_disc(std::mt19937_64& rng, double radius, const std::vector<Vec2>& avoid,
                    double min_sep) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double r = radius * std::sqrt(unit(rng));
    const double phi = 2.0 * kPi * unit(rng);
    Vec2 p(r * std::cos(phi), r * std::sin(phi));
    bool ok = true;
    for (const auto& q : avoid) ok = ok && (p - q).norm() >= min_sep;
    if (ok) return p;
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  require(num_bs >= 2, "num_bs: need at least 2 base stations");
  require(num_cu >= 0, "num_cu: must be non-negative");
  require(num_antennas >= 1, "num_antennas: must be >= 1");
  require(num_samples >= 1, "num_samples: must be >= 1");
  require(service_radius > 0.0, "service_radius: must be positive");
  require(static_cast<int>(bs_positions.size()) == num_bs,
          "bs_positions: expected num_bs entries");
  require(bandwidth_hz > 0.0, "bandwidth_hz: must be positive");
  require(rcs > 0.0, "rcs: must be positive");
  require(pathloss_exp_comm > 0.0 && pathloss_exp_sense > 0.0,
          "pathloss exponents must be positive");
  require(min_separation > 0.0, "min_separation: must be positive");
  const double tol = 1e-9 * service_radius;
  for (std::size_t i = 0; i < bs_positions.size(); ++i) {
    require(bs_positions[i].norm() <= service_radius + tol,
            "bs_positions[" + std::to_string(i) + "]: outside the service radius");
    for (std::size_t j = 0; j < i; ++j)
      require((bs_positions[i] - bs_positions[j]).norm() > 0.0,
              "bs_positions[" + std::to_string(i) + "]: coincides with another BS");
  }
  if (cu_positions) {
    require(static_cast<int>(cu_positions->size()) == num_cu,
            "cu_positions: expected num_cu entries");
    for (std::size_t k = 0; k < cu_positions->size(); ++k) {
      const Vec2& p = (*cu_positions)[k];
      require(p.norm() <= service_radius + tol,
              "cu_positions[" + std::to_string(k) + "]: outside the service radius");
      for (const auto& q : bs_positions)
        require((p - q).norm() > 0.0,
                "cu_positions[" + std::to_string(k) + "]: coincides with a BS");
    }
  }
  if (target_position) {
    require(target_position->norm() <= service_radius + tol,
            "target_position: outside the service radius");
    for (const auto& q : bs_positions)
      require((*target_position - q).norm() > 0.0, "target_position: coincides with a BS");
  }
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.bs_positions = {Vec2(0, 100), Vec2(100, 0), Vec2(0, -100), Vec2(-100, 0)};
  return c;
}

ScenarioConfig table2_scenario() {
  ScenarioConfig c = default_scenario();
  c.cu_positions = std::vector<Vec2>{Vec2(-30, 80), Vec2(20, 130), Vec2(50, -80),
                                     Vec2(-40, -70), Vec2(-70, -20)};
  c.target_position = Vec2(30, 60);
  return c;
}

int Scene::closest_bs_to_target() const {
  int best = 0;
  for (int s = 1; s < num_bs(); ++s)
    if (dist_bs_target(s) < dist_bs_target(best)) best = s;
  return best;
}

Scene build_scene(const ScenarioConfig& config) {
  config.validate();
  Scene scene;
  scene.config = config;
  scene.bs = config.bs_positions;
  std::mt19937_64 rng(derive_seed(config.rng_seed, SeedStream::Placement));
  if (config.cu_positions) {
    scene.cu = *config.cu_positions;
  } else {
    for (int k = 0; k < config.num_cu; ++k)
      scene.cu.push_back(
          sample_in_disc(rng, config.service_radius, scene.bs, config.min_separation));
  }
  scene.target = config.target_position
                     ? *config.target_position
                     : sample_in_disc(rng, config.service_radius, scene.bs, config.min_separation);
  const int S = scene.num_bs();
  const int K = scene.num_cu();
  scene.dist_bs_cu.resize(S, K);
  scene.dist_bs_target.resize(S);
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) scene.dist_bs_cu(s, k) = (scene.cu[k] - scene.bs[s]).norm();
    scene.dist_bs_target(s) = (scene.target - scene.bs[s]).norm();
  }
  scene.phase_seed = derive_seed(config.rng_seed, SeedStream::Phase);
  return scene;
}

double path_gain(double distance, double exponent) {
  if (!(distance > 0.0)) throw InvalidArgument("path_gain: distance must be positive");
  return std::pow(distance, -exponent);
}

ChannelSet sample_channels(const Scene& scene, std::uint64_t seed) {
  const int S = scene.num_bs();
  const int K = scene.num_cu();
  const int N = scene.num_antennas();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ChannelSet ch;
  ch.h.assign(S, std::vector<CVec>(K));
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) {
      const double amp = std::sqrt(path_gain(scene.dist_bs_cu(s, k), scene.config.pathloss_exp_comm));
      CVec g(N);
      for (int n = 0; n < N; ++n) g(n) = cd(normal(rng), normal(rng));
      ch.h[s][k] = amp * g;
    }
  }
  ch.sigma2_c = Vec::Constant(K, dbm_to_watts(scene.config.noise_comm_dbm));
  ch.sigma2_r = Vec::Constant(S, dbm_to_watts(scene.config.noise_radar_dbm));
  return ch;
}

CVec steering_vector(double theta, int num_antennas) {
  CVec a(num_antennas);
  const double phase = -kPi * std::sin(theta);
  for (int n = 0; n < num_antennas; ++n) a(n) = std::polar(1.0, phase * n);
  return a;
}

CVec steering_derivative(double theta, int num_antennas) {
  CVec a = steering_vector(theta, num_antennas);
  const double c = std::cos(theta);
  for (int n = 0; n < num_antennas; ++n) a(n) *= cd(0.0, -kPi * n * c);
  return a;
}

double bearing(const Vec2& bs, const Vec2& point) {
  const Vec2 d = point - bs;
  return std::atan2(d.x(), d.y());
}

Vec2 bearing_gradient(const Vec2& bs, const Vec2& point) {
  const Vec2 d = point - bs;
  const double r2 = d.squaredNorm();
  return Vec2(d.y() / r2, -d.x() / r2);
}

SensingLink link_geometry_at(const Scene& scene, int rx, int tx, const Vec2& target) {
  const int S = scene.num_bs();
  if (rx < 0 || rx >= S || tx < 0 || tx >= S) throw InvalidArgument("link_geometry: BS index out of range");
  if (rx == tx) throw InvalidArgument("link_geometry: rx and tx must differ");
  const Vec2& qr = scene.bs[rx];
  const Vec2& qt = scene.bs[tx];
  const double dr = (target - qr).norm();
  const double dt = (target - qt).norm();
  if (!(dr > 0.0) || !(dt > 0.0)) throw InvalidArgument("link_geometry: target coincides with a BS");
  const int N = scene.num_antennas();
  const double fs_over_c = scene.config.bandwidth_hz / kSpeedOfLight;

  SensingLink link;
  link.rx = rx;
  link.tx = tx;
  link.theta_r = bearing(qr, target);
  link.theta_t = bearing(qt, target);
  link.dtheta_r = bearing_gradient(qr, target);
  link.dtheta_t = bearing_gradient(qt, target);
  link.tau = (dr + dt) * fs_over_c;
  link.tau_grad = ((target - qr) / dr + (target - qt) / dt) * fs_over_c;

  std::mt19937_64 rng(mix_seed(scene.phase_seed, static_cast<std::uint64_t>(rx * S + tx)));
  std::uniform_real_distribution<double> unit(0.0, 2.0 * kPi);
  const double beta = scene.config.pathloss_exp_sense;
  const double amp = scene.config.rcs * std::sqrt(path_gain(dt, beta) * path_gain(dr, beta));
  link.alpha = std::polar(amp, unit(rng));

  const CVec ar = steering_vector(link.theta_r, N);
  const CVec at = steering_vector(link.theta_t, N);
  const CVec dar = steering_derivative(link.theta_r, N);
  const CVec dat = steering_derivative(link.theta_t, N);
  link.G = ar * at.adjoint();
  for (int i = 0; i < 2; ++i) {
    link.Gdot[i] = (dar * link.dtheta_r(i)) * at.adjoint() + ar * (dat * link.dtheta_t(i)).adjoint();
    link.Gtilde[i] = link.Gdot[i] - link.tau_grad(i) * link.G;
  }
  return link;
}

SensingLink link_geometry(const Scene& scene, int rx, int tx) {
  return link_geometry_at(scene, rx, tx, scene.target);
}

std::vector<SensingLink> links_for_rx(const Scene& scene, int rx) {
  std::vector<SensingLink> out;
  for (int tx = 0; tx < scene.num_bs(); ++tx)
    if (tx != rx) out.push_back(link_geometry(scene, rx, tx));
  return out;
}

}  // namespace netisac
