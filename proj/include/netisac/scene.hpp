// SPDX-License-Identifier: Apache-2.0
//
// Network geometry, downlink channel sampling and the sensing-link quantities
// (steering vectors, target response matrices and their derivatives with
// respect to the target position).
//
// Conventions: every ULA lies along the x-axis with boresight +y, so the angle
// of a point p seen from a BS at q is atan2(p_x - q_x, p_y - q_y). Delays are
// expressed in samples (seconds times bandwidth).
#pragma once

#include <array>
#include <optional>

#include "netisac/types.hpp"

namespace netisac {

struct ScenarioConfig {
  int num_bs = 4;
  int num_cu = 5;
  int num_antennas = 8;
  int num_samples = 1024;
  double service_radius = 150.0;
  std::vector<Vec2> bs_positions;
  std::optional<std::vector<Vec2>> cu_positions;  // nullopt: uniform in the disc
  std::optional<Vec2> target_position;            // nullopt: uniform in the disc
  double pathloss_exp_comm = 3.0;
  double pathloss_exp_sense = 2.0;
  double noise_comm_dbm = -85.0;
  double noise_radar_dbm = -65.0;
  double max_power_dbm = 45.0;
  double bandwidth_hz = 10e6;
  double rcs = 1.0;
  std::uint64_t rng_seed = 0;
  // Random draws never land closer than this to a BS.
  double min_separation = 1.0;

  /// Checks the invariants; throws InvalidArgument naming the offending field.
  void validate() const;
};

/// The four-BS layout used throughout the evaluation, CUs and target random.
ScenarioConfig default_scenario();
/// The fixed geometry of the BS-selection comparison (five CUs, one target).
ScenarioConfig table2_scenario();

struct Scene {
  ScenarioConfig config;
  std::vector<Vec2> bs;
  std::vector<Vec2> cu;
  Vec2 target = Vec2::Zero();
  Mat dist_bs_cu;       // S x K, meters
  Vec dist_bs_target;   // S, meters
  std::uint64_t phase_seed = 0;

  int num_bs() const { return static_cast<int>(bs.size()); }
  int num_cu() const { return static_cast<int>(cu.size()); }
  int num_antennas() const { return config.num_antennas; }
  int num_samples() const { return config.num_samples; }
  double max_power() const { return dbm_to_watts(config.max_power_dbm); }
  /// Index of the BS nearest to the target; ties go to the lowest index.
  int closest_bs_to_target() const;
};

/// Materializes all randomness of `config` (placements use config.rng_seed).
Scene build_scene(const ScenarioConfig& config);

struct ChannelSet {
  std::vector<std::vector<CVec>> h;  // [s][k], N entries each
  Vec sigma2_c;                      // per CU, Watts
  Vec sigma2_r;                      // per BS, Watts

  int num_bs() const { return static_cast<int>(h.size()); }
  int num_cu() const { return h.empty() ? 0 : static_cast<int>(h.front().size()); }
  /// ||h_{s,k}||^2
  double gain(int s, int k) const { return h[s][k].squaredNorm(); }
};

/// Path gain d^(-exponent) with 0 dB at 1 m.
double path_gain(double distance, double exponent);

/// Rayleigh-faded channels h = sqrt(d^-beta_c) g with g ~ CN(0, I).
ChannelSet sample_channels(const Scene& scene, std::uint64_t seed);

/// a(theta)_n = exp(-j pi n sin theta), n = 0..N-1.
CVec steering_vector(double theta, int num_antennas);
/// d a(theta) / d theta.
CVec steering_derivative(double theta, int num_antennas);

/// Angle of `point` as seen from a BS at `bs` (radians from boresight).
double bearing(const Vec2& bs, const Vec2& point);
/// Gradient of bearing() with respect to `point`.
Vec2 bearing_gradient(const Vec2& bs, const Vec2& point);

/// Geometry and response of one transmit-BS -> target -> receive-BS path.
struct SensingLink {
  int rx = 0;
  int tx = 0;
  double theta_r = 0.0;      // AoA at rx
  double theta_t = 0.0;      // AoD at tx
  Vec2 dtheta_r = Vec2::Zero();  // d theta_r / d p
  Vec2 dtheta_t = Vec2::Zero();
  double tau = 0.0;          // samples
  Vec2 tau_grad = Vec2::Zero();  // samples per meter
  cd alpha{0.0, 0.0};
  CMat G;                    // a(theta_r) a(theta_t)^H
  std::array<CMat, 2> Gdot;  // d G / d p_i
  std::array<CMat, 2> Gtilde;  // Gdot_i - tau_grad_i * G
};

/// Response matrices for the path tx -> target -> rx. The complex gain phase
/// is drawn from the scene's phase stream, independently per (rx, tx).
SensingLink link_geometry(const Scene& scene, int rx, int tx);

/// Same, evaluated for a hypothetical target position (used by derivative
/// checks); the gain phase still comes from the scene.
SensingLink link_geometry_at(const Scene& scene, int rx, int tx, const Vec2& target);

/// All links into `rx`, ordered by ascending tx index (tx != rx).
std::vector<SensingLink> links_for_rx(const Scene& scene, int rx);

}  // namespace netisac
