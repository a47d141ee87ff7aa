// SPDX-License-Identifier: Apache-2.0
//
// Performance quantities of a decision point: per-user SINR, the Fisher
// information of the target position (with the complex path gains as
// nuisance parameters), its CRLB, the transmit-power objective and the
// linearized penalty surrogate used by the alternating optimizer.
#pragma once

#include "netisac/scene.hpp"

namespace netisac {

struct QosSpec {
  Vec gamma;         // linear SINR thresholds, one per CU
  double crlb_eps = 1.0;   // m^2
  double max_power = 0.0;  // Watts per BS

  static QosSpec uniform(int num_cu, double gamma_db, double crlb_eps, double max_power);
  void validate(int num_cu) const;
};

/// One iterate of the joint design. Indices are [s][k] throughout.
struct DecisionPoint {
  Mat a;   // S x K association in [0,1]
  Vec b;   // S, 1 = transmitting, 0 = receiving
  std::vector<std::vector<CMat>> W;   // beamforming matrices
  std::vector<std::vector<CMat>> Wt;  // product proxies (a * W at binary points)
  std::vector<CMat> R;                // sensing covariances
  Mat2 J = Mat2::Zero();

  static DecisionPoint zeros(int S, int K, int N);
  int num_bs() const { return static_cast<int>(b.size()); }
  int num_cu() const { return static_cast<int>(a.cols()); }
  bool is_binary(double tol = 0.0) const;
  /// Receiving BS at a binary point (the unique b_s == 0), -1 otherwise.
  int receiving_bs() const;
  /// Per-BS transmit covariance used by the FIM: sum_k Wt[s][k] + R[s].
  std::vector<CMat> covariances() const;
  /// Checks shapes, PSD-ness (min eig >= -1e-9 |.|) and symmetry of J.
  void validate(int N) const;
};

/// SINR of CU k at a binary point. Throws InvalidArgument otherwise.
double sinr(int k, const DecisionPoint& d, const ChannelSet& ch);

/// LHS - RHS of the linearized SINR constraint; >= 0 iff it holds.
double sinr_linear_residual(int k, const DecisionPoint& d, const ChannelSet& ch, double gamma);

struct FimBlocks {
  int rx = 0;
  Mat2 F_pp = Mat2::Zero();
  Mat F_pa;   // 2 x 2(S-1): columns [Re alpha_1..Re alpha_{S-1}, Im alpha_1..]
  Mat F_aa;   // 2(S-1) x 2(S-1) = I_2 (x) E scaled
  Vec E;      // diagonal of E (unscaled traces), S-1

  /// The assembled [F_pp F_pa; F_pa^T F_aa].
  Mat full() const;
};

/// FIM blocks for receiving BS `rx` given per-BS covariances (index by BS).
FimBlocks fim_blocks(int rx, const std::vector<CMat>& cov, const std::vector<SensingLink>& links,
                     int num_samples, double sigma2_r);
FimBlocks fim_blocks(int rx, const DecisionPoint& d, const std::vector<SensingLink>& links,
                     int num_samples, double sigma2_r);

/// Each FIM entry is Re tr(Q C_tx) summed over transmitters; this holds the
/// Q matrices for one (rx, tx) link so the FIM can be written as an affine
/// function of covariance variables.
struct FimLinkCoefficients {
  int tx = 0;
  int alpha_index = 0;            // position of this link in the nuisance vector
  std::array<std::array<CMat, 2>, 2> pp;  // F_pp(i, j)
  std::array<CMat, 2> pa_re;      // F_pa(i, Re alpha)
  std::array<CMat, 2> pa_im;      // F_pa(i, Im alpha)
  CMat aa;                        // F_aa diagonal entry (Re and Im alike)
};
std::vector<FimLinkCoefficients> fim_coefficients(const std::vector<SensingLink>& links,
                                                  int num_samples, double sigma2_r);

enum class CrlbStatus { Ok, Unlocalizable };

struct CrlbResult {
  CrlbStatus status = CrlbStatus::Unlocalizable;
  double value = 0.0;   // m^2, valid when status == Ok
  Mat2 schur = Mat2::Zero();  // F_pp - F_pa F_aa^+ F_pa^T
  bool ok() const { return status == CrlbStatus::Ok; }
};

/// tr((F_pp - F_pa F_aa^-1 F_pa^T)^-1). Links that carry no energy (E_ii = 0)
/// also have zero coupling and are dropped; a singular remainder or a
/// non-positive-definite Schur complement yields Unlocalizable.
CrlbResult crlb(const FimBlocks& f);

/// Sum of tr(Wt) plus b-weighted tr(R).
double objective_f(const DecisionPoint& d);
/// sum(a - a^2) + sum(b - b^2).
double binary_penalty(const DecisionPoint& d);
/// Linearized penalty surrogate around d_prev (constant terms included).
double surrogate_fbar(const DecisionPoint& d, const DecisionPoint& d_prev, double mu);

/// Minimum eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMat& m);

}  // namespace netisac
