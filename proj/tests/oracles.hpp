// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for the tests. Nothing here calls into the library's
// metrics; geometry, steering vectors and the Fisher information are rebuilt
// from scratch.
#pragma once

#include <cstdint>
#include <vector>

#include "netisac/types.hpp"

namespace oracle {

using netisac::cd;
using netisac::CMat;
using netisac::CVec;
using netisac::Mat;
using netisac::Vec;
using netisac::Vec2;

CVec steering(double theta, int n);

/// One transmitter, one receiver, one target.
struct EchoSetup {
  Vec2 rx, tx, target;
  cd alpha;
  CMat C;               // transmit covariance
  int L = 256;
  double sigma2 = 1.0;
  double bandwidth_hz = 10e6;
};

/// Fisher information over [p_x, p_y, Re alpha, Im alpha] from the stacked
/// echo: finite-difference derivatives of the noiseless echo with respect to
/// the target position and Monte Carlo waveforms of covariance C, averaged
/// over `draws` independent blocks of L samples.
Mat fim_monte_carlo(const EchoSetup& e, int draws, std::uint64_t seed);

/// Position block of the pseudo-inverse of a full FIM, traced.
double crlb_pinv(const Mat& full_fim);

/// SINR of CU k from explicit channels, association and covariances.
/// h[s][k]; a(s,k) in {0,1}; W[s][k]; R[s]; b(s) = 1 for transmitters.
double sinr_direct(int k, const std::vector<std::vector<CVec>>& h, const Mat& a, const Vec& b,
                   const std::vector<std::vector<CMat>>& W, const std::vector<CMat>& R,
                   double noise);

/// Same quantity estimated from simulated symbols.
double sinr_monte_carlo(int k, const std::vector<std::vector<CVec>>& h, const Mat& a, const Vec& b,
                        const std::vector<std::vector<CMat>>& W, const std::vector<CMat>& R,
                        double noise, int draws, std::uint64_t seed);

/// Hermitian square root of a PSD matrix.
CMat psd_sqrt(const CMat& m);

/// Random PSD matrix of the given rank and trace.
CMat random_psd(std::uint64_t seed, int n, int rank, double trace);

}  // namespace oracle
