// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <cmath>
#include <random>

namespace oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kC = 299792458.0;

double angle_from(const Vec2& bs, const Vec2& p) { return std::atan2(p.x() - bs.x(), p.y() - bs.y()); }

CMat gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMat z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) z(i, j) = cd(g(rng), g(rng));
  return z;
}

// alpha-free echo of one waveform block at target position p.
CMat echo(const EchoSetup& e, const Vec2& p, const CMat& X, double tau0) {
  const int n = static_cast<int>(X.rows());
  const CVec ar = steering(angle_from(e.rx, p), n);
  const CVec at = steering(angle_from(e.tx, p), n);
  const double tau = ((p - e.rx).norm() + (p - e.tx).norm()) * e.bandwidth_hz / kC;
  return (ar * (at.adjoint() * X)) * std::exp(-(tau - tau0));
}

}  // namespace

CVec steering(double theta, int n) {
  CVec a(n);
  for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, -kPi * i * std::sin(theta));
  return a;
}

CMat psd_sqrt(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  const Vec l = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * l.asDiagonal() * es.eigenvectors().adjoint();
}

CMat random_psd(std::uint64_t seed, int n, int rank, double trace) {
  std::mt19937_64 rng(seed);
  const CMat v = gaussian(rng, n, rank);
  const CMat m = v * v.adjoint();
  return m * (trace / m.trace().real());
}

Mat fim_monte_carlo(const EchoSetup& e, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = static_cast<int>(e.C.rows());
  const CMat Cs = psd_sqrt(e.C);
  const double tau0 = ((e.target - e.rx).norm() + (e.target - e.tx).norm()) * e.bandwidth_hz / kC;
  const double h = 1e-4;
  Mat F = Mat::Zero(4, 4);
  for (int d = 0; d < draws; ++d) {
    const CMat X = Cs * gaussian(rng, n, e.L);
    // Columns: d u / d p_x, d u / d p_y, d u / d Re alpha, d u / d Im alpha.
    CMat D(n * e.L, 4);
    for (int i = 0; i < 2; ++i) {
      Vec2 s = Vec2::Zero();
      s(i) = h;
      const CMat du = e.alpha * (echo(e, e.target + s, X, tau0) - echo(e, e.target - s, X, tau0)) / (2 * h);
      D.col(i) = du.reshaped();
    }
    const CMat u = echo(e, e.target, X, tau0);
    D.col(2) = u.reshaped();
    D.col(3) = cd(0.0, 1.0) * u.reshaped();
    F += (2.0 / e.sigma2) * (D.adjoint() * D).real();
  }
  return F / draws;
}

double crlb_pinv(const Mat& full_fim) {
  // Diagonal equilibration first; the raw FIM spans many decades.
  Vec d = full_fim.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = d(i) > 0.0 ? 1.0 / d(i) : 1.0;
  const Mat scaled = d.asDiagonal() * full_fim * d.asDiagonal();
  const Mat inv = d.asDiagonal() * scaled.completeOrthogonalDecomposition().pseudoInverse() * d.asDiagonal();
  return inv(0, 0) + inv(1, 1);
}

double sinr_direct(int k, const std::vector<std::vector<CVec>>& h, const Mat& a, const Vec& b,
                   const std::vector<std::vector<CMat>>& W, const std::vector<CMat>& R,
                   double noise) {
  double sig = 0.0, intf = 0.0;
  for (std::size_t s = 0; s < h.size(); ++s) {
    const CVec& g = h[s][k];
    for (int j = 0; j < a.cols(); ++j)
      if (a(s, j) > 0.5) (j == k ? sig : intf) += std::real(g.dot(W[s][j] * g));
    if (b(s) > 0.5) intf += std::real(g.dot(R[s] * g));
  }
  return sig / (intf + noise);
}

double sinr_monte_carlo(int k, const std::vector<std::vector<CVec>>& h, const Mat& a, const Vec& b,
                        const std::vector<std::vector<CMat>>& W, const std::vector<CMat>& R,
                        double noise, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int S = static_cast<int>(h.size());
  const int K = static_cast<int>(a.cols());
  const int n = static_cast<int>(h[0][0].size());
  // Received samples split into the desired stream and everything else.
  CVec desired = CVec::Zero(draws);
  CVec rest = std::sqrt(noise) * gaussian(rng, draws, 1).col(0);
  for (int s = 0; s < S; ++s) {
    const CVec& g = h[s][k];
    for (int j = 0; j < K; ++j) {
      if (a(s, j) < 0.5) continue;
      const CMat x = psd_sqrt(W[s][j]) * gaussian(rng, n, draws);  // transmitted, covariance W
      (j == k ? desired : rest) += (g.adjoint() * x).transpose();
    }
    if (b(s) > 0.5) rest += (g.adjoint() * (psd_sqrt(R[s]) * gaussian(rng, n, draws))).transpose();
  }
  return desired.squaredNorm() / rest.squaredNorm();
}

}  // namespace oracle
