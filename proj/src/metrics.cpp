// SPDX-License-Identifier: Apache-2.0
#include "netisac/metrics.hpp"

namespace netisac {

QosSpec QosSpec::uniform(int num_cu, double gamma_db, double crlb_eps, double max_power) {
  QosSpec q;
  q.gamma = Vec::Constant(num_cu, db_to_linear(gamma_db));
  q.crlb_eps = crlb_eps;
  q.max_power = max_power;
  return q;
}

void QosSpec::validate(int num_cu) const {
  if (gamma.size() != num_cu) throw InvalidArgument("qos: one SINR threshold per CU required");
  for (int k = 0; k < num_cu; ++k)
    if (!(gamma(k) > 0.0)) throw InvalidArgument("qos: SINR thresholds must be positive");
  if (!(crlb_eps > 0.0)) throw InvalidArgument("qos: crlb_eps must be positive");
  if (!(max_power > 0.0)) throw InvalidArgument("qos: max_power must be positive");
}

DecisionPoint DecisionPoint::zeros(int S, int K, int N) {
  DecisionPoint d;
  d.a = Mat::Zero(S, K);
  d.b = Vec::Ones(S);
  d.W.assign(S, std::vector<CMat>(K, CMat::Zero(N, N)));
  d.Wt = d.W;
  d.R.assign(S, CMat::Zero(N, N));
  return d;
}

bool DecisionPoint::is_binary(double tol) const {
  auto near01 = [tol](double x) { return std::abs(x) <= tol || std::abs(x - 1.0) <= tol; };
  for (int i = 0; i < a.size(); ++i)
    if (!near01(a.data()[i])) return false;
  for (int i = 0; i < b.size(); ++i)
    if (!near01(b(i))) return false;
  return true;
}

int DecisionPoint::receiving_bs() const {
  int rx = -1;
  for (int s = 0; s < b.size(); ++s) {
    if (b(s) == 0.0) {
      if (rx >= 0) return -1;
      rx = s;
    } else if (b(s) != 1.0) {
      return -1;
    }
  }
  return rx;
}

std::vector<CMat> DecisionPoint::covariances() const {
  std::vector<CMat> cov;
  for (int s = 0; s < num_bs(); ++s) {
    CMat c = R[s];
    for (const auto& w : Wt[s]) c += w;
    cov.push_back(std::move(c));
  }
  return cov;
}

double min_eigenvalue(const CMat& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void DecisionPoint::validate(int N) const {
  const int S = num_bs();
  const int K = num_cu();
  if (a.rows() != S) throw InvalidArgument("decision point: a must be S x K");
  auto check_psd = [N](const CMat& m, const std::string& what) {
    if (m.rows() != N || m.cols() != N) throw InvalidArgument(what + ": wrong dimension");
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > 1e-9 * scale) throw InvalidArgument(what + ": not Hermitian");
    if (min_eigenvalue(m) < -1e-9 * m.norm()) throw InvalidArgument(what + ": not PSD");
  };
  if (static_cast<int>(W.size()) != S || static_cast<int>(Wt.size()) != S ||
      static_cast<int>(R.size()) != S)
    throw InvalidArgument("decision point: per-BS containers must have S entries");
  for (int s = 0; s < S; ++s) {
    if (static_cast<int>(W[s].size()) != K || static_cast<int>(Wt[s].size()) != K)
      throw InvalidArgument("decision point: per-CU containers must have K entries");
    for (int k = 0; k < K; ++k) {
      check_psd(W[s][k], "W[" + std::to_string(s) + "][" + std::to_string(k) + "]");
      check_psd(Wt[s][k], "Wt[" + std::to_string(s) + "][" + std::to_string(k) + "]");
    }
    check_psd(R[s], "R[" + std::to_string(s) + "]");
  }
  if (std::abs(J(0, 1) - J(1, 0)) > 1e-12 * std::max(1.0, J.norm()))
    throw InvalidArgument("decision point: J must be symmetric");
}

namespace {
double quad(const CVec& h, const CMat& m) { return (h.adjoint() * m * h)(0).real(); }
}  // namespace

double sinr(int k, const DecisionPoint& d, const ChannelSet& ch) {
  if (!d.is_binary()) throw InvalidArgument("sinr: decision point is not binary");
  const int S = d.num_bs();
  const int K = d.num_cu();
  double signal = 0.0;
  double interference = 0.0;
  for (int s = 0; s < S; ++s) {
    const CVec& h = ch.h[s][k];
    for (int kk = 0; kk < K; ++kk) {
      if (d.a(s, kk) == 0.0) continue;
      const double p = quad(h, d.W[s][kk]);
      (kk == k ? signal : interference) += p;
    }
    if (d.b(s) != 0.0) interference += quad(h, d.R[s]);
  }
  return signal / (interference + ch.sigma2_c(k));
}

double sinr_linear_residual(int k, const DecisionPoint& d, const ChannelSet& ch, double gamma) {
  const int S = d.num_bs();
  const int K = d.num_cu();
  double lhs = 0.0;
  for (int s = 0; s < S; ++s) {
    const CVec& h = ch.h[s][k];
    lhs += quad(h, d.Wt[s][k]) / gamma;
    lhs -= d.b(s) * quad(h, d.R[s]);
    for (int kk = 0; kk < K; ++kk)
      if (kk != k) lhs -= quad(h, d.Wt[s][kk]);
  }
  return lhs - ch.sigma2_c(k);
}

Mat FimBlocks::full() const {
  const int n = 2 + static_cast<int>(F_aa.rows());
  Mat f(n, n);
  f.topLeftCorner(2, 2) = F_pp;
  f.topRightCorner(2, n - 2) = F_pa;
  f.bottomLeftCorner(n - 2, 2) = F_pa.transpose();
  f.bottomRightCorner(n - 2, n - 2) = F_aa;
  return f;
}

FimBlocks fim_blocks(int rx, const std::vector<CMat>& cov, const std::vector<SensingLink>& links,
                     int num_samples, double sigma2_r) {
  if (links.empty()) throw InvalidArgument("fim_blocks: empty link list");
  const int M = static_cast<int>(links.size());
  const double kappa = 2.0 * num_samples / sigma2_r;
  FimBlocks f;
  f.rx = rx;
  f.F_pa = Mat::Zero(2, 2 * M);
  f.E = Vec::Zero(M);
  for (int l = 0; l < M; ++l) {
    const SensingLink& link = links[l];
    if (link.rx != rx) throw InvalidArgument("fim_blocks: link does not terminate at rx");
    const CMat& C = cov.at(link.tx);
    const double a2 = std::norm(link.alpha);
    std::array<CMat, 2> GtC{link.Gtilde[0] * C, link.Gtilde[1] * C};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        f.F_pp(i, j) += kappa * a2 * (GtC[j] * link.Gtilde[i].adjoint()).trace().real();
    const CMat GC = link.G * C;
    for (int i = 0; i < 2; ++i) {
      const cd D = std::conj(link.alpha) * (GC * link.Gtilde[i].adjoint()).trace();
      f.F_pa(i, l) = kappa * D.real();
      f.F_pa(i, M + l) = kappa * (cd(0.0, 1.0) * D).real();
    }
    f.E(l) = (GC * link.G.adjoint()).trace().real();
  }
  Vec diag(2 * M);
  diag << f.E, f.E;
  f.F_aa = kappa * diag.asDiagonal();
  return f;
}

FimBlocks fim_blocks(int rx, const DecisionPoint& d, const std::vector<SensingLink>& links,
                     int num_samples, double sigma2_r) {
  return fim_blocks(rx, d.covariances(), links, num_samples, sigma2_r);
}

std::vector<FimLinkCoefficients> fim_coefficients(const std::vector<SensingLink>& links,
                                                  int num_samples, double sigma2_r) {
  const double kappa = 2.0 * num_samples / sigma2_r;
  std::vector<FimLinkCoefficients> out;
  for (std::size_t l = 0; l < links.size(); ++l) {
    const SensingLink& link = links[l];
    FimLinkCoefficients c;
    c.tx = link.tx;
    c.alpha_index = static_cast<int>(l);
    const double a2 = std::norm(link.alpha);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        c.pp[i][j] = (kappa * a2) * (link.Gtilde[i].adjoint() * link.Gtilde[j]);
    for (int i = 0; i < 2; ++i) {
      const CMat q = (kappa * std::conj(link.alpha)) * (link.Gtilde[i].adjoint() * link.G);
      c.pa_re[i] = q;
      c.pa_im[i] = cd(0.0, 1.0) * q;
    }
    c.aa = kappa * (link.G.adjoint() * link.G);
    out.push_back(std::move(c));
  }
  return out;
}

CrlbResult crlb(const FimBlocks& f) {
  CrlbResult r;
  const int M = static_cast<int>(f.E.size());
  const double emax = M > 0 ? f.E.maxCoeff() : 0.0;
  std::vector<int> keep;
  for (int l = 0; l < M; ++l)
    if (f.E(l) > 1e-14 * emax && f.E(l) > 0.0) keep.push_back(l);
  if (keep.empty()) return r;

  Mat2 schur = f.F_pp;
  for (int l : keep) {
    const double faa = f.F_aa(l, l);  // Re and Im share the same diagonal
    const Vec2 re = f.F_pa.col(l);
    const Vec2 im = f.F_pa.col(M + l);
    schur -= (re * re.transpose() + im * im.transpose()) / faa;
  }
  schur = 0.5 * (schur + schur.transpose());
  r.schur = schur;
  Eigen::SelfAdjointEigenSolver<Mat2> es(schur);
  const double lmax = std::abs(f.F_pp.trace());
  if (!(es.eigenvalues()(0) > 1e-12 * lmax)) return r;
  r.status = CrlbStatus::Ok;
  r.value = schur.inverse().trace();
  return r;
}

double objective_f(const DecisionPoint& d) {
  double f = 0.0;
  for (int s = 0; s < d.num_bs(); ++s) {
    for (const auto& w : d.Wt[s]) f += w.trace().real();
    f += d.b(s) * d.R[s].trace().real();
  }
  return f;
}

double binary_penalty(const DecisionPoint& d) {
  double p = (d.a.array() - d.a.array().square()).sum();
  p += (d.b.array() - d.b.array().square()).sum();
  return p;
}

double surrogate_fbar(const DecisionPoint& d, const DecisionPoint& d_prev, double mu) {
  double pen = 0.0;
  for (int i = 0; i < d.a.size(); ++i) {
    const double at = d_prev.a.data()[i];
    pen += (1.0 - 2.0 * at) * d.a.data()[i] + at * at;
  }
  for (int s = 0; s < d.b.size(); ++s) {
    const double bt = d_prev.b(s);
    pen += (1.0 - 2.0 * bt) * d.b(s) + bt * bt;
  }
  return objective_f(d) + mu * pen;
}

}  // namespace netisac
