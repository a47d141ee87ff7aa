// SPDX-License-Identifier: Apache-2.0
#include "netisac/conic/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

namespace netisac::conic {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Inaccurate: return "Inaccurate";
    case SolveStatus::SolverError: return "SolverError";
  }
  return "?";
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Entry {
  int p, q;  // p <= q
  double v;
};

struct SdpBlock {
  int n = 0;
  Mat F0;
  std::vector<int> vars;
  std::vector<std::vector<Entry>> F;  // parallel to vars
};

struct Row {
  std::vector<std::pair<int, double>> t;
  double c = 0.0;
};

// Presolved standard form:  min c'y + c_const
//   s.t. F0_b + sum y_i F_i^b >= 0 (PSD),  A y + a0 >= 0,  E y = e.
struct Standard {
  int m = 0;
  Vec c;
  double c_const = 0.0;
  std::vector<SdpBlock> blocks;
  SpMat A;
  Vec a0;
  Mat E;
  Vec e;
  std::vector<int> col;     // original var -> reduced index or -1
  Vec fixed;                // values of eliminated variables
  bool infeasible = false;
  bool unbounded = false;
  std::string message;
};

class Presolver {
 public:
  explicit Presolver(const ConicProgram& p) : prog_(p) {}

  Standard run() {
    const int n = prog_.num_variables();
    const auto& vars = prog_.variables();
    is_fixed_.assign(n, false);
    out_.fixed = Vec::Zero(n);
    for (int i = 0; i < n; ++i)
      if (vars[i].lower == vars[i].upper) {
        is_fixed_[i] = true;
        out_.fixed(i) = vars[i].lower;
      }

    std::vector<Row> lp;
    std::vector<Row> eq;
    for (int i = 0; i < n; ++i) {
      if (is_fixed_[i]) continue;
      if (vars[i].lower > -kInf) lp.push_back({{{i, 1.0}}, -vars[i].lower});
      if (vars[i].upper < kInf) lp.push_back({{{i, -1.0}}, vars[i].upper});
    }
    for (const auto& lc : prog_.linear_constraints()) {
      Row r = map(lc.expr);
      if (r.t.empty()) {
        const double tol = 1e-9 * std::max(1.0, std::abs(lc.expr.constant()));
        const bool ok = lc.sense == Sense::GreaterEq ? r.c >= -tol
                        : lc.sense == Sense::LessEq  ? r.c <= tol
                                                     : std::abs(r.c) <= tol;
        if (!ok) return fail_infeasible("constant constraint '" + lc.tag + "' violated");
        continue;
      }
      if (lc.sense == Sense::Equal) {
        eq.push_back(std::move(r));
      } else {
        if (lc.sense == Sense::LessEq) negate(r);
        lp.push_back(std::move(r));
      }
    }
    for (const auto& lmi : prog_.lmi_constraints()) {
      if (!add_lmi(lmi, lp)) return out_;
    }

    // Reduced variable indices.
    std::vector<char> used(n, 0);
    auto mark = [&used](const Row& r) {
      for (const auto& [v, c] : r.t) used[v] = 1;
    };
    for (const auto& r : lp) mark(r);
    for (const auto& r : eq) mark(r);
    for (const auto& b : raw_blocks_)
      for (const auto& [v, ents] : b.second) used[v] = 1;
    LinExpr obj = prog_.objective();
    obj.compress();
    out_.col.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      if (is_fixed_[i] || used[i]) continue;
      // Free of every constraint: only bounded if it does not move the objective.
      for (const auto& t : obj.terms())
        if (t.var == i) {
          out_.unbounded = true;
          out_.message = "variable '" + vars[i].name + "' is unconstrained but has a cost";
          return out_;
        }
    }
    int m = 0;
    for (int i = 0; i < n; ++i)
      if (!is_fixed_[i] && used[i]) out_.col[i] = m++;
    out_.m = m;

    out_.c = Vec::Zero(m);
    out_.c_const = obj.constant();
    for (const auto& t : obj.terms()) {
      if (out_.col[t.var] >= 0)
        out_.c(out_.col[t.var]) += t.coef;
      else
        out_.c_const += t.coef * out_.fixed(t.var);
    }

    // LP rows, normalized by their largest coefficient.
    std::vector<Eigen::Triplet<double>> trip;
    out_.a0.resize(static_cast<int>(lp.size()));
    for (std::size_t r = 0; r < lp.size(); ++r) {
      double s = 0.0;
      for (const auto& [v, c] : lp[r].t) s = std::max(s, std::abs(c));
      for (const auto& [v, c] : lp[r].t) trip.emplace_back(static_cast<int>(r), out_.col[v], c / s);
      out_.a0(static_cast<int>(r)) = lp[r].c / s;
    }
    out_.A.resize(static_cast<int>(lp.size()), m);
    out_.A.setFromTriplets(trip.begin(), trip.end());

    // PSD blocks, each scaled by its largest coefficient.
    for (auto& [blk, ents] : raw_blocks_) {
      SdpBlock b;
      b.n = static_cast<int>(blk.rows());
      double s = 0.0;
      for (const auto& [v, list] : ents)
        for (const auto& e : list) s = std::max(s, std::abs(e.v));
      if (s == 0.0) s = 1.0;
      b.F0 = blk / s;
      for (const auto& [v, list] : ents) {
        b.vars.push_back(out_.col[v]);
        std::vector<Entry> l = list;
        for (auto& e : l) e.v /= s;
        b.F.push_back(std::move(l));
      }
      out_.blocks.push_back(std::move(b));
    }

    if (!build_equalities(eq)) return out_;
    return out_;
  }

 private:
  Row map(const LinExpr& e) const {
    LinExpr c = e;
    c.compress();
    Row r;
    r.c = c.constant();
    for (const auto& t : c.terms()) {
      if (is_fixed_[t.var])
        r.c += t.coef * out_.fixed(t.var);
      else
        r.t.emplace_back(t.var, t.coef);
    }
    return r;
  }

  static void negate(Row& r) {
    for (auto& [v, c] : r.t) c = -c;
    r.c = -r.c;
  }

  Standard fail_infeasible(const std::string& msg) {
    out_.infeasible = true;
    out_.message = msg;
    return out_;
  }

  bool add_lmi(const LmiConstraint& lmi, std::vector<Row>& lp) {
    const int n = lmi.matrix.dim();
    std::vector<std::vector<Row>> rows(n, std::vector<Row>(n));
    std::vector<char> keep(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Row r = map(lmi.matrix(i, j));
        if (!r.t.empty() || r.c != 0.0) keep[i] = keep[j] = 1;
        rows[i][j] = std::move(r);
      }
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (keep[i]) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    if (k == 0) return true;
    if (k == 1) {
      lp.push_back(rows[idx[0]][idx[0]]);
      if (lp.back().t.empty()) {
        if (lp.back().c < -1e-12) {
          fail_infeasible("constant LMI '" + lmi.tag + "' is not PSD");
          return false;
        }
        lp.pop_back();
      }
      return true;
    }
    // Symmetric diagonal equilibration D M D from the diagonal magnitudes.
    Vec d(k);
    for (int a = 0; a < k; ++a) {
      const Row& r = rows[idx[a]][idx[a]];
      double mx = std::abs(r.c);
      for (const auto& [v, c] : r.t) mx = std::max(mx, std::abs(c));
      d(a) = mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0;
    }
    Mat F0 = Mat::Zero(k, k);
    std::map<int, std::vector<Entry>> ents;
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) {
        const Row& r = rows[idx[a]][idx[b]];
        const double w = d(a) * d(b);
        F0(a, b) = F0(b, a) = w * r.c;
        for (const auto& [v, c] : r.t) ents[v].push_back({a, b, w * c});
      }
    if (ents.empty()) {
      Eigen::SelfAdjointEigenSolver<Mat> es(F0, Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) < -1e-12 * std::max(1.0, F0.norm())) {
        fail_infeasible("constant LMI '" + lmi.tag + "' is not PSD");
        return false;
      }
      return true;
    }
    raw_blocks_.emplace_back(std::move(F0), std::move(ents));
    return true;
  }

  bool build_equalities(const std::vector<Row>& eq) {
    const int p = static_cast<int>(eq.size());
    const int m = out_.m;
    Mat E = Mat::Zero(p, m);
    Vec e(p);
    for (int r = 0; r < p; ++r) {
      double s = 0.0;
      for (const auto& [v, c] : eq[r].t) s = std::max(s, std::abs(c));
      for (const auto& [v, c] : eq[r].t) E(r, out_.col[v]) += c / s;
      e(r) = -eq[r].c / s;
    }
    if (p == 0) {
      out_.E = E;
      out_.e = e;
      return true;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(E.transpose());
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    Mat Eaug(m + 1, p);
    Eaug << E.transpose(), e.transpose();
    Eigen::ColPivHouseholderQR<Mat> qra(Eaug);
    qra.setThreshold(1e-10);
    if (qra.rank() > rank) {
      fail_infeasible("inconsistent equality constraints");
      return false;
    }
    std::vector<int> sel;
    for (int i = 0; i < rank; ++i) sel.push_back(qr.colsPermutation().indices()(i));
    std::sort(sel.begin(), sel.end());
    out_.E.resize(rank, m);
    out_.e.resize(rank);
    for (int i = 0; i < rank; ++i) {
      out_.E.row(i) = E.row(sel[i]);
      out_.e(i) = e(sel[i]);
    }
    return true;
  }

  const ConicProgram& prog_;
  std::vector<bool> is_fixed_;
  std::vector<std::pair<Mat, std::map<int, std::vector<Entry>>>> raw_blocks_;
  Standard out_;
};

// --- block algebra ---------------------------------------------------------

Mat apply_lin(const SdpBlock& b, const Vec& y) {
  Mat Z = Mat::Zero(b.n, b.n);
  for (std::size_t i = 0; i < b.vars.size(); ++i) {
    const double yi = y(b.vars[i]);
    if (yi == 0.0) continue;
    for (const auto& e : b.F[i]) {
      Z(e.p, e.q) += yi * e.v;
      if (e.p != e.q) Z(e.q, e.p) += yi * e.v;
    }
  }
  return Z;
}

void add_adjoint(const SdpBlock& b, const Mat& T, Vec& out) {
  for (std::size_t i = 0; i < b.vars.size(); ++i) {
    double s = 0.0;
    for (const auto& e : b.F[i]) s += e.v * (e.p == e.q ? T(e.p, e.p) : T(e.p, e.q) + T(e.q, e.p));
    out(b.vars[i]) += s;
  }
}

bool chol(const Mat& A, Mat& L) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  return L.allFinite();
}

// Largest alpha with X + alpha dX PSD, given X = L L'.
double max_step(const Mat& L, const Mat& dX) {
  const Mat T1 = L.triangularView<Eigen::Lower>().solve(dX);
  Mat T = L.triangularView<Eigen::Lower>().solve(T1.transpose());
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(T, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double max_step_lp(const Vec& x, const Vec& dx) {
  double a = kInf;
  for (int i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

struct Iterate {
  Vec y, lam;
  std::vector<Mat> X, Z;
  Vec x, z;
};

struct Direction {
  Vec dy, dlam;
  std::vector<Mat> dX, dZ;
  Vec dx, dz;
};

class Ipm {
 public:
  Ipm(const Standard& s, const SolverOptions& o) : s_(s), o_(o) {}

  SolveOutcome run() {
    SolveOutcome out;
    init();
    const int nb = static_cast<int>(s_.blocks.size());
    double ntot = static_cast<double>(s_.A.rows());
    for (const auto& b : s_.blocks) ntot += b.n;
    if (ntot == 0) {
      out.status = SolveStatus::SolverError;
      out.message = "no conic constraints";
      return out;
    }

    double normF0 = s_.a0.squaredNorm();
    for (const auto& b : s_.blocks) normF0 += b.F0.squaredNorm();
    normF0 = std::sqrt(normF0);
    const double normc = s_.c.norm();
    const double norme = s_.e.norm();

    Iterate best = it_;
    double best_measure = kInf;
    double best_pinf = 0, best_dinf = 0, best_gap = 0;
    int iter = 0;
    SolveStatus status = SolveStatus::SolverError;
    std::string msg = "iteration limit";

    for (; iter <= o_.max_iter; ++iter) {
      residuals();
      const double pobj = s_.c.dot(it_.y);
      double dobj = -s_.a0.dot(it_.x) + s_.e.dot(it_.lam);
      double gap = it_.x.dot(it_.z);
      for (int b = 0; b < nb; ++b) {
        dobj -= (s_.blocks[b].F0.cwiseProduct(it_.X[b])).sum();
        gap += (it_.X[b].cwiseProduct(it_.Z[b])).sum();
      }
      double rd_norm = rd_lp_.squaredNorm();
      for (const auto& r : rd_) rd_norm += r.squaredNorm();
      rd_norm = std::sqrt(rd_norm);
      const double pinf = std::max(rd_norm / (1.0 + normF0), re_.norm() / (1.0 + norme));
      const double dinf = rp_.norm() / (1.0 + normc);
      const double rgap = std::abs(gap) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double measure = std::max({pinf, dinf, rgap});
      if (o_.verbose)
        std::fprintf(stderr, "ipm %3d pobj %+.8e dobj %+.8e pinf %.2e dinf %.2e gap %.2e\n", iter,
                     pobj, dobj, pinf, dinf, rgap);
      if (measure < best_measure) {
        best_measure = measure;
        best = it_;
        best_pinf = pinf;
        best_dinf = dinf;
        best_gap = rgap;
      }
      if (measure <= o_.tol) {
        status = SolveStatus::Optimal;
        msg.clear();
        break;
      }
      // Dual ray: A*(X) + E'lam ~ 0 with positive dual objective proves
      // primal infeasibility.
      if (dobj > 0.0) {
        const Vec aty = s_.c - rp_;
        if (aty.norm() <= 1e-8 * dobj && pinf > o_.tol) {
          status = SolveStatus::Infeasible;
          msg = "primal infeasibility certificate";
          break;
        }
      }
      if (iter == o_.max_iter) break;

      if (!factor()) {
        msg = "numerical breakdown (factorization)";
        break;
      }
      const double mu = gap / ntot;
      Direction pred;
      if (!direction(0.0, nullptr, pred)) {
        msg = "numerical breakdown (Schur system)";
        break;
      }
      double ap = 0, ad = 0;
      steps(pred, ap, ad);
      ap = std::min(1.0, ap);
      ad = std::min(1.0, ad);
      double gap_aff = (it_.x + ap * pred.dx).dot(it_.z + ad * pred.dz);
      for (int b = 0; b < nb; ++b)
        gap_aff += ((it_.X[b] + ap * pred.dX[b]).cwiseProduct(it_.Z[b] + ad * pred.dZ[b])).sum();
      double sigma = std::pow(std::max(0.0, gap_aff) / gap, 3.0);
      sigma = std::clamp(sigma, 0.0, 1.0);
      Direction corr;
      if (!direction(sigma * mu, &pred, corr)) {
        msg = "numerical breakdown (Schur system)";
        break;
      }
      steps(corr, ap, ad);
      const double gamma = 0.9 + 0.09 * std::min({1.0, ap, ad});
      ap = std::min(1.0, gamma * ap);
      ad = std::min(1.0, gamma * ad);
      if (ap < 1e-10 && ad < 1e-10) {
        msg = "stalled";
        break;
      }
      it_.y += ad * corr.dy;
      it_.z += ad * corr.dz;
      it_.lam += ap * corr.dlam;
      it_.x += ap * corr.dx;
      for (int b = 0; b < nb; ++b) {
        it_.Z[b] += ad * corr.dZ[b];
        it_.X[b] += ap * corr.dX[b];
      }
    }

    out.stats.iterations = iter;
    out.stats.num_variables = s_.m;
    if (status == SolveStatus::Infeasible) {
      out.status = status;
      out.message = msg;
      return out;
    }
    if (status != SolveStatus::Optimal) {
      status = best_measure <= o_.inaccurate_tol ? SolveStatus::Inaccurate : SolveStatus::SolverError;
      it_ = best;
    }
    out.status = status;
    out.message = msg;
    out.stats.primal_residual = best_pinf;
    out.stats.dual_residual = best_dinf;
    out.stats.gap = best_gap;
    y_out_ = it_.y;
    return out;
  }

  const Vec& y() const { return y_out_; }

 private:
  void init() {
    const int m = s_.m;
    double max_c = 0.0;
    double max_F = 0.0;
    double max_F0 = s_.a0.size() ? s_.a0.cwiseAbs().maxCoeff() : 0.0;
    int nmax = 1;
    Vec normFi = Vec::Zero(m);
    for (int r = 0; r < s_.A.outerSize(); ++r)
      for (SpMat::InnerIterator itr(s_.A, r); itr; ++itr) normFi(itr.col()) += itr.value() * itr.value();
    for (const auto& b : s_.blocks) {
      nmax = std::max(nmax, b.n);
      max_F0 = std::max(max_F0, b.F0.norm());
      for (std::size_t i = 0; i < b.vars.size(); ++i)
        for (const auto& e : b.F[i]) normFi(b.vars[i]) += (e.p == e.q ? 1.0 : 2.0) * e.v * e.v;
    }
    normFi = normFi.cwiseSqrt();
    for (int i = 0; i < m; ++i) {
      max_c = std::max(max_c, (1.0 + std::abs(s_.c(i))) / (1.0 + normFi(i)));
      max_F = std::max(max_F, normFi(i));
    }
    const double xi = std::max({10.0, std::sqrt(static_cast<double>(nmax)), max_c});
    const double zeta = std::max({10.0, std::sqrt(static_cast<double>(nmax)), max_F0, max_F});
    it_.y = Vec::Zero(m);
    it_.lam = Vec::Zero(s_.E.rows());
    for (const auto& b : s_.blocks) {
      it_.X.push_back(xi * Mat::Identity(b.n, b.n));
      it_.Z.push_back(zeta * Mat::Identity(b.n, b.n));
    }
    it_.x = Vec::Constant(s_.A.rows(), xi);
    it_.z = Vec::Constant(s_.A.rows(), zeta);
  }

  void residuals() {
    const int nb = static_cast<int>(s_.blocks.size());
    Vec aty = Vec::Zero(s_.m);
    for (int b = 0; b < nb; ++b) add_adjoint(s_.blocks[b], it_.X[b], aty);
    aty += s_.A.transpose() * it_.x;
    if (s_.E.rows()) aty += s_.E.transpose() * it_.lam;
    rp_ = s_.c - aty;
    rd_.resize(nb);
    for (int b = 0; b < nb; ++b)
      rd_[b] = s_.blocks[b].F0 + apply_lin(s_.blocks[b], it_.y) - it_.Z[b];
    rd_lp_ = s_.A * it_.y + s_.a0 - it_.z;
    re_ = s_.e - s_.E * it_.y;
  }

  bool factor() {
    const int nb = static_cast<int>(s_.blocks.size());
    const int m = s_.m;
    Lx_.resize(nb);
    Zinv_.resize(nb);
    XrdZ_.resize(nb);
    Mat M = Mat::Zero(m, m);
    for (int b = 0; b < nb; ++b) {
      const SdpBlock& blk = s_.blocks[b];
      const int n = blk.n;
      Mat Lz0;
      if (!chol(it_.X[b], Lx_[b]) || !chol(it_.Z[b], Lz0)) return false;
      // Z^-1 = Lz Lz' with Lz = Lz0^{-T}
      Mat Linv = Lz0.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
      Mat Lz = Linv.transpose();
      Zinv_[b] = Lz * Lz.transpose();
      XrdZ_[b] = it_.X[b] * rd_[b] * Zinv_[b];
      const int mb = static_cast<int>(blk.vars.size());
      Mat H = Mat::Zero(n * n, mb);
      for (int i = 0; i < mb; ++i) {
        Eigen::Map<Mat> Hi(H.col(i).data(), n, n);
        for (const auto& e : blk.F[i]) {
          Hi.noalias() += e.v * Lz.row(e.p).transpose() * Lx_[b].row(e.q);
          if (e.p != e.q) Hi.noalias() += e.v * Lz.row(e.q).transpose() * Lx_[b].row(e.p);
        }
      }
      Mat Mb = Mat::Zero(mb, mb);
      Mb.selfadjointView<Eigen::Lower>().rankUpdate(H.transpose());
      for (int j = 0; j < mb; ++j)
        for (int i = j; i < mb; ++i) {
          const int r = blk.vars[i], c = blk.vars[j];
          M(r, c) += Mb(i, j);
          if (r != c) M(c, r) += Mb(i, j);
        }
    }
    if (s_.A.rows()) {
      // A few rows (SINR, power budget) are dense, so a sparse product fills in.
      const Vec d = it_.x.cwiseQuotient(it_.z).cwiseSqrt();
      Mat Ad = Mat(s_.A);
      Ad = d.asDiagonal() * Ad;
      M.selfadjointView<Eigen::Lower>().rankUpdate(Ad.transpose());
      M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    }
    M_ = M;
    double reg = 0.0;
    const double diag_max = m ? M.diagonal().cwiseAbs().maxCoeff() : 1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Mat Mr = M;
      if (reg > 0.0) Mr.diagonal().array() += reg;
      llt_.compute(Mr);
      if (llt_.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 * std::max(1.0, diag_max) : reg * 100.0;
      if (attempt == 7) return false;
    }
    if (s_.E.rows()) {
      MinvEt_ = llt_.solve(s_.E.transpose());
      const Mat S = s_.E * MinvEt_;
      const double smax = S.rows() ? S.diagonal().cwiseAbs().maxCoeff() : 1.0;
      double sreg = 0.0;
      for (int attempt = 0; attempt < 8; ++attempt) {
        Mat Sr = S;
        if (sreg > 0.0) Sr.diagonal().array() += sreg;
        lltE_.compute(Sr);
        if (lltE_.info() == Eigen::Success) break;
        sreg = sreg == 0.0 ? 1e-14 * std::max(1.0, smax) : sreg * 100.0;
        if (attempt == 7) return false;
      }
    }
    return true;
  }

  bool direction(double sigma_mu, const Direction* corr, Direction& d) {
    const int nb = static_cast<int>(s_.blocks.size());
    std::vector<Mat> T(nb);
    Vec g = Vec::Zero(s_.m);
    for (int b = 0; b < nb; ++b) {
      T[b] = sigma_mu * Zinv_[b] - it_.X[b] - XrdZ_[b];
      if (corr) T[b] -= corr->dX[b] * corr->dZ[b] * Zinv_[b];
      add_adjoint(s_.blocks[b], T[b], g);
    }
    Vec Tlp = (sigma_mu - (it_.x.array() * rd_lp_.array())).matrix().cwiseQuotient(it_.z) - it_.x;
    if (corr) Tlp -= corr->dx.cwiseProduct(corr->dz).cwiseQuotient(it_.z);
    if (s_.A.rows()) g += s_.A.transpose() * Tlp;
    g -= rp_;

    solve_normal(g, re_, d.dy, d.dlam);
    // Refinement against the unregularized system; late iterations are
    // badly conditioned.
    for (int pass = 0; pass < 2; ++pass) {
      Vec r1 = g - M_.selfadjointView<Eigen::Lower>() * d.dy;
      Vec r2 = Vec::Zero(0);
      if (s_.E.rows()) {
        r1 += s_.E.transpose() * d.dlam;
        r2 = re_ - s_.E * d.dy;
      }
      Vec ey, el;
      solve_normal(r1, r2, ey, el);
      d.dy += ey;
      if (s_.E.rows()) d.dlam += el;
    }
    if (!d.dy.allFinite()) return false;
    d.dX.resize(nb);
    d.dZ.resize(nb);
    for (int b = 0; b < nb; ++b) {
      const Mat Ady = apply_lin(s_.blocks[b], d.dy);
      d.dZ[b] = Ady + rd_[b];
      Mat dX = T[b] - it_.X[b] * Ady * Zinv_[b];
      d.dX[b] = 0.5 * (dX + dX.transpose());
    }
    const Vec Ady = s_.A * d.dy;
    d.dz = Ady + rd_lp_;
    d.dx = Tlp - it_.x.cwiseProduct(Ady).cwiseQuotient(it_.z);
    return true;
  }

  // M dy - E' dlam = g, E dy = e.
  void solve_normal(const Vec& g, const Vec& e, Vec& dy, Vec& dlam) const {
    const Vec Minvg = llt_.solve(g);
    if (s_.E.rows()) {
      dlam = lltE_.solve(e - s_.E * Minvg);
      dy = Minvg + MinvEt_ * dlam;
    } else {
      dlam = Vec::Zero(0);
      dy = Minvg;
    }
  }

  void steps(const Direction& d, double& ap, double& ad) {
    ap = max_step_lp(it_.x, d.dx);
    ad = max_step_lp(it_.z, d.dz);
    for (std::size_t b = 0; b < s_.blocks.size(); ++b) {
      ap = std::min(ap, max_step(Lx_[b], d.dX[b]));
      Mat Lz;
      if (chol(it_.Z[b], Lz)) ad = std::min(ad, max_step(Lz, d.dZ[b]));
      else ad = 0.0;
    }
  }

  const Standard& s_;
  const SolverOptions& o_;
  Iterate it_;
  Vec rp_, rd_lp_, re_;
  std::vector<Mat> rd_;
  std::vector<Mat> Lx_, Zinv_, XrdZ_;
  Mat M_;  // lower triangle of the normal matrix, unregularized
  Eigen::LLT<Mat> llt_;
  Eigen::LLT<Mat> lltE_;
  Mat MinvEt_;
  Vec y_out_;
};

}  // namespace

SolveOutcome solve(const ConicProgram& prog, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  prog.validate();
  Presolver pre(prog);
  Standard s = pre.run();
  SolveOutcome out;
  auto finish = [&](SolveOutcome& o) {
    o.stats.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
  };
  if (s.infeasible) {
    out.status = SolveStatus::Infeasible;
    out.message = s.message;
    return finish(out);
  }
  if (s.unbounded) {
    out.status = SolveStatus::SolverError;
    out.message = "unbounded: " + s.message;
    return finish(out);
  }
  Ipm ipm(s, opts);
  out = ipm.run();
  if (out.usable()) {
    const int n = prog.num_variables();
    out.x = Vec::Zero(n);
    for (int i = 0; i < n; ++i) out.x(i) = s.col[i] >= 0 ? ipm.y()(s.col[i]) : s.fixed(i);
    out.objective = prog.objective().evaluate(out.x);
  }
  return finish(out);
}

}  // namespace netisac::conic
