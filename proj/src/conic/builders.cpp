// SPDX-License-Identifier: Apache-2.0
#include "netisac/conic/builders.hpp"

#include <algorithm>

namespace netisac::conic {

namespace {

bool is_zero_term(const MatrixTerm& t) { return !t.is_var() && t.value.size() == 0; }

// Expressions of the form c + g*x with g = +-1 (a relaxed binary or its
// complement). Writes value v into x.
bool put_binary(const LinExpr& e, double v, Vec& x) {
  if (e.terms().size() != 1 || std::abs(e.terms()[0].coef) != 1.0) return false;
  x(e.terms()[0].var) = (v - e.constant()) / e.terms()[0].coef;
  return true;
}

// A [0,1] scalar written so that it is near zero at the incumbent value t:
// x itself when t < 1/2, else 1 - x. Keeps c'y small at the optimum, which
// the relative-gap test needs once mu multiplies these terms.
LinExpr relaxed_binary(ConicProgram& p, const std::string& name, double t) {
  const LinExpr z = LinExpr::variable(p.add_scalar(name, 0.0, 1.0));
  return t < 0.5 ? z : LinExpr(1.0) - z;
}

// mu * [ (1 - 2t)(x - t) + (t - t^2) ], the linearized penalty of one scalar.
LinExpr penalty_term(const LinExpr& x, double t, double mu) {
  LinExpr e = (mu * (1.0 - 2.0 * t)) * (x - LinExpr(t));
  e.add_constant(mu * (t - t * t));
  return e;
}

}  // namespace

LinExpr ProblemVars::re_trace(const ConicProgram& prog, const MatrixTerm& t, const CMat& Q) const {
  if (t.is_var()) return unit * prog.re_trace_product(*t.var, Q);
  if (t.value.size() == 0) return LinExpr();
  return LinExpr((Q * t.value).trace().real());
}

LinExpr ProblemVars::trace(const ConicProgram& prog, const MatrixTerm& t) const {
  if (t.is_var()) return unit * prog.trace(*t.var);
  if (t.value.size() == 0) return LinExpr();
  return LinExpr(t.value.trace().real());
}

DecisionPoint ProblemVars::extract(const Vec& x) const {
  DecisionPoint d = DecisionPoint::zeros(S, K, N);
  auto value = [&](const MatrixTerm& t) -> CMat {
    if (t.is_var()) return unit * herm_value(*t.var, x);
    if (t.value.size() == 0) return CMat::Zero(N, N);
    return t.value;
  };
  for (int s = 0; s < S; ++s) {
    d.b(s) = b[s].evaluate(x);
    for (int k = 0; k < K; ++k) {
      d.a(s, k) = a[s][k].evaluate(x);
      d.W[s][k] = value(W[s][k]);
      d.Wt[s][k] = value(Wt[s][k]);
    }
    d.R[s] = value(R[s]);
  }
  d.J = J.is_var() ? Mat2(sym_value(*J.var, x)) : J.value;
  return d;
}

Vec ProblemVars::encode(const DecisionPoint& d, int num_vars) const {
  Vec x = Vec::Zero(num_vars);
  auto put = [&](const MatrixTerm& t, const CMat& m) {
    if (t.is_var()) set_herm_value(*t.var, m / unit, x);
  };
  for (int s = 0; s < S; ++s) {
    put_binary(b[s], d.b(s), x);
    for (int k = 0; k < K; ++k) {
      put_binary(a[s][k], d.a(s, k), x);
      put(W[s][k], d.W[s][k]);
      put(Wt[s][k], d.Wt[s][k]);
    }
    put(R[s], d.R[s]);
  }
  if (J.is_var()) set_sym_value(*J.var, d.J, x);
  if (U) {
    Eigen::LLT<Mat> llt(d.J);
    if (llt.info() == Eigen::Success) set_sym_value(*U, Mat(d.J.inverse()), x);
  }
  return x;
}

Instance::Instance(const Scene& scene, const ChannelSet& ch, QosSpec qos)
    : scene_(&scene), ch_(&ch), qos_(std::move(qos)) {
  const int S = scene.num_bs();
  qos_.validate(scene.num_cu());
  if (ch.num_bs() != S || ch.num_cu() != scene.num_cu())
    throw InvalidArgument("instance: channel set does not match the scene");
  sense_scale_.resize(S);
  const int N = scene.num_antennas();
  for (int rx = 0; rx < S; ++rx) {
    links_.push_back(links_for_rx(scene, rx));
    coef_.push_back(fim_coefficients(links_.back(), scene.num_samples(), ch.sigma2_r(rx)));
    std::vector<CMat> cov(S, CMat::Identity(N, N) / static_cast<double>(N));
    const CrlbResult c = crlb(fim_blocks(rx, cov, links_.back(), scene.num_samples(), ch.sigma2_r(rx)));
    sense_scale_(rx) = c.ok() ? (S - 1) * c.value / qos_.crlb_eps : 1.0;
  }
}

void Instance::override_coefficients(int rx, std::vector<FimLinkCoefficients> coef) {
  if (rx < 0 || rx >= S() || coef.size() != coef_[rx].size())
    throw InvalidArgument("override_coefficients: shape mismatch");
  coef_[rx] = std::move(coef);
}

double Instance::power_scale(int rx) const {
  double comm = 0.0;
  for (int k = 0; k < K(); ++k) {
    double g = 0.0;
    for (int s = 0; s < S(); ++s)
      if (s != rx) g = std::max(g, ch_->gain(s, k));
    if (g > 0.0) comm += ch_->sigma2_c(k) * qos_.gamma(k) / g;
  }
  return std::max({comm, sense_scale_(rx), 1e-30});
}

LinExpr product(const LinExpr& x, const LinExpr& y, const char* what) {
  if (!x.is_constant() && !y.is_constant())
    throw InvalidArgument(std::string(what) + ": bilinear term (both factors variable)");
  if (x.is_constant()) return x.constant() * y;
  return y.constant() * x;
}

EpigraphHandles add_trace_inverse_epigraph(ConicProgram& prog, const MatrixVar& J, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("trace-inverse epigraph: eps must be positive");
  if (J.kind != MatrixKind::Symmetric || J.dim != 2)
    throw InvalidArgument("trace-inverse epigraph: J must be a 2x2 symmetric variable");
  EpigraphHandles h;
  h.U = prog.add_symmetric("U", 2, false);
  ExprMatrix m(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      m(i, j) = prog.entry(h.U, i, j);
      m(2 + i, 2 + j) = prog.entry(J, i, j);
    }
  m(0, 2) = LinExpr(1.0);
  m(1, 3) = LinExpr(1.0);
  m(2, 0) = LinExpr(1.0);
  m(3, 1) = LinExpr(1.0);
  h.constraints.push_back(prog.add_lmi(std::move(m), "crlb epigraph"));
  h.constraints.push_back(
      prog.add_linear(LinExpr(eps) - prog.trace(h.U), Sense::GreaterEq, "crlb trace"));
  h.constraints.push_back(prog.add_lmi(prog.sym_expr(J), "fim psd"));
  return h;
}

ExprMatrix fim_expression(const ConicProgram& prog, const Instance& inst, const ProblemVars& v,
                          int rx, const std::vector<std::vector<const MatrixTerm*>>& cov) {
  const auto& coef = inst.coefficients(rx);
  const int M = static_cast<int>(coef.size());
  ExprMatrix F(2 + 2 * M);
  for (int l = 0; l < M; ++l) {
    const FimLinkCoefficients& c = coef[l];
    for (const MatrixTerm* t : cov[c.tx]) {
      if (is_zero_term(*t)) continue;
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) F(i, j) += v.re_trace(prog, *t, c.pp[i][j]);
      for (int i = 0; i < 2; ++i) {
        F(i, 2 + l) += v.re_trace(prog, *t, c.pa_re[i]);
        F(i, 2 + M + l) += v.re_trace(prog, *t, c.pa_im[i]);
      }
      const LinExpr e = v.re_trace(prog, *t, c.aa);
      F(2 + l, 2 + l) += e;
      F(2 + M + l, 2 + M + l) += e;
    }
  }
  return F;
}

ConstraintHandle add_crlb_lmi(ConicProgram& prog, const Instance& inst, const ProblemVars& v) {
  const int S = v.S;
  std::vector<std::vector<const MatrixTerm*>> cov(S);
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < v.K; ++k) cov[s].push_back(&v.Wt[s][k]);
    cov[s].push_back(&v.R[s]);
  }
  const int D = 2 + 2 * (S - 1);
  ExprMatrix total(D);
  bool any = false;
  for (int s = 0; s < S; ++s) {
    const LinExpr w = LinExpr(1.0) - v.b[s];
    if (w.is_constant() && w.constant() == 0.0) continue;
    ExprMatrix Ms = fim_expression(prog, inst, v, s, cov);
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j) {
        if (v.J.is_var())
          Ms(i, j) -= prog.entry(*v.J.var, i, j);
        else
          Ms(i, j) -= LinExpr(v.J.value(i, j));
      }
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) total(i, j) += product(w, Ms(i, j), "CRLB LMI");
    any = true;
  }
  if (!any) throw InvalidArgument("CRLB LMI: every BS is transmitting (no receiver)");
  return prog.add_lmi(std::move(total), "crlb lmi");
}

std::vector<ConstraintHandle> add_sinr_constraints(ConicProgram& prog, const Instance& inst,
                                                   const ProblemVars& v) {
  const ChannelSet& ch = inst.channels();
  const QosSpec& q = inst.qos();
  std::vector<LinExpr> rows;
  for (int k = 0; k < v.K; ++k) {
    LinExpr e(-ch.sigma2_c(k));
    for (int s = 0; s < v.S; ++s) {
      const CMat H = ch.h[s][k] * ch.h[s][k].adjoint();
      e += (1.0 / q.gamma(k)) * v.re_trace(prog, v.Wt[s][k], H);
      e -= product(v.b[s], v.re_trace(prog, v.R[s], H), "SINR");
      for (int kk = 0; kk < v.K; ++kk)
        if (kk != k) e -= v.re_trace(prog, v.Wt[s][kk], H);
    }
    rows.push_back(std::move(e));
  }
  std::vector<ConstraintHandle> h;
  for (int k = 0; k < v.K; ++k)
    h.push_back(prog.add_linear(std::move(rows[k]), Sense::GreaterEq, "sinr k=" + std::to_string(k)));
  return h;
}

std::vector<ConstraintHandle> add_bigM(ConicProgram& prog, const LinExpr& a,
                                       const std::optional<MatrixVar>& W, const MatrixVar& Wt,
                                       double max_power, double unit) {
  if (Wt.kind != MatrixKind::Hermitian || (W && (W->kind != MatrixKind::Hermitian || W->dim != Wt.dim)))
    throw InvalidArgument("big-M: Hermitian variables of equal size required");
  if (!(max_power > 0.0) || !(unit > 0.0)) throw InvalidArgument("big-M: P and unit must be positive");
  const int n = Wt.dim;
  const double pm = max_power / unit;  // P in scaled units
  const CExprMatrix wt = prog.herm_expr(Wt);
  std::vector<ConstraintHandle> h;
  CExprMatrix c10a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      c10a(i, j) = {-wt(i, j).re, -wt(i, j).im};
      if (i == j) c10a(i, j).re += pm * a;
    }
  h.push_back(prog.add_hermitian_lmi(c10a, "bigM upper"));
  if (W) {
    const CExprMatrix w = prog.herm_expr(*W);
    CExprMatrix c10b(n), c10c(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        c10b(i, j) = {wt(i, j).re - w(i, j).re, wt(i, j).im - w(i, j).im};
        if (i == j) c10b(i, j).re += pm * (LinExpr(1.0) - a);
        c10c(i, j) = {w(i, j).re - wt(i, j).re, w(i, j).im - wt(i, j).im};
      }
    h.push_back(prog.add_hermitian_lmi(c10b, "bigM lower"));
    h.push_back(prog.add_hermitian_lmi(c10c, "bigM cap"));
  }
  h.push_back(prog.add_hermitian_lmi(wt, "bigM psd"));
  return h;
}

std::vector<ConstraintHandle> add_structural(ConicProgram& prog, const Instance& inst,
                                             const ProblemVars& v) {
  const double P = inst.qos().max_power;
  std::vector<std::pair<LinExpr, Sense>> rows;
  std::vector<std::string> tags;
  for (int s = 0; s < v.S; ++s) {
    LinExpr e(P);
    for (int k = 0; k < v.K; ++k) e -= v.trace(prog, v.Wt[s][k]);
    e -= product(v.b[s], v.trace(prog, v.R[s]), "power");
    rows.emplace_back(std::move(e), Sense::GreaterEq);
    tags.push_back("power s=" + std::to_string(s));
  }
  for (int k = 0; k < v.K; ++k) {
    LinExpr e(-1.0);
    for (int s = 0; s < v.S; ++s) e += v.a[s][k];
    rows.emplace_back(std::move(e), Sense::Equal);
    tags.push_back("assoc k=" + std::to_string(k));
  }
  {
    LinExpr e(-1.0);
    for (int s = 0; s < v.S; ++s) e += LinExpr(1.0) - v.b[s];
    rows.emplace_back(std::move(e), Sense::Equal);
    tags.push_back("single rx");
  }
  for (int s = 0; s < v.S; ++s)
    for (int k = 0; k < v.K; ++k) {
      rows.emplace_back(v.b[s] - v.a[s][k], Sense::GreaterEq);
      tags.push_back("serve needs tx s=" + std::to_string(s) + " k=" + std::to_string(k));
    }
  std::vector<ConstraintHandle> h;
  for (std::size_t i = 0; i < rows.size(); ++i)
    h.push_back(prog.add_linear(std::move(rows[i].first), rows[i].second, tags[i]));
  return h;
}

namespace {

ProblemVars empty_view(const Instance& inst) {
  ProblemVars v;
  v.S = inst.S();
  v.K = inst.K();
  v.N = inst.N();
  v.a.assign(v.S, std::vector<LinExpr>(v.K));
  v.b.assign(v.S, LinExpr(1.0));
  v.W.assign(v.S, std::vector<MatrixTerm>(v.K, MatrixTerm::fixed(CMat())));
  v.Wt = v.W;
  v.R.assign(v.S, MatrixTerm::fixed(CMat()));
  return v;
}

void check_dims(const Instance& inst, const DecisionPoint& d) {
  if (d.num_bs() != inst.S() || d.num_cu() != inst.K())
    throw InvalidArgument("decision point does not match the instance");
}

}  // namespace

ProblemVars fixed_view(const Instance& inst, const DecisionPoint& d) {
  ProblemVars v;
  v.S = inst.S();
  v.K = inst.K();
  v.N = inst.N();
  v.a.assign(v.S, std::vector<LinExpr>(v.K));
  v.b.resize(v.S);
  v.W.assign(v.S, std::vector<MatrixTerm>(v.K));
  v.Wt = v.W;
  v.R.resize(v.S);
  for (int s = 0; s < v.S; ++s) {
    v.b[s] = LinExpr(d.b(s));
    for (int k = 0; k < v.K; ++k) {
      v.a[s][k] = LinExpr(d.a(s, k));
      v.W[s][k] = MatrixTerm::fixed(d.W[s][k]);
      v.Wt[s][k] = MatrixTerm::fixed(d.Wt[s][k]);
    }
    v.R[s] = MatrixTerm::fixed(d.R[s]);
  }
  v.J.value = d.J;
  return v;
}

BuiltProgram build_sensing_check(const Instance& inst, const DecisionPoint& d, double eps) {
  check_dims(inst, d);
  BuiltProgram bp;
  ProblemVars v = fixed_view(inst, d);
  const MatrixVar J = bp.prog.add_symmetric("J", 2, false);
  v.J.var = J;
  v.U = add_trace_inverse_epigraph(bp.prog, J, eps).U;
  bp.prog.set_objective(bp.prog.trace(*v.U));
  add_crlb_lmi(bp.prog, inst, v);
  bp.vars = std::move(v);
  return bp;
}

BuiltProgram build_subproblem_b(const Instance& inst, const DecisionPoint& cur, double mu) {
  check_dims(inst, cur);
  BuiltProgram bp;
  ConicProgram& p = bp.prog;
  ProblemVars v = fixed_view(inst, cur);
  for (int s = 0; s < v.S; ++s) v.b[s] = relaxed_binary(p, "b" + std::to_string(s), cur.b(s));

  // f-bar with a, W-tilde, R, J at the incumbent and the b-penalty linearized.
  LinExpr obj;
  for (int s = 0; s < v.S; ++s) {
    for (int k = 0; k < v.K; ++k) obj += v.trace(p, v.Wt[s][k]);
    obj += cur.R[s].trace().real() * v.b[s];
    obj += penalty_term(v.b[s], cur.b(s), mu);
  }
  for (int i = 0; i < cur.a.size(); ++i) {
    const double at = cur.a.data()[i];
    obj.add_constant(mu * (at - at * at));
  }
  const double scale = mu > 0.0 ? mu : 1.0;
  p.set_objective((1.0 / scale) * obj);
  bp.objective_scale = scale;

  add_structural(p, inst, v);
  add_crlb_lmi(p, inst, v);
  add_sinr_constraints(p, inst, v);
  bp.vars = std::move(v);
  return bp;
}

BuiltProgram build_subproblem_main(const Instance& inst, const DecisionPoint& cur, const Vec& b,
                                   double mu, const MainOptions& opts) {
  check_dims(inst, cur);
  const int S = inst.S();
  const int K = inst.K();
  const int N = inst.N();
  if (b.size() != S) throw InvalidArgument("main subproblem: b must have S entries");
  for (int s = 0; s < S; ++s)
    if (b(s) < 0.0 || b(s) > 1.0) throw InvalidArgument("main subproblem: b outside [0,1]");
  BuiltProgram bp;
  ConicProgram& p = bp.prog;
  ProblemVars v = empty_view(inst);
  int rx = 0;
  for (int s = 1; s < S; ++s)
    if (b(s) < b(rx)) rx = s;
  v.unit = inst.power_scale(rx);

  for (int s = 0; s < S; ++s) {
    v.b[s] = LinExpr(b(s));
    bool other_rx = false;
    for (int r = 0; r < S; ++r) other_rx = other_rx || (r != s && b(r) < 1.0);
    if (b(s) > 0.0 || other_rx)
      v.R[s] = MatrixTerm::variable(p.add_hermitian("R" + std::to_string(s), N, true));
    if (b(s) == 0.0) continue;  // serving needs b = 1, so a = 0 and Wt = 0
    for (int k = 0; k < K; ++k) {
      const std::string tag = std::to_string(s) + "_" + std::to_string(k);
      v.a[s][k] = relaxed_binary(p, "a" + tag, cur.a(s, k));
      const MatrixVar wt = p.add_hermitian("Wt" + tag, N, false);
      v.Wt[s][k] = MatrixTerm::variable(wt);
      std::optional<MatrixVar> w;
      if (opts.keep_w) {
        w = p.add_hermitian("W" + tag, N, false);
        v.W[s][k] = MatrixTerm::variable(*w);
      } else {
        v.W[s][k] = v.Wt[s][k];
      }
      add_bigM(p, v.a[s][k], w, wt, inst.qos().max_power, v.unit);
    }
  }
  const MatrixVar J = p.add_symmetric("J", 2, false);
  v.J.var = J;
  v.U = add_trace_inverse_epigraph(p, J, inst.qos().crlb_eps).U;

  LinExpr obj;
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) {
      obj += v.trace(p, v.Wt[s][k]);
      obj += penalty_term(v.a[s][k], cur.a(s, k), mu);
    }
    obj += product(v.b[s], v.trace(p, v.R[s]), "objective");
    obj += penalty_term(v.b[s], cur.b(s), mu);
  }
  p.set_objective((1.0 / v.unit) * obj);
  bp.objective_scale = v.unit;

  add_structural(p, inst, v);
  add_crlb_lmi(p, inst, v);
  add_sinr_constraints(p, inst, v);
  bp.vars = std::move(v);
  return bp;
}

void FixedAssignment::validate(int S, int K) const {
  if (rx < 0 || rx >= S) throw InvalidArgument("assignment: receiving BS out of range");
  if (static_cast<int>(serving.size()) != K)
    throw InvalidArgument("assignment: one serving BS per CU required");
  if (!silent.empty() && static_cast<int>(silent.size()) != S)
    throw InvalidArgument("assignment: silent mask must have S entries");
  for (int k = 0; k < K; ++k) {
    const int s = serving[k];
    if (s < 0 || s >= S) throw InvalidArgument("assignment: serving BS out of range");
    if (s == rx) throw InvalidArgument("assignment: the receiving BS cannot serve a CU");
    if (!silent.empty() && silent[s]) throw InvalidArgument("assignment: a silent BS cannot serve");
  }
}

Vec FixedAssignment::b(int S) const {
  Vec v = Vec::Ones(S);
  v(rx) = 0.0;
  return v;
}

Mat FixedAssignment::a(int S) const {
  Mat m = Mat::Zero(S, static_cast<int>(serving.size()));
  for (std::size_t k = 0; k < serving.size(); ++k) m(serving[k], static_cast<int>(k)) = 1.0;
  return m;
}

BuiltProgram build_fixed_binary(const Instance& inst, const FixedAssignment& fa) {
  const int S = inst.S();
  const int K = inst.K();
  const int N = inst.N();
  fa.validate(S, K);
  BuiltProgram bp;
  ConicProgram& p = bp.prog;
  ProblemVars v = empty_view(inst);
  v.unit = inst.power_scale(fa.rx);
  const Mat a = fa.a(S);
  const Vec b = fa.b(S);
  for (int s = 0; s < S; ++s) {
    v.b[s] = LinExpr(b(s));
    for (int k = 0; k < K; ++k) v.a[s][k] = LinExpr(a(s, k));
  }
  for (int k = 0; k < K; ++k) {
    const int s = fa.serving[k];
    v.W[s][k] = MatrixTerm::variable(
        p.add_hermitian("W" + std::to_string(s) + "_" + std::to_string(k), N, true));
    v.Wt[s][k] = v.W[s][k];
  }
  for (int s = 0; s < S; ++s)
    if (s != fa.rx && (fa.silent.empty() || !fa.silent[s]))
      v.R[s] = MatrixTerm::variable(p.add_hermitian("R" + std::to_string(s), N, true));
  const MatrixVar J = p.add_symmetric("J", 2, false);
  v.J.var = J;
  v.U = add_trace_inverse_epigraph(p, J, inst.qos().crlb_eps).U;

  LinExpr obj;
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) obj += v.trace(p, v.Wt[s][k]);
    obj += b(s) * v.trace(p, v.R[s]);
  }
  p.set_objective((1.0 / v.unit) * obj);
  bp.objective_scale = v.unit;

  add_structural(p, inst, v);
  add_crlb_lmi(p, inst, v);
  add_sinr_constraints(p, inst, v);
  bp.vars = std::move(v);
  return bp;
}

}  // namespace netisac::conic
