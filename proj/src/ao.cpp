// SPDX-License-Identifier: Apache-2.0
#include "netisac/ao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace netisac {

using conic::SolveOutcome;
using conic::SolveStatus;
using conic::SolverOptions;

namespace {

// Interior-point iterates sit ~1e-9 inside [0,1]; with mu = 3e4 that residue
// alone would dwarf the transmit power in the merit function.
constexpr double kSnapTol = 1e-6;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void snap(DecisionPoint& d) {
  auto snap01 = [](double& x) {
    if (std::abs(x) <= kSnapTol) x = 0.0;
    else if (std::abs(x - 1.0) <= kSnapTol) x = 1.0;
  };
  for (int s = 0; s < d.b.size(); ++s) snap01(d.b(s));
  for (int s = 0; s < d.a.rows(); ++s)
    for (int k = 0; k < d.a.cols(); ++k) {
      snap01(d.a(s, k));
      if (d.a(s, k) == 0.0) {
        d.W[s][k].setZero();
        d.Wt[s][k].setZero();
      }
    }
}

SolveOutcome solve_logged(const conic::ConicProgram& prog, const SolverOptions& opts,
                          std::vector<SolveRecord>& trail, const std::string& stage) {
  SolveOutcome o = conic::solve(prog, opts);
  trail.push_back({stage, o.status, o.stats.iterations, o.stats.runtime_s});
  if (o.status == SolveStatus::SolverError) {
    SolverOptions relaxed = opts;
    relaxed.tol = std::max(opts.tol * 100.0, 1e-7);
    relaxed.inaccurate_tol = std::max(opts.inaccurate_tol * 10.0, 1e-4);
    o = conic::solve(prog, relaxed);
    trail.push_back({stage + " (relaxed)", o.status, o.stats.iterations, o.stats.runtime_s});
  }
  return o;
}

bool same_assignment(const FixedAssignment& x, const FixedAssignment& y) {
  return x.rx == y.rx && x.serving == y.serving && x.silent == y.silent;
}

double total_gain(const ChannelSet& ch, int s, int K) {
  double g = 0.0;
  for (int k = 0; k < K; ++k) g += ch.gain(s, k);
  return g;
}

}  // namespace

void AoConfig::validate() const {
  if (!(mu >= 0.0)) throw InvalidArgument("ao.mu: must be non-negative");
  if (!(eps_tol > 0.0 && eps_tol < 1.0)) throw InvalidArgument("ao.eps_tol: must lie in (0,1)");
  if (max_iter < 0) throw InvalidArgument("ao.max_iter: must be non-negative");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw InvalidArgument("ao.rank_tol: must lie in (0,1)");
  if (!(binary_tol > 0.0 && binary_tol < 1.0))
    throw InvalidArgument("ao.binary_tol: must lie in (0,1)");
  if (!(solver.tol > 0.0) || solver.max_iter < 1)
    throw InvalidArgument("ao.solver: tolerance and iteration limit must be positive");
}

const char* to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Feasible: return "Feasible";
    case ReportStatus::Infeasible: return "Infeasible";
    case ReportStatus::SolverError: return "SolverError";
  }
  return "?";
}

double SolutionReport::min_sinr_db() const {
  if (sinr.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return linear_to_db(sinr.minCoeff());
}

Beamformer extract_beamformer(const CMat& W, double rank_tol) {
  if (W.rows() != W.cols() || W.rows() == 0) throw InvalidArgument("extract_beamformer: W must be square");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (W + W.adjoint()));
  const int n = static_cast<int>(W.rows());
  const double l1 = es.eigenvalues()(n - 1);
  Beamformer b;
  if (!(l1 > 0.0)) {
    b.w = CVec::Zero(n);
    b.rank_one = true;
    return b;
  }
  const double l2 = n > 1 ? std::max(es.eigenvalues()(n - 2), 0.0) : 0.0;
  b.ratio = l2 / l1;
  b.rank_one = b.ratio <= rank_tol;
  b.w = std::sqrt(l1) * es.eigenvectors().col(n - 1);
  return b;
}

FixedSolve solve_fixed(const Instance& inst, const FixedAssignment& fa, const SolverOptions& opts) {
  FixedSolve fs;
  fs.assignment = fa;
  conic::BuiltProgram bp = conic::build_fixed_binary(inst, fa);
  fs.outcome = conic::solve(bp.prog, opts);
  if (fs.outcome.status == SolveStatus::SolverError) {
    SolverOptions relaxed = opts;
    relaxed.tol = std::max(opts.tol * 100.0, 1e-7);
    relaxed.inaccurate_tol = std::max(opts.inaccurate_tol * 10.0, 1e-4);
    fs.outcome = conic::solve(bp.prog, relaxed);
  }
  if (fs.outcome.usable()) {
    fs.point = bp.vars.extract(fs.outcome.x);
    fs.power = objective_f(fs.point);
  }
  return fs;
}

SolutionReport make_report(const Instance& inst, const FixedSolve& fs, const AoConfig& cfg,
                           std::string scheme) {
  SolutionReport r;
  r.scheme = std::move(scheme);
  r.trail.push_back({"fixed-binary", fs.outcome.status, fs.outcome.stats.iterations,
                     fs.outcome.stats.runtime_s});
  if (!fs.outcome.usable()) {
    r.status = fs.outcome.status == SolveStatus::Infeasible ? ReportStatus::Infeasible
                                                             : ReportStatus::SolverError;
    r.message = fs.outcome.message;
    return r;
  }
  const int S = inst.S();
  const int K = inst.K();
  const ChannelSet& ch = inst.channels();
  const QosSpec& q = inst.qos();
  const FixedAssignment& fa = fs.assignment;
  DecisionPoint d = fs.point;
  r.inaccurate = fs.outcome.status == SolveStatus::Inaccurate;
  r.rx_bs = fa.rx;
  r.serving = fa.serving;
  r.a = fa.a(S);
  r.w.assign(S, std::vector<CVec>(K));

  // Rank-one reduction: w = W h / sqrt(h^H W h) keeps the intended
  // signal power, and W - w w^H moves into the same BS's sensing covariance,
  // which leaves every SINR, the FIM and the power untouched.
  for (int k = 0; k < K; ++k) {
    const int s = fa.serving[k];
    const CMat W = 0.5 * (d.W[s][k] + d.W[s][k].adjoint());
    r.raw_rank_ratio = std::max(r.raw_rank_ratio, extract_beamformer(W, cfg.rank_tol).ratio);
    const CVec& h = ch.h[s][k];
    const CVec Wh = W * h;
    const double g = h.dot(Wh).real();
    CVec w = g > 0.0 ? CVec(Wh / std::sqrt(g)) : CVec::Zero(W.rows());
    const CMat rest = W - w * w.adjoint();
    d.R[s] += 0.5 * (rest + rest.adjoint());
    d.W[s][k] = w * w.adjoint();
    d.Wt[s][k] = d.W[s][k];
    r.rank_ratio = std::max(r.rank_ratio, extract_beamformer(d.W[s][k], cfg.rank_tol).ratio);
    r.w[s][k] = std::move(w);
  }
  r.R = d.R;

  // The solver is accurate relative to matrix entries. With interference
  // nulled, h^H W h is a small difference of large terms, so an SINR can end
  // a few tenths of a percent short. Such beams get a matching power boost
  // (a few passes, since a boost adds interference elsewhere); larger
  // shortfalls are left for the validation below.
  for (int pass = 0; pass < 50; ++pass) {
    bool changed = false;
    for (int k = 0; k < K; ++k) {
      const double v = sinr(k, d, ch);
      if (!(v < q.gamma(k))) continue;
      const double f = q.gamma(k) / v * (1.0 + 1e-7);
      if (!(f <= 1.0 + kMaxSinrBoost)) continue;
      const int s = fa.serving[k];
      r.w[s][k] *= std::sqrt(f);
      d.W[s][k] = r.w[s][k] * r.w[s][k].adjoint();
      d.Wt[s][k] = d.W[s][k];
      r.sinr_boost = std::max(r.sinr_boost, f - 1.0);
      changed = true;
    }
    if (!changed) break;
  }

  r.sinr.resize(K);
  for (int k = 0; k < K; ++k) r.sinr(k) = sinr(k, d, ch);
  const CrlbResult c = crlb(fim_blocks(fa.rx, d, inst.links(fa.rx), inst.scene().num_samples(),
                                       inst.sigma2_r(fa.rx)));
  r.crlb = c.ok() ? c.value : std::numeric_limits<double>::infinity();
  r.bs_power = Vec::Zero(S);
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) r.bs_power(s) += r.w[s][k].squaredNorm();
    r.bs_power(s) += d.b(s) * d.R[s].trace().real();
  }
  r.total_power = r.bs_power.sum();

  std::string why;
  for (int k = 0; k < K; ++k)
    if (r.sinr(k) < q.gamma(k) * (1.0 - 1e-6))
      why += " sinr k=" + std::to_string(k) + " (" + std::to_string(r.sinr(k) / q.gamma(k) - 1.0) + ")";
  if (!(r.crlb <= q.crlb_eps * (1.0 + 1e-6))) why += " crlb";
  for (int s = 0; s < S; ++s)
    if (r.bs_power(s) > q.max_power * (1.0 + 1e-6)) why += " power s=" + std::to_string(s);
  if (why.empty()) {
    r.status = ReportStatus::Feasible;
  } else {
    r.status = ReportStatus::SolverError;
    r.message = "validation failed:" + why;
  }
  return r;
}

FixedAssignment strongest_association(const Instance& inst, int rx, const std::vector<char>& silent) {
  const ChannelSet& ch = inst.channels();
  FixedAssignment fa;
  fa.rx = rx;
  fa.silent = silent;
  for (int k = 0; k < inst.K(); ++k) {
    int best = -1;
    for (int s = 0; s < inst.S(); ++s) {
      if (s == rx || (!silent.empty() && silent[s])) continue;
      if (best < 0 || ch.gain(s, k) > ch.gain(best, k)) best = s;
    }
    if (best < 0) throw InvalidArgument("association: no transmitting BS available");
    fa.serving.push_back(best);
  }
  return fa;
}

InitResult initialize(const Instance& inst, const AoConfig& cfg, std::optional<int> fixed_rx) {
  const int S = inst.S();
  if (S < 2) throw InvalidArgument("initialize: at least two BSs are required");
  std::vector<int> order;
  if (fixed_rx) {
    if (*fixed_rx < 0 || *fixed_rx >= S) throw InvalidArgument("initialize: receiving BS out of range");
    order.push_back(*fixed_rx);
  } else {
    order.resize(S);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> load(S);
    for (int s = 0; s < S; ++s) load[s] = total_gain(inst.channels(), s, inst.K());
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return load[x] < load[y]; });
  }
  InitResult res;
  for (int rx : order) {
    FixedSolve fs = solve_fixed(inst, strongest_association(inst, rx), cfg.solver);
    const bool ok = fs.outcome.usable();
    if (ok && (!res.feasible || fs.power < res.best.power)) {
      res.best = fs;
      res.feasible = true;
    }
    res.candidates.push_back(std::move(fs));
    if (ok && cfg.init == InitPolicy::FirstFeasible) break;
  }
  return res;
}

double merit(const DecisionPoint& d, double mu) { return objective_f(d) + mu * binary_penalty(d); }

AoState ao_step(const Instance& inst, const AoState& state, const AoConfig& cfg, bool freeze_b) {
  AoState next = state;
  next.trail.clear();
  next.iteration = state.iteration + 1;
  const std::string tag = " t=" + std::to_string(next.iteration);
  Vec b = state.d.b;
  if (!freeze_b) {
    conic::BuiltProgram bp = conic::build_subproblem_b(inst, state.d, cfg.mu);
    const SolveOutcome o = solve_logged(bp.prog, cfg.solver, next.trail, "b-update" + tag);
    // An unusable b-update keeps the incumbent b, which the update could
    // only have matched or improved.
    if (o.usable()) {
      DecisionPoint tmp = state.d;
      tmp.b = bp.vars.extract(o.x).b;
      snap(tmp);
      b = tmp.b.cwiseMax(0.0).cwiseMin(1.0);
    }
  }
  conic::BuiltProgram bp = conic::build_subproblem_main(inst, state.d, b, cfg.mu);
  const SolveOutcome o = solve_logged(bp.prog, cfg.solver, next.trail, "continuous-update" + tag);
  if (!o.usable()) {
    next.failed = true;
    return next;
  }
  next.d = bp.vars.extract(o.x);
  snap(next.d);
  next.fbar = merit(next.d, cfg.mu);
  return next;
}

FixedAssignment round_assignment(const Instance& inst, const DecisionPoint& d) {
  const int S = inst.S();
  FixedAssignment fa;
  fa.rx = 0;
  for (int s = 1; s < S; ++s)
    if (d.b(s) < d.b(fa.rx)) fa.rx = s;
  const ChannelSet& ch = inst.channels();
  for (int k = 0; k < inst.K(); ++k) {
    int best = -1;
    for (int s = 0; s < S; ++s) {
      if (s == fa.rx) continue;
      if (best < 0 || d.a(s, k) > d.a(best, k) ||
          (d.a(s, k) == d.a(best, k) && ch.gain(s, k) > ch.gain(best, k)))
        best = s;
    }
    fa.serving.push_back(best);
  }
  return fa;
}

SolutionReport run_ao(const Instance& inst, const AoConfig& cfg, std::optional<int> fixed_rx,
                      const std::string& scheme) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  std::vector<SolveRecord> trail;
  InitResult init = initialize(inst, cfg, fixed_rx);
  for (const FixedSolve& c : init.candidates)
    trail.push_back({"init rx=" + std::to_string(c.assignment.rx), c.outcome.status,
                     c.outcome.stats.iterations, c.outcome.stats.runtime_s});
  if (!init.feasible) {
    SolutionReport r;
    r.scheme = scheme;
    bool all_infeasible = true;
    for (const FixedSolve& c : init.candidates)
      all_infeasible = all_infeasible && c.outcome.status == SolveStatus::Infeasible;
    r.status = all_infeasible ? ReportStatus::Infeasible : ReportStatus::SolverError;
    r.message = all_infeasible ? "no feasible receiving BS at initialization"
                               : "initialization solves failed";
    r.trail = std::move(trail);
    r.runtime_s = seconds_since(t0);
    return r;
  }

  AoState st;
  st.d = init.best.point;
  snap(st.d);
  st.fbar = merit(st.d, cfg.mu);
  std::vector<double> history{st.fbar};
  bool converged = false;
  std::string note;
  for (int t = 0; t < cfg.max_iter; ++t) {
    AoState next = ao_step(inst, st, cfg, fixed_rx.has_value());
    trail.insert(trail.end(), next.trail.begin(), next.trail.end());
    if (next.failed) {
      note = "AO stopped: continuous update failed at iteration " + std::to_string(next.iteration);
      st.iteration = next.iteration;
      break;
    }
    history.push_back(next.fbar);
    const double rel = std::abs(next.fbar - st.fbar) / std::max(std::abs(next.fbar), 1e-300);
    st = std::move(next);
    if (rel <= cfg.eps_tol) {
      converged = true;
      break;
    }
  }

  FixedAssignment fa = round_assignment(inst, st.d);
  if (fixed_rx) fa.rx = *fixed_rx;
  FixedSolve polish;
  bool reused = false;
  for (const FixedSolve& c : init.candidates)
    if (same_assignment(c.assignment, fa)) {
      polish = c;
      reused = true;
    }
  if (!reused) polish = solve_fixed(inst, fa, cfg.solver);
  SolutionReport r = make_report(inst, polish, cfg, scheme);
  if (!r.feasible() && !same_assignment(fa, init.best.assignment)) {
    SolutionReport fb = make_report(inst, init.best, cfg, scheme);
    if (fb.feasible()) {
      fb.message = "rounded point failed (" + std::string(to_string(r.status)) +
                   "); fell back to the initialization candidate";
      r = std::move(fb);
    }
  }
  trail.insert(trail.end(), r.trail.begin(), r.trail.end());
  r.trail = std::move(trail);
  r.iterations = st.iteration;
  r.converged = converged;
  r.fbar_history = std::move(history);
  if (!note.empty()) r.message = r.message.empty() ? note : r.message + "; " + note;
  r.runtime_s = seconds_since(t0);
  return r;
}

}  // namespace netisac
