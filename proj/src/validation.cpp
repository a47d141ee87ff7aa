// SPDX-License-Identifier: Apache-2.0
#include "netisac/validation.hpp"

#include <chrono>
#include <random>
#include <sstream>

#include "netisac/baselines.hpp"

namespace netisac::validation {

namespace {

using conic::BuiltProgram;
using conic::ConicProgram;

std::string sci(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
template <class M>
double rel_err_m(const M& a, const M& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

CMat random_psd(std::mt19937_64& rng, int n, int rank, double scale) {
  std::normal_distribution<double> g;
  CMat V(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) V(i, j) = cd(g(rng), g(rng));
  return scale * V * V.adjoint() / static_cast<double>(n * rank);
}

ScenarioConfig small_scenario(int S, int K, int N) {
  ScenarioConfig c = default_scenario();
  c.num_bs = S;
  c.num_cu = K;
  c.num_antennas = N;
  c.bs_positions.clear();
  for (int s = 0; s < S; ++s) {
    const double t = 2.0 * kPi * s / S;
    c.bs_positions.emplace_back(100.0 * std::sin(t), 100.0 * std::cos(t));
  }
  return c;
}

double min_eig(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Mat>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// Smallest eigenvalue of every LMI and smallest linear slack at x, both
// relative to the magnitude of the evaluated quantity.
struct Slack {
  double lmi = 1e300;
  double linear = 1e300;
};
Slack slacks(const ConicProgram& p, const Vec& x) {
  Slack s;
  for (const auto& l : p.lmi_constraints()) {
    const Mat m = conic::evaluate(l.matrix, x);
    s.lmi = std::min(s.lmi, min_eig(m) / std::max(1.0, m.cwiseAbs().maxCoeff()));
  }
  for (const auto& l : p.linear_constraints()) {
    double v = l.expr.evaluate(x);
    if (l.sense == conic::Sense::LessEq) v = -v;
    if (l.sense == conic::Sense::Equal) v = -std::abs(v);
    s.linear = std::min(s.linear, v);
  }
  return s;
}

// A random binary decision point on `inst`.
DecisionPoint random_binary_point(const Instance& inst, std::mt19937_64& rng) {
  const int S = inst.S(), K = inst.K(), N = inst.N();
  DecisionPoint d = DecisionPoint::zeros(S, K, N);
  const int rx = std::uniform_int_distribution<int>(0, S - 1)(rng);
  d.b.setOnes();
  d.b(rx) = 0.0;
  std::uniform_int_distribution<int> pick(0, S - 2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < K; ++k) {
    int s = pick(rng);
    if (s >= rx) ++s;
    d.a(s, k) = 1.0;
    d.W[s][k] = random_psd(rng, N, 1, std::pow(10.0, u(rng)) * 1e-3);
    d.Wt[s][k] = d.W[s][k];
  }
  for (int s = 0; s < S; ++s)
    if (s != rx) d.R[s] = random_psd(rng, N, 1 + s % N, std::pow(10.0, u(rng)) * 1e-3);
  return d;
}

template <class F>
CheckResult timed(const std::string& name, F body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

CheckResult check_gradients(const Options& o) {
  return timed("gradients", [&](CheckResult& r) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> u(-140.0, 140.0);
    double worst = 0.0;
    int done = 0;
    for (int tries = 0; done < o.geometries && tries < 100 * o.geometries; ++tries) {
      ScenarioConfig c = default_scenario();
      c.rng_seed = rng();
      const Scene scene = build_scene(c);
      Vec2 p(u(rng), u(rng));
      if (p.norm() > 140.0) continue;
      bool near = false;
      for (const Vec2& q : scene.bs) near = near || (p - q).norm() < 5.0;
      if (near) continue;
      const double h = 1e-3;
      for (int rx = 0; rx < scene.num_bs(); ++rx)
        for (int tx = 0; tx < scene.num_bs(); ++tx) {
          if (tx == rx) continue;
          const SensingLink l = link_geometry_at(scene, rx, tx, p);
          Vec2 fd_tau, fd_r, fd_t;
          for (int i = 0; i < 2; ++i) {
            Vec2 e = Vec2::Zero();
            e(i) = h;
            const SensingLink lp = link_geometry_at(scene, rx, tx, p + e);
            const SensingLink lm = link_geometry_at(scene, rx, tx, p - e);
            fd_tau(i) = (lp.tau - lm.tau) / (2 * h);
            fd_r(i) = (lp.theta_r - lm.theta_r) / (2 * h);
            fd_t(i) = (lp.theta_t - lm.theta_t) / (2 * h);
            worst = std::max(worst, rel_err_m(CMat((lp.G - lm.G) / (2 * h)), l.Gdot[i]));
          }
          worst = std::max({worst, rel_err_m(fd_tau, l.tau_grad), rel_err_m(fd_r, l.dtheta_r),
                            rel_err_m(fd_t, l.dtheta_t)});
          const double th = l.theta_r;
          const CVec fd = (steering_vector(th + 1e-6, scene.num_antennas()) -
                           steering_vector(th - 1e-6, scene.num_antennas())) / 2e-6;
          worst = std::max(worst, rel_err_m(fd, steering_derivative(th, scene.num_antennas())));
        }
      ++done;
    }
    r.passed = done > 0 && worst <= 1e-5;
    std::ostringstream os;
    os << done << " geometries, worst relative error " << worst;
    r.detail = os.str();
  });
}

CheckResult check_fim_linearity(const Options& o) {
  return timed("fim-linearity", [&](CheckResult& r) {
    std::mt19937_64 rng(o.seed + 1);
    double worst = 0.0;
    for (int t = 0; t < o.points; ++t) {
      ScenarioConfig c = default_scenario();
      c.rng_seed = rng();
      const Scene scene = build_scene(c);
      const int rx = static_cast<int>(rng() % scene.num_bs());
      const auto links = links_for_rx(scene, rx);
      const double s2 = dbm_to_watts(c.noise_radar_dbm);
      std::vector<CMat> c1(scene.num_bs()), c2(scene.num_bs()), c12(scene.num_bs());
      for (int s = 0; s < scene.num_bs(); ++s) {
        c1[s] = random_psd(rng, scene.num_antennas(), 2, 1e-2);
        c2[s] = random_psd(rng, scene.num_antennas(), 3, 1e-2);
        c12[s] = c1[s] + 2.0 * c2[s];
      }
      const Mat f1 = fim_blocks(rx, c1, links, scene.num_samples(), s2).full();
      const Mat f2 = fim_blocks(rx, c2, links, scene.num_samples(), s2).full();
      const Mat f12 = fim_blocks(rx, c12, links, scene.num_samples(), s2).full();
      worst = std::max(worst, rel_err_m(Mat(f1 + 2.0 * f2), f12));
      for (double k : {2.0, 10.0}) {
        std::vector<CMat> ck = c1;
        for (auto& m : ck) m *= k;
        const CrlbResult a = crlb(fim_blocks(rx, c1, links, scene.num_samples(), s2));
        const CrlbResult b = crlb(fim_blocks(rx, ck, links, scene.num_samples(), s2));
        if (a.ok() && b.ok()) worst = std::max(worst, rel_err(b.value * k, a.value));
      }
    }
    r.passed = worst <= 1e-8;
    r.detail = "worst relative error " + sci(worst);
  });
}

CheckResult check_reformulation(const Options& o) {
  return timed("reformulation-equivalence", [&](CheckResult& r) {
    std::mt19937_64 rng(o.seed + 2);
    int mismatches = 0, tested = 0;
    for (int t = 0; t < o.points; ++t) {
      ScenarioConfig c = small_scenario(3, 2, 4);
      c.rng_seed = rng();
      const Scene scene = build_scene(c);
      const ChannelSet ch = sample_channels(scene, rng());
      QosSpec q = QosSpec::uniform(2, 0.0, 1.0, scene.max_power());
      Instance probe(scene, ch, q);
      const DecisionPoint d = random_binary_point(probe, rng);
      const int rx = d.receiving_bs();
      const CrlbResult cr =
          crlb(fim_blocks(rx, d, probe.links(rx), scene.num_samples(), probe.sigma2_r(rx)));
      if (!cr.ok()) continue;
      std::uniform_real_distribution<double> f(-0.3, 0.3);
      q.crlb_eps = cr.value * std::pow(10.0, f(rng));
      for (int k = 0; k < 2; ++k) q.gamma(k) = sinr(k, d, ch) * std::pow(10.0, f(rng));
      Instance inst(scene, ch, q);
      if (o.inject_fpa_sign_error)
        for (int s = 0; s < 3; ++s) {
          auto coef = inst.coefficients(s);
          for (auto& cf : coef) cf.pa_im[0] = -cf.pa_im[0];
          inst.override_coefficients(s, std::move(coef));
        }
      BuiltProgram bp = conic::build_sensing_check(inst, d, q.crlb_eps);
      const conic::LmiConstraint* crlb_lmi = nullptr;
      for (const auto& l : bp.prog.lmi_constraints())
        if (l.tag == "crlb lmi") crlb_lmi = &l;
      // With J = 0 the LMI matrix is the FIM itself; the CRLB LMI holds iff J is
      // below its Schur complement, which must be the metrics one.
      Vec x = Vec::Zero(bp.prog.num_variables());
      const Mat M = conic::evaluate(crlb_lmi->matrix, x);
      const int D = static_cast<int>(M.rows());
      const Mat B = M.topRightCorner(2, D - 2);
      const Mat2 S_lmi =
          M.topLeftCorner(2, 2) - B * M.bottomRightCorner(D - 2, D - 2).ldlt().solve(B.transpose());
      const double schur_err = rel_err_m(S_lmi, cr.schur);
      // Certificate J = S_lmi, U = J^-1 for the remaining constraints.
      conic::set_sym_value(*bp.vars.J.var, S_lmi, x);
      conic::set_sym_value(*bp.vars.U, Mat(S_lmi.inverse()), x);
      const Slack at = slacks(bp.prog, x);
      const bool feasible = at.lmi >= -1e-9 && at.linear >= -1e-9 * q.crlb_eps;
      ++tested;
      if (feasible != (cr.value <= q.crlb_eps) || schur_err > 1e-9) ++mismatches;

      ConicProgram sp;
      conic::ProblemVars v = conic::fixed_view(inst, d);
      const auto hs = conic::add_sinr_constraints(sp, inst, v);
      for (int k = 0; k < 2; ++k) {
        const double res = sp.linear_constraints()[hs[k].index].expr.constant();
        if ((res >= 0.0) != (sinr(k, d, ch) >= q.gamma(k))) ++mismatches;
      }
    }
    r.passed = tested > 0 && mismatches == 0;
    r.detail = std::to_string(tested) + " points, " + std::to_string(mismatches) + " mismatches";
  });
}

CheckResult check_bigm(const Options& o) {
  return timed("big-M", [&](CheckResult& r) {
    std::mt19937_64 rng(o.seed + 3);
    double worst = 0.0;
    for (double a : {0.0, 1.0}) {
      ConicProgram p;
      const int n = 3;
      const CMat W0 = random_psd(rng, n, 2, 1.0);
      const conic::MatrixVar W = p.add_hermitian("W", n, false);
      const conic::MatrixVar Wt = p.add_hermitian("Wt", n, false);
      Vec x0 = Vec::Zero(p.num_variables());
      conic::set_herm_value(W, W0, x0);
      for (int i = 0; i < W.num_scalars(); ++i)
        p.add_linear(conic::LinExpr::variable(W.offset + i) - conic::LinExpr(x0(W.offset + i)),
                     conic::Sense::Equal, "fix W");
      conic::add_bigM(p, conic::LinExpr(a), W, Wt, 4.0, 1.0);
      p.set_objective(p.trace(Wt));
      conic::SolverOptions so;
      so.tol = 1e-10;
      const auto out = conic::solve(p, so);
      if (!out.usable()) {
        r.detail = "solve failed";
        return;
      }
      const CMat expect = a == 0.0 ? CMat(CMat::Zero(n, n)) : W0;
      worst = std::max(worst, (conic::herm_value(Wt, out.x) - expect).norm());
    }
    r.passed = worst <= 1e-8;
    r.detail = "worst Frobenius error " + sci(worst);
  });
}

CheckResult check_solver(const Options&) {
  return timed("solver-sanity", [&](CheckResult& r) {
    ConicProgram p;
    const conic::MatrixVar X = p.add_symmetric("X", 2, false);
    conic::ExprMatrix m = p.sym_expr(X);
    m(0, 0).add_constant(-1.0);
    m(1, 1).add_constant(-1.0);
    p.add_lmi(m, "X >= I");
    p.set_objective(p.trace(X));
    const auto a = conic::solve(p);
    ConicProgram q;
    const int y = q.add_scalar("y", 1.0, conic::kInf);
    q.add_linear(conic::LinExpr::variable(y), conic::Sense::LessEq, "y <= 0");
    q.set_objective(conic::LinExpr::variable(y));
    const auto b = conic::solve(q);
    r.passed = a.status == conic::SolveStatus::Optimal && std::abs(a.objective - 2.0) <= 1e-7 &&
               b.status == conic::SolveStatus::Infeasible;
    r.detail = "trace objective " + sci(a.objective) + ", infeasible LP -> " +
               conic::to_string(b.status);
  });
}

CheckResult check_oracle_dominance(const Options& o) {
  return timed("oracle-dominance", [&](CheckResult& r) {
    std::ostringstream os;
    bool ok = true;
    int compared = 0;
    for (int t = 0; t < o.oracle_seeds; ++t) {
      ScenarioConfig c = small_scenario(3, 2, 2);
      c.rng_seed = o.seed + 100 + static_cast<std::uint64_t>(t);
      const Scene scene = build_scene(c);
      const ChannelSet ch = sample_channels(scene, derive_seed(c.rng_seed, SeedStream::Channel));
      const Instance inst(scene, ch, QosSpec::uniform(2, 8.0, 1.0, scene.max_power()));
      AoConfig cfg;
      const OracleResult orc = brute_force(inst, cfg);
      const SolutionReport ao = run_ao(inst, cfg);
      if (orc.best.feasible() != ao.feasible()) ok = false;
      if (orc.best.feasible() && ao.feasible()) {
        const double gap = ao.total_power_dbm() - orc.best.total_power_dbm();
        ok = ok && gap >= -1e-3;
        os << (compared ? ", " : "gaps dB: ") << gap;
        ++compared;
      }
    }
    r.passed = ok;
    r.detail = compared ? os.str() : "no feasible instance";
  });
}

std::vector<CheckResult> run_all(const Options& o) {
  return {check_gradients(o), check_fim_linearity(o), check_reformulation(o),
          check_bigm(o),      check_solver(o),        check_oracle_dominance(o)};
}

}  // namespace netisac::validation
