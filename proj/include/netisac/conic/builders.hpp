// SPDX-License-Identifier: Apache-2.0
//
// Translation of the reformulated joint design into conic programs: the
// trace-inverse epigraph, the Schur-complement CRLB LMI, linearized SINR
// constraints, big-M product constraints, the structural constraints, and the
// three programs the optimizer solves (binary update, continuous update, and
// beamforming with all binaries frozen).
//
// Every matrix quantity is either a program variable or a fixed value. Power
// variables are stored in scaled units: value = unit * variable, where the
// unit is a rough estimate of the optimal power so that the solver sees
// numbers of order one.
#pragma once

#include <optional>

#include "netisac/conic/program.hpp"
#include "netisac/metrics.hpp"

namespace netisac::conic {

/// A complex N x N quantity that is either a Hermitian variable or fixed.
struct MatrixTerm {
  std::optional<MatrixVar> var;
  CMat value;  // used when var is empty

  static MatrixTerm variable(const MatrixVar& v) { return {v, CMat()}; }
  static MatrixTerm fixed(CMat m) { return {std::nullopt, std::move(m)}; }
  bool is_var() const { return var.has_value(); }
};

/// The real symmetric 2 x 2 matrix J, variable or fixed.
struct SymTerm {
  std::optional<MatrixVar> var;
  Mat2 value = Mat2::Zero();
  bool is_var() const { return var.has_value(); }
};

/// Symbolic view of a decision point inside one program.
struct ProblemVars {
  int S = 0, K = 0, N = 0;
  double unit = 1.0;  // Watts per scaled power unit
  std::vector<std::vector<LinExpr>> a;  // [s][k]
  std::vector<LinExpr> b;
  std::vector<std::vector<MatrixTerm>> W, Wt;
  std::vector<MatrixTerm> R;
  SymTerm J;
  std::optional<MatrixVar> U;

  /// Re tr(Q X) in Watts-scaled terms for a power quantity.
  LinExpr re_trace(const ConicProgram& prog, const MatrixTerm& t, const CMat& Q) const;
  LinExpr trace(const ConicProgram& prog, const MatrixTerm& t) const;
  /// Reads a solution back.
  DecisionPoint extract(const Vec& x) const;
  /// Writes the variable parts of d into a program vector (inverse of extract
  /// on the variables this view owns).
  Vec encode(const DecisionPoint& d, int num_vars) const;
};

/// Sensing geometry of a scene for every choice of receiving BS.
class Instance {
 public:
  Instance(const Scene& scene, const ChannelSet& ch, QosSpec qos);

  const Scene& scene() const { return *scene_; }
  const ChannelSet& channels() const { return *ch_; }
  const QosSpec& qos() const { return qos_; }
  int S() const { return scene_->num_bs(); }
  int K() const { return scene_->num_cu(); }
  int N() const { return scene_->num_antennas(); }
  const std::vector<SensingLink>& links(int rx) const { return links_[rx]; }
  const std::vector<FimLinkCoefficients>& coefficients(int rx) const { return coef_[rx]; }
  /// Replaces the FIM coefficients of one receiver (fault-injection tests).
  void override_coefficients(int rx, std::vector<FimLinkCoefficients> coef);
  double sigma2_r(int rx) const { return ch_->sigma2_r(rx); }
  /// Rough total power needed with `rx` receiving (scaling only).
  double power_scale(int rx) const;

 private:
  const Scene* scene_;
  const ChannelSet* ch_;
  QosSpec qos_;
  std::vector<std::vector<SensingLink>> links_;
  std::vector<std::vector<FimLinkCoefficients>> coef_;
  Vec sense_scale_;
};

/// Product of two affine expressions; throws InvalidArgument when both vary.
LinExpr product(const LinExpr& x, const LinExpr& y, const char* what);

struct EpigraphHandles {
  MatrixVar U;
  std::vector<ConstraintHandle> constraints;
};

/// tr(J^-1) <= eps through [U I; I J] >= 0, tr(U) <= eps, plus J >= 0.
EpigraphHandles add_trace_inverse_epigraph(ConicProgram& prog, const MatrixVar& J, double eps);

/// FIM at receiving BS `rx` as an affine expression matrix of size
/// 2 + 2(S-1), with per-BS covariance C_s = sum of the given terms.
ExprMatrix fim_expression(const ConicProgram& prog, const Instance& inst, const ProblemVars& v,
                          int rx, const std::vector<std::vector<const MatrixTerm*>>& cov);

/// sum_s w_s [F_pp(s) - J, F_pa(s); F_pa(s)^T, F_aa(s)] >= 0 with w_s = 1 - b_s.
/// Exactly one of {b} and {covariances, J} may be variable.
ConstraintHandle add_crlb_lmi(ConicProgram& prog, const Instance& inst, const ProblemVars& v);

/// Linearized SINR constraint for every CU (W-tilde in place of a W).
std::vector<ConstraintHandle> add_sinr_constraints(ConicProgram& prog, const Instance& inst,
                                                   const ProblemVars& v);

/// Big-M constraints for one (s, k): Wt <= a P I, Wt >= W - (1-a) P I,
/// Wt <= W, Wt >= 0. When W is empty only the first and last are added.
std::vector<ConstraintHandle> add_bigM(ConicProgram& prog, const LinExpr& a,
                                       const std::optional<MatrixVar>& W, const MatrixVar& Wt,
                                       double max_power, double unit);

/// Per-BS power budget, association/selection equalities, coupling b_s >= a_sk.
std::vector<ConstraintHandle> add_structural(ConicProgram& prog, const Instance& inst,
                                             const ProblemVars& v);

struct BuiltProgram {
  ConicProgram prog;
  ProblemVars vars;
  double objective_scale = 1.0;  // true objective = scale * program objective
};

/// Every quantity of `d` as a fixed value (J included).
ProblemVars fixed_view(const Instance& inst, const DecisionPoint& d);

/// Sensing check at a fixed point: J and U variable, everything else fixed,
/// objective tr(U), epigraph, FIM and CRLB LMIs present. Its optimum equals the CRLB.
BuiltProgram build_sensing_check(const Instance& inst, const DecisionPoint& d, double eps);

/// Binary-selection update: b variable, everything else fixed at `cur`.
BuiltProgram build_subproblem_b(const Instance& inst, const DecisionPoint& cur, double mu);

struct MainOptions {
  // W enters only through the two big-M constraints that W = Wt always
  // satisfies, so by default it is projected out of the program.
  bool keep_w = false;
};

/// Continuous update: W, Wt, R, J, U and a variable, b fixed to `b`,
/// penalty linearized around `cur`.
BuiltProgram build_subproblem_main(const Instance& inst, const DecisionPoint& cur, const Vec& b,
                                   double mu, const MainOptions& opts = {});

/// A fully specified binary configuration.
struct FixedAssignment {
  int rx = 0;
  std::vector<int> serving;   // serving BS per CU
  std::vector<char> silent;   // transmitting BSs that emit nothing (optional)

  void validate(int S, int K) const;
  Vec b(int S) const;
  Mat a(int S) const;
};

/// Beamforming only: W for each served pair, R for each active transmitter.
BuiltProgram build_fixed_binary(const Instance& inst, const FixedAssignment& fa);

}  // namespace netisac::conic
