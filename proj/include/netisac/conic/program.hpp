// SPDX-License-Identifier: Apache-2.0
//
// Solver-agnostic conic program: real scalar variables (optionally boxed),
// symmetric and Hermitian matrix variables stored as blocks of scalars,
// affine linear constraints, LMIs and a linear objective. Hermitian LMIs are
// realized through the real embedding [Re -Im; Im Re], so everything the
// solver sees is real.
#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "netisac/types.hpp"

namespace netisac::conic {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  int var;
  double coef;
};

/// Affine expression sum_i coef_i x_i + constant.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}
  static LinExpr variable(int index, double coef = 1.0);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }

  LinExpr& add_term(int var, double coef);
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);

  /// Merges duplicate variables and drops exact zeros.
  void compress();
  double evaluate(const Vec& x) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);
LinExpr operator-(LinExpr a);

/// Complex affine expression (real and imaginary parts).
struct CLinExpr {
  LinExpr re;
  LinExpr im;
};

/// Dense n x n matrix of affine expressions.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  explicit ExprMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * n) {}
  int dim() const { return n_; }
  LinExpr& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
  const LinExpr& operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }

 private:
  int n_ = 0;
  std::vector<LinExpr> entries_;
};

/// Dense n x n matrix of complex affine expressions (Hermitian by contract).
class CExprMatrix {
 public:
  CExprMatrix() = default;
  explicit CExprMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * n) {}
  int dim() const { return n_; }
  CLinExpr& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
  const CLinExpr& operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }

 private:
  int n_ = 0;
  std::vector<CLinExpr> entries_;
};

/// Real embedding [Re -Im; Im Re] of a Hermitian expression matrix.
ExprMatrix embed_hermitian(const CExprMatrix& m);

enum class MatrixKind { Symmetric, Hermitian };

/// Handle to a matrix variable. Symmetric n x n uses n(n+1)/2 scalars
/// (upper triangle, row-major); Hermitian uses n diagonal reals followed by
/// the real then imaginary parts of the strict upper triangle.
struct MatrixVar {
  MatrixKind kind = MatrixKind::Symmetric;
  int dim = 0;
  int offset = 0;
  int group = 0;
  std::string name;

  int num_scalars() const {
    return kind == MatrixKind::Symmetric ? dim * (dim + 1) / 2 : dim * dim;
  }
};

enum class Sense { GreaterEq, LessEq, Equal };

struct LinearConstraint {
  LinExpr expr;   // expr (sense) 0
  Sense sense = Sense::GreaterEq;
  std::string tag;
};

/// Symmetric affine matrix constrained to the PSD cone. Only the upper
/// triangle (i <= j) is stored and read.
struct LmiConstraint {
  ExprMatrix matrix;
  std::string tag;
};

struct VariableInfo {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
  int group = 0;  // scalars of one matrix variable share a group
};

struct ConstraintHandle {
  enum class Kind { Linear, Lmi } kind = Kind::Linear;
  int index = -1;
};

class ConicProgram {
 public:
  int add_scalar(const std::string& name, double lower = -kInf, double upper = kInf);
  MatrixVar add_symmetric(const std::string& name, int n, bool psd);
  MatrixVar add_hermitian(const std::string& name, int n, bool psd);

  /// Entry (i, j) of a symmetric variable.
  LinExpr entry(const MatrixVar& v, int i, int j) const;
  /// Entry (i, j) of a Hermitian variable.
  CLinExpr hentry(const MatrixVar& v, int i, int j) const;
  /// The whole variable as an expression matrix.
  ExprMatrix sym_expr(const MatrixVar& v) const;
  CExprMatrix herm_expr(const MatrixVar& v) const;
  /// tr(X) of either kind.
  LinExpr trace(const MatrixVar& v) const;
  /// Re tr(Q X) for a Hermitian variable X and complex Q.
  LinExpr re_trace_product(const MatrixVar& v, const CMat& Q) const;

  ConstraintHandle add_linear(LinExpr expr, Sense sense, const std::string& tag = {});
  ConstraintHandle add_lmi(ExprMatrix m, const std::string& tag = {});
  ConstraintHandle add_hermitian_lmi(const CExprMatrix& m, const std::string& tag = {});

  void set_objective(LinExpr objective) { objective_ = std::move(objective); }
  const LinExpr& objective() const { return objective_; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  const std::vector<VariableInfo>& variables() const { return vars_; }
  const std::vector<LinearConstraint>& linear_constraints() const { return linear_; }
  const std::vector<LmiConstraint>& lmi_constraints() const { return lmis_; }
  int num_groups() const { return next_group_; }

  /// Throws InvalidArgument if any expression references an undeclared variable.
  void validate() const;

  /// Dumps the program in SDPA sparse format (variables and objective as
  /// declared; bounds and linear rows become 1x1 blocks). Equalities are
  /// written as two opposite inequalities.
  std::string to_sdpa() const;

 private:
  void check_expr(const LinExpr& e, const char* where) const;

  std::vector<VariableInfo> vars_;
  std::vector<LinearConstraint> linear_;
  std::vector<LmiConstraint> lmis_;
  LinExpr objective_;
  int next_group_ = 0;
};

/// Value of an LMI expression at x (symmetrized from the upper triangle).
Mat evaluate(const ExprMatrix& m, const Vec& x);

/// Values of a solved program.
Mat sym_value(const MatrixVar& v, const Vec& x);
CMat herm_value(const MatrixVar& v, const Vec& x);
/// Inverse of sym_value / herm_value (upper triangle of m is used).
void set_sym_value(const MatrixVar& v, const Mat& m, Vec& x);
void set_herm_value(const MatrixVar& v, const CMat& m, Vec& x);

}  // namespace netisac::conic
