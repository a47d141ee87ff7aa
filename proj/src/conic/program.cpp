// SPDX-License-Identifier: Apache-2.0
#include "netisac/conic/program.hpp"

#include <algorithm>
#include <sstream>

namespace netisac::conic {

LinExpr LinExpr::variable(int index, double coef) {
  LinExpr e;
  e.terms_.push_back({index, coef});
  return e;
}

LinExpr& LinExpr::add_term(int var, double coef) {
  if (coef != 0.0) terms_.push_back({var, coef});
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  constant_ += o.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& t : o.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= o.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  for (auto& t : terms_) t.coef *= s;
  constant_ *= s;
  return *this;
}

void LinExpr::compress() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (!out.empty() && out.back().var == t.var)
      out.back().coef += t.coef;
    else
      out.push_back(t);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef == 0.0; }),
            out.end());
  terms_ = std::move(out);
}

double LinExpr::evaluate(const Vec& x) const {
  double v = constant_;
  for (const auto& t : terms_) v += t.coef * x(t.var);
  return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }

ExprMatrix embed_hermitian(const CExprMatrix& m) {
  const int n = m.dim();
  ExprMatrix e(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const CLinExpr& z = m(i, j);
      e(i, j) = z.re;
      e(n + i, n + j) = z.re;
      e(n + i, j) = z.im;
      e(i, n + j) = -z.im;
    }
  }
  return e;
}

int ConicProgram::add_scalar(const std::string& name, double lower, double upper) {
  if (lower > upper) throw InvalidArgument("add_scalar: empty box for " + name);
  vars_.push_back({name, lower, upper, next_group_++});
  return static_cast<int>(vars_.size()) - 1;
}

MatrixVar ConicProgram::add_symmetric(const std::string& name, int n, bool psd) {
  if (n < 1) throw InvalidArgument("add_symmetric: dimension must be positive");
  MatrixVar v{MatrixKind::Symmetric, n, num_variables(), next_group_++, name};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      vars_.push_back({name + "(" + std::to_string(i) + "," + std::to_string(j) + ")", -kInf, kInf,
                       v.group});
  if (psd) add_lmi(sym_expr(v), name + " psd");
  return v;
}

MatrixVar ConicProgram::add_hermitian(const std::string& name, int n, bool psd) {
  if (n < 1) throw InvalidArgument("add_hermitian: dimension must be positive");
  MatrixVar v{MatrixKind::Hermitian, n, num_variables(), next_group_++, name};
  for (int i = 0; i < n; ++i)
    vars_.push_back({name + ".d" + std::to_string(i), -kInf, kInf, v.group});
  for (int part = 0; part < 2; ++part)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        vars_.push_back({name + (part == 0 ? ".re" : ".im") + std::to_string(i) + "_" +
                             std::to_string(j),
                         -kInf, kInf, v.group});
  if (psd) add_hermitian_lmi(herm_expr(v), name + " psd");
  return v;
}

namespace {

int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // row-major upper triangle
  return i * n - i * (i - 1) / 2 + (j - i);
}

int offdiag_index(int n, int i, int j) {
  // position of (i, j), i < j, among the strict upper triangle (row-major)
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

LinExpr ConicProgram::entry(const MatrixVar& v, int i, int j) const {
  if (v.kind != MatrixKind::Symmetric) throw InvalidArgument("entry: not a symmetric variable");
  return LinExpr::variable(v.offset + sym_index(v.dim, i, j));
}

CLinExpr ConicProgram::hentry(const MatrixVar& v, int i, int j) const {
  if (v.kind != MatrixKind::Hermitian) throw InvalidArgument("hentry: not a Hermitian variable");
  const int n = v.dim;
  if (i == j) return {LinExpr::variable(v.offset + i), LinExpr()};
  const int npairs = n * (n - 1) / 2;
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  const int p = offdiag_index(n, lo, hi);
  const int re = v.offset + n + p;
  const int im = v.offset + n + npairs + p;
  // X(lo, hi) = re + j im, X(hi, lo) = re - j im
  return {LinExpr::variable(re), LinExpr::variable(im, i < j ? 1.0 : -1.0)};
}

ExprMatrix ConicProgram::sym_expr(const MatrixVar& v) const {
  ExprMatrix m(v.dim);
  for (int i = 0; i < v.dim; ++i)
    for (int j = 0; j < v.dim; ++j) m(i, j) = entry(v, i, j);
  return m;
}

CExprMatrix ConicProgram::herm_expr(const MatrixVar& v) const {
  CExprMatrix m(v.dim);
  for (int i = 0; i < v.dim; ++i)
    for (int j = 0; j < v.dim; ++j) m(i, j) = hentry(v, i, j);
  return m;
}

LinExpr ConicProgram::trace(const MatrixVar& v) const {
  LinExpr t;
  for (int i = 0; i < v.dim; ++i) {
    if (v.kind == MatrixKind::Symmetric)
      t += entry(v, i, i);
    else
      t.add_term(v.offset + i, 1.0);
  }
  return t;
}

LinExpr ConicProgram::re_trace_product(const MatrixVar& v, const CMat& Q) const {
  if (v.kind != MatrixKind::Hermitian) throw InvalidArgument("re_trace_product: not Hermitian");
  const int n = v.dim;
  if (Q.rows() != n || Q.cols() != n) throw InvalidArgument("re_trace_product: dimension mismatch");
  const int npairs = n * (n - 1) / 2;
  LinExpr e;
  for (int i = 0; i < n; ++i) e.add_term(v.offset + i, Q(i, i).real());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // Re(Q_ji X_ij + Q_ij X_ji) with X_ij = u + j w
      const int p = offdiag_index(n, i, j);
      e.add_term(v.offset + n + p, Q(j, i).real() + Q(i, j).real());
      e.add_term(v.offset + n + npairs + p, Q(i, j).imag() - Q(j, i).imag());
    }
  }
  return e;
}

void ConicProgram::check_expr(const LinExpr& e, const char* where) const {
  for (const auto& t : e.terms())
    if (t.var < 0 || t.var >= num_variables())
      throw InvalidArgument(std::string(where) + ": reference to undeclared variable " +
                            std::to_string(t.var));
}

ConstraintHandle ConicProgram::add_linear(LinExpr expr, Sense sense, const std::string& tag) {
  check_expr(expr, "add_linear");
  expr.compress();
  linear_.push_back({std::move(expr), sense, tag});
  return {ConstraintHandle::Kind::Linear, static_cast<int>(linear_.size()) - 1};
}

ConstraintHandle ConicProgram::add_lmi(ExprMatrix m, const std::string& tag) {
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i; j < m.dim(); ++j) {
      check_expr(m(i, j), "add_lmi");
      m(i, j).compress();
    }
  lmis_.push_back({std::move(m), tag});
  return {ConstraintHandle::Kind::Lmi, static_cast<int>(lmis_.size()) - 1};
}

ConstraintHandle ConicProgram::add_hermitian_lmi(const CExprMatrix& m, const std::string& tag) {
  return add_lmi(embed_hermitian(m), tag);
}

void ConicProgram::validate() const {
  check_expr(objective_, "objective");
  for (const auto& c : linear_) check_expr(c.expr, "linear constraint");
  for (const auto& c : lmis_)
    for (int i = 0; i < c.matrix.dim(); ++i)
      for (int j = i; j < c.matrix.dim(); ++j) check_expr(c.matrix(i, j), "lmi");
}

std::string ConicProgram::to_sdpa() const {
  // SDPA: min c^T x  s.t.  sum_i x_i F_i - F_0 >= 0 (block diagonal).
  struct Row {
    LinExpr e;
  };
  std::vector<LinExpr> scalar_rows;
  for (int i = 0; i < num_variables(); ++i) {
    if (vars_[i].lower > -kInf) scalar_rows.push_back(LinExpr::variable(i) - LinExpr(vars_[i].lower));
    if (vars_[i].upper < kInf) scalar_rows.push_back(LinExpr(vars_[i].upper) - LinExpr::variable(i));
  }
  for (const auto& c : linear_) {
    if (c.sense != Sense::LessEq) scalar_rows.push_back(c.expr);
    if (c.sense != Sense::GreaterEq) scalar_rows.push_back(-c.expr);
  }
  std::ostringstream os;
  os.precision(17);
  os << "\"netisac conic program\"\n";
  os << num_variables() << " = mDIM\n";
  const int nblocks = static_cast<int>(lmis_.size()) + (scalar_rows.empty() ? 0 : 1);
  os << nblocks << " = nBLOCK\n";
  for (const auto& l : lmis_) os << l.matrix.dim() << ' ';
  if (!scalar_rows.empty()) os << -static_cast<int>(scalar_rows.size());
  os << " = bLOCKsTRUCT\n";
  Vec c = Vec::Zero(num_variables());
  for (const auto& t : objective_.terms()) c(t.var) += t.coef;
  for (int i = 0; i < num_variables(); ++i) os << c(i) << (i + 1 < num_variables() ? ' ' : '\n');
  if (num_variables() == 0) os << '\n';
  auto emit = [&os](int mat, int blk, int i, int j, double v) {
    if (v != 0.0) os << mat << ' ' << blk << ' ' << i << ' ' << j << ' ' << v << '\n';
  };
  int blk = 1;
  for (const auto& l : lmis_) {
    for (int i = 0; i < l.matrix.dim(); ++i)
      for (int j = i; j < l.matrix.dim(); ++j) {
        const LinExpr& e = l.matrix(i, j);
        emit(0, blk, i + 1, j + 1, -e.constant());
        for (const auto& t : e.terms()) emit(t.var + 1, blk, i + 1, j + 1, t.coef);
      }
    ++blk;
  }
  for (std::size_t r = 0; r < scalar_rows.size(); ++r) {
    LinExpr e = scalar_rows[r];
    e.compress();
    const int idx = static_cast<int>(r) + 1;
    emit(0, blk, idx, idx, -e.constant());
    for (const auto& t : e.terms()) emit(t.var + 1, blk, idx, idx, t.coef);
  }
  return os.str();
}

Mat evaluate(const ExprMatrix& m, const Vec& x) {
  const int n = m.dim();
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out(i, j) = out(j, i) = m(i, j).evaluate(x);
  return out;
}

Mat sym_value(const MatrixVar& v, const Vec& x) {
  const int n = v.dim;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = x(v.offset + sym_index(n, i, j));
  return m;
}

CMat herm_value(const MatrixVar& v, const Vec& x) {
  const int n = v.dim;
  const int npairs = n * (n - 1) / 2;
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = x(v.offset + i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int p = offdiag_index(n, i, j);
      const cd z(x(v.offset + n + p), x(v.offset + n + npairs + p));
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  return m;
}

void set_sym_value(const MatrixVar& v, const Mat& m, Vec& x) {
  const int n = v.dim;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) x(v.offset + sym_index(n, i, j)) = m(i, j);
}

void set_herm_value(const MatrixVar& v, const CMat& m, Vec& x) {
  const int n = v.dim;
  const int npairs = n * (n - 1) / 2;
  for (int i = 0; i < n; ++i) x(v.offset + i) = m(i, i).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int p = offdiag_index(n, i, j);
      x(v.offset + n + p) = m(i, j).real();
      x(v.offset + n + npairs + p) = m(i, j).imag();
    }
}

}  // namespace netisac::conic
