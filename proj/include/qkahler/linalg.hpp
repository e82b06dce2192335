#pragma once

#include "qkahler/scalar.hpp"

#include <optional>
#include <vector>

namespace qk {

// Pivot policy: exact fields test equality with zero; the approximate field
// compares against tol * scale, where scale is the largest magnitude seen in
// the matrix. A rejected pivot candidate within 10x of the threshold sets the
// ambiguous flag (precision-loss report).
template <class F>
struct PivotPolicy {
  F tol{};            // ignored in exact mode
  mutable bool ambiguous = false;

  static PivotPolicy exact() { return PivotPolicy{}; }
  static PivotPolicy with_tol(F t) { return PivotPolicy{std::move(t), false}; }

  bool negligible(const F& mag, const F& scale) const {
    if constexpr (FieldOps<F>::mode == Mode::Exact) {
      (void)scale;
      return FieldOps<F>::is_zero(mag);
    } else {
      F cut = tol * (FieldOps<F>::is_zero(scale) ? F(1) : scale);
      if (mag <= cut) {
        if (mag * F(10) > cut) ambiguous = true;
        return true;
      }
      if (mag <= cut * F(10)) ambiguous = true;
      return false;
    }
  }
};

template <class F>
using Vec = std::vector<Cx<F>>;

template <class F>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Cx<F>::one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Cx<F>& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const Cx<F>& operator()(std::size_t r, std::size_t c) const {
    return a_[r * cols_ + c];
  }

  Matrix operator+(const Matrix& o) const {
    check_same_shape(o);
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
    return m;
  }
  Matrix operator-(const Matrix& o) const {
    check_same_shape(o);
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
    return m;
  }
  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_)
      throw Error(ErrorKind::ShapeMismatch, "matrix product shape mismatch");
    Matrix m(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Cx<F>& x = (*this)(i, k);
        if (x.is_zero()) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += x * o(k, j);
      }
    return m;
  }
  Matrix operator*(const Cx<F>& s) const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * s;
    return m;
  }
  Vec<F> apply(const Vec<F>& v) const {
    if (v.size() != cols_)
      throw Error(ErrorKind::ShapeMismatch, "matrix apply shape mismatch");
    Vec<F> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }
  Matrix dagger() const {  // conjugate transpose
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j).conj();
    return m;
  }
  Matrix conj_entries() const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i].conj();
    return m;
  }
  bool is_zero() const {
    for (const auto& x : a_)
      if (!x.is_zero()) return false;
    return true;
  }
  F max_abs() const {
    F m{};
    for (const auto& x : a_) {
      F v = x.mag();
      if (m < v) m = v;
    }
    return m;
  }
  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorKind::ShapeMismatch, "matrix shape mismatch");
  }
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Cx<F>> a_;
};

namespace detail {

// Row echelon with deterministic (lexicographically first) pivot choice.
// Returns pivot columns; transforms m in place to reduced row echelon form.
template <class F>
std::vector<std::size_t> rref(Matrix<F>& m, const PivotPolicy<F>& pp) {
  F scale = m.max_abs();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::optional<std::size_t> prow;
    if constexpr (FieldOps<F>::mode == Mode::Exact) {
      for (std::size_t rr = r; rr < m.rows(); ++rr)
        if (!m(rr, c).is_zero()) { prow = rr; break; }
    } else {
      // largest magnitude for stability, ties to the first row
      F best{};
      for (std::size_t rr = r; rr < m.rows(); ++rr) {
        F v = m(rr, c).mag();
        if (!pp.negligible(v, scale) && v > best) { best = v; prow = rr; }
      }
    }
    if (!prow) continue;
    if (*prow != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(*prow, j));
    Cx<F> pv = m(r, c);
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = m(r, j) / pv;
    for (std::size_t rr = 0; rr < m.rows(); ++rr) {
      if (rr == r || m(rr, c).is_zero()) continue;
      Cx<F> f = m(rr, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(rr, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

template <class F>
std::size_t rank(const Matrix<F>& m, const PivotPolicy<F>& pp = PivotPolicy<F>::exact()) {
  Matrix<F> w = m;
  return detail::rref(w, pp).size();
}

// Basis of ker(m); count = cols - rank. Deterministic basis: one vector per
// free column, unit coefficient there, lexicographic order.
template <class F>
std::vector<Vec<F>> kernel_basis(const Matrix<F>& m,
                                 const PivotPolicy<F>& pp = PivotPolicy<F>::exact()) {
  Matrix<F> w = m;
  auto pivots = detail::rref(w, pp);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<Vec<F>> basis;
  for (std::size_t fc = 0; fc < m.cols(); ++fc) {
    if (is_pivot[fc]) continue;
    Vec<F> v(m.cols());
    v[fc] = Cx<F>::one();
    for (std::size_t ri = 0; ri < pivots.size(); ++ri)
      v[pivots[ri]] = -w(ri, fc);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solve m x = b; nullopt if inconsistent.
template <class F>
std::optional<Vec<F>> solve(const Matrix<F>& m, const Vec<F>& b,
                            const PivotPolicy<F>& pp = PivotPolicy<F>::exact()) {
  if (b.size() != m.rows())
    throw Error(ErrorKind::ShapeMismatch, "solve shape mismatch");
  Matrix<F> w(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
    w(i, m.cols()) = b[i];
  }
  auto pivots = detail::rref(w, pp);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  Vec<F> x(m.cols());
  for (std::size_t ri = 0; ri < pivots.size(); ++ri) x[pivots[ri]] = w(ri, m.cols());
  return x;
}

template <class F>
Matrix<F> inverse(const Matrix<F>& m, const PivotPolicy<F>& pp = PivotPolicy<F>::exact()) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::ShapeMismatch, "inverse of non-square matrix");
  std::size_t n = m.rows();
  Matrix<F> w(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w(i, j) = m(i, j);
    w(i, n + i) = Cx<F>::one();
  }
  auto pivots = detail::rref(w, pp);
  if (pivots.size() != n || pivots.back() != n - 1)
    throw Error(ErrorKind::ShapeMismatch, "singular matrix");
  Matrix<F> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = w(i, n + j);
  return inv;
}

// <x,y> = sum_{ij} x_i conj(y_j) G(i,j): sesquilinear, linear in the first slot.
template <class F>
Cx<F> form_value(const Matrix<F>& gram, const Vec<F>& x, const Vec<F>& y) {
  if (x.size() != gram.rows() || y.size() != gram.cols())
    throw Error(ErrorKind::ShapeMismatch, "form shape mismatch");
  Cx<F> acc;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_zero()) continue;
    for (std::size_t j = 0; j < y.size(); ++j)
      acc += x[i] * y[j].conj() * gram(i, j);
  }
  return acc;
}

// Gram-Schmidt against a sesquilinear form; throws NotPositiveDefinite when a
// nonzero vector has <v,v> <= 0. Span is preserved, zero remainders dropped.
template <class F>
std::vector<Vec<F>> gram_schmidt(const std::vector<Vec<F>>& vectors,
                                 const Matrix<F>& gram,
                                 const PivotPolicy<F>& pp = PivotPolicy<F>::exact()) {
  std::vector<Vec<F>> out;
  F scale = gram.max_abs();
  for (const auto& v0 : vectors) {
    Vec<F> v = v0;
    for (const auto& u : out) {
      Cx<F> c = form_value(gram, v, u) / form_value(gram, u, u);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
    }
    bool zero = true;
    for (const auto& x : v)
      if (!pp.negligible(x.mag(), scale)) { zero = false; break; }
    if (zero) continue;
    Cx<F> sq = form_value(gram, v, v);
    if (!FieldOps<F>::is_zero(sq.im) && FieldOps<F>::mode == Mode::Exact)
      throw Error(ErrorKind::NotPositiveDefinite, "form not hermitian on input");
    if (sq.re <= F(0))
      throw Error(ErrorKind::NotPositiveDefinite, "<v,v> <= 0 in gram_schmidt");
    out.push_back(std::move(v));
  }
  return out;
}

// Hermitian positive-definiteness. Exact mode: leading principal minors all
// positive. Approx mode: LDL^H with positive diagonal (no eigenvalues).
template <class F>
bool is_positive_definite(const Matrix<F>& g,
                          const PivotPolicy<F>& pp = PivotPolicy<F>::exact()) {
  if (g.rows() != g.cols())
    throw Error(ErrorKind::ShapeMismatch, "posdef of non-square matrix");
  std::size_t n = g.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g(i, j) != g(j, i).conj()) return false;
  if (n == 0) return true;
  if constexpr (FieldOps<F>::mode == Mode::Exact) {
    for (std::size_t k = 1; k <= n; ++k) {
      Matrix<F> lead(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) lead(i, j) = g(i, j);
      // determinant by elimination
      Cx<F> det = Cx<F>::one();
      auto w = lead;
      for (std::size_t c = 0; c < k; ++c) {
        std::optional<std::size_t> prow;
        for (std::size_t r = c; r < k; ++r)
          if (!w(r, c).is_zero()) { prow = r; break; }
        if (!prow) { det = Cx<F>::zero(); break; }
        if (*prow != c) {
          for (std::size_t j = 0; j < k; ++j) std::swap(w(c, j), w(*prow, j));
          det = -det;
        }
        det *= w(c, c);
        for (std::size_t r = c + 1; r < k; ++r) {
          Cx<F> f = w(r, c) / w(c, c);
          for (std::size_t j = c; j < k; ++j) w(r, j) -= f * w(c, j);
        }
      }
      if (!FieldOps<F>::is_zero(det.im) || det.re <= F(0)) return false;
    }
    return true;
  } else {
    // Hermitian elimination: trailing blocks stay hermitian, pivots must be
    // positive (equivalent to a Cholesky factorization succeeding).
    Matrix<F> w = g;
    F scale = g.max_abs();
    for (std::size_t c = 0; c < n; ++c) {
      Cx<F> d = w(c, c);
      if (!(d.re > F(0)) || pp.negligible(d.mag(), scale)) return false;
      for (std::size_t r = c + 1; r < n; ++r) {
        Cx<F> f = w(r, c) / d;
        for (std::size_t j = c; j < n; ++j) w(r, j) -= f * w(c, j);
      }
    }
    return true;
  }
}

}  // namespace qk
