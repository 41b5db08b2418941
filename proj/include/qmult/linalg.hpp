#pragma once

#include <optional>
#include <vector>

#include "qmult/field.hpp"

// Exact dense linear algebra over a field scalar K (Rat or Fp). Pivoting is
// first-nonzero; there is no magnitude over an exact field.

namespace qmult {

template <class K>
K k_one();
template <>
inline Rat k_one<Rat>() { return Rat(1); }
template <>
inline Fp k_one<Fp>() { return Fp(1); }  // wildcard unit, adopts p on use

/// In-place reduced row echelon form. Returns the rank; pivot column indices
/// go to `pivots` if given.
template <class K>
int rref(Mat<K>& A, std::vector<int>* pivots = nullptr) {
  const Eigen::Index rows = A.rows(), cols = A.cols();
  int rank = 0;
  for (Eigen::Index col = 0; col < cols && rank < rows; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = rank; r < rows; ++r)
      if (!A(r, col).is_zero()) { piv = r; break; }
    if (piv < 0) continue;
    if (piv != rank) A.row(piv).swap(A.row(rank));
    K inv = A(rank, col).inv();
    for (Eigen::Index c = col; c < cols; ++c) A(rank, c) = A(rank, c) * inv;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r == rank || A(r, col).is_zero()) continue;
      K f = A(r, col);
      for (Eigen::Index c = col; c < cols; ++c) A(r, c) = A(r, c) - f * A(rank, c);
    }
    if (pivots) pivots->push_back(static_cast<int>(col));
    ++rank;
  }
  return rank;
}

template <class K>
int rank_of(Mat<K> A) {
  return rref(A);
}

/// Columns span the right kernel of A.
template <class K>
Mat<K> kernel_basis(Mat<K> A) {
  std::vector<int> pivots;
  int rank = rref(A, &pivots);
  const Eigen::Index n = A.cols();
  std::vector<bool> is_pivot(n, false);
  for (int c : pivots) is_pivot[c] = true;
  Mat<K> ker = zeros<K>(n, n - rank);
  Eigen::Index kcol = 0;
  for (Eigen::Index free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    ker(free, kcol) = k_one<K>();
    for (int r = 0; r < rank; ++r) ker(pivots[r], kcol) = -A(r, free);
    ++kcol;
  }
  return ker;
}

/// One solution of A x = b, if any.
template <class K>
std::optional<Vec<K>> solve_linear(const Mat<K>& A, const Vec<K>& b) {
  const Eigen::Index rows = A.rows(), cols = A.cols();
  Mat<K> aug = zeros<K>(rows, cols + 1);
  aug.block(0, 0, rows, cols) = A;
  aug.col(cols) = b;
  std::vector<int> pivots;
  int rank = rref(aug, &pivots);
  for (int i = 0; i < rank; ++i)
    if (pivots[i] == cols) return std::nullopt;
  Vec<K> x = zeros<K>(cols, 1);
  for (int i = 0; i < rank; ++i) x(pivots[i]) = aug(i, cols);
  return x;
}

template <class K>
std::optional<Mat<K>> inverse_of(const Mat<K>& A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) return std::nullopt;
  if (n == 0) return zeros<K>(0, 0);
  Mat<K> aug = zeros<K>(n, 2 * n);
  aug.block(0, 0, n, n) = A;
  for (Eigen::Index i = 0; i < n; ++i) aug(i, n + i) = k_one<K>();
  std::vector<int> pivots;
  rref(aug, &pivots);
  // all n pivots must land in the left block
  if (static_cast<Eigen::Index>(pivots.size()) < n || pivots[n - 1] >= n) return std::nullopt;
  return Mat<K>(aug.block(0, n, n, n));
}

/// Column span in reduced column echelon form: pivot rows carry exact ones,
/// are zero elsewhere in their row, and increase along columns. Two spans are
/// equal iff their canonical bases are equal entrywise.
template <class K>
struct Subspace {
  Mat<K> basis;             // ambient_dim x dim, canonical
  std::vector<int> pivots;  // pivot row per column

  Subspace() : basis(zeros<K>(0, 0)) {}

  Eigen::Index ambient() const { return basis.rows(); }
  Eigen::Index dim() const { return basis.cols(); }

  static Subspace span(const Mat<K>& cols) {
    Mat<K> t = cols.transpose();
    std::vector<int> piv;
    int rank = rref(t, &piv);
    Subspace s;
    s.basis = zeros<K>(cols.rows(), rank);
    for (int j = 0; j < rank; ++j)
      for (Eigen::Index i = 0; i < cols.rows(); ++i) s.basis(i, j) = t(j, i);
    s.pivots = piv;
    return s;
  }

  bool contains(const Vec<K>& v) const {
    Vec<K> w = v;
    for (Eigen::Index j = 0; j < dim(); ++j) {
      K c = w(pivots[j]);
      if (!c.is_zero()) w -= basis.col(j) * c;
    }
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (!w(i).is_zero()) return false;
    return true;
  }

  bool contains_cols(const Mat<K>& m) const {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!contains(Vec<K>(m.col(j)))) return false;
    return true;
  }

  bool contains_space(const Subspace& o) const { return contains_cols(o.basis); }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    if (a.dim() != b.dim() || a.ambient() != b.ambient()) return false;
    for (Eigen::Index j = 0; j < a.dim(); ++j)
      for (Eigen::Index i = 0; i < a.ambient(); ++i)
        if (a.basis(i, j) != b.basis(i, j)) return false;
    return true;
  }

  static Subspace zero(Eigen::Index n) {
    Subspace s;
    s.basis = zeros<K>(n, 0);
    return s;
  }

  static Subspace full(Eigen::Index n) {
    Subspace s;
    s.basis = zeros<K>(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      s.basis(i, i) = k_one<K>();
      s.pivots.push_back(static_cast<int>(i));
    }
    return s;
  }

  static Subspace sum(const Subspace& a, const Subspace& b) {
    Mat<K> cols = zeros<K>(a.ambient(), a.dim() + b.dim());
    cols.block(0, 0, a.ambient(), a.dim()) = a.basis;
    cols.block(0, a.dim(), a.ambient(), b.dim()) = b.basis;
    return span(cols);
  }

  static Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.dim() == 0 || b.dim() == 0) return zero(a.ambient());
    Mat<K> glued = zeros<K>(a.ambient(), a.dim() + b.dim());
    glued.block(0, 0, a.ambient(), a.dim()) = a.basis;
    glued.block(0, a.dim(), a.ambient(), b.dim()) = b.basis;
    Mat<K> ker = kernel_basis(glued);
    Mat<K> coeffs = ker.block(0, 0, a.dim(), ker.cols());
    return span(Mat<K>(a.basis * coeffs));
  }

  /// Image under a linear map.
  Subspace apply(const Mat<K>& A) const { return span(Mat<K>(A * basis)); }

  /// {v : A v in target}.
  static Subspace preimage(const Mat<K>& A, const Subspace& target) {
    Mat<K> resid = A;
    for (Eigen::Index col = 0; col < resid.cols(); ++col) {
      for (Eigen::Index j = 0; j < target.dim(); ++j) {
        K c = resid(target.pivots[j], col);
        if (!c.is_zero()) resid.col(col) -= target.basis.col(j) * c;
      }
    }
    return span(kernel_basis(resid));
  }
};

/// All subspaces of F_q^n as canonical column-echelon bases (Galois-number
/// many; callers guard n and q).
inline std::vector<Subspace<Fp>> enumerate_subspaces(int n, std::uint32_t q) {
  FieldCtx<Fp> F{q};
  std::vector<Subspace<Fp>> out;
  for (int d = 0; d <= n; ++d) {
    std::vector<int> piv(d);
    for (int i = 0; i < d; ++i) piv[i] = i;
    while (true) {
      std::vector<std::pair<int, int>> free_pos;
      std::vector<bool> is_piv(n, false);
      for (int c = 0; c < d; ++c) is_piv[piv[c]] = true;
      for (int c = 0; c < d; ++c)
        for (int r = piv[c] + 1; r < n; ++r)
          if (!is_piv[r]) free_pos.emplace_back(r, c);
      std::vector<std::uint32_t> digits(free_pos.size(), 0);
      while (true) {
        Subspace<Fp> s;
        s.basis = zeros<Fp>(n, d);
        for (int c = 0; c < d; ++c) s.basis(piv[c], c) = F.from_int(1);
        for (std::size_t k = 0; k < free_pos.size(); ++k)
          s.basis(free_pos[k].first, free_pos[k].second) = F.element(digits[k]);
        s.pivots = piv;
        out.push_back(std::move(s));
        std::size_t idx = 0;
        for (; idx < digits.size(); ++idx) {
          if (++digits[idx] < q) break;
          digits[idx] = 0;
        }
        if (idx == digits.size()) break;
      }
      int i = d - 1;
      while (i >= 0 && piv[i] == n - d + i) --i;
      if (i < 0) break;
      ++piv[i];
      for (int j = i + 1; j < d; ++j) piv[j] = piv[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace qmult
