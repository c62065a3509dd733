#pragma once

// Ground-truth dense routines used to cross-check the structured fast paths
// and to serve as the fallback for degenerate shapes. Deliberately naive and
// coded separately from the production elimination in dense.hpp: determinants
// via Bareiss condensation, inverses via triangularization followed by
// back-substitution, and matrix construction straight from the banded entry
// rule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ringband/dense.hpp"
#include "ringband/errors.hpp"
#include "ringband/field.hpp"

namespace ringband {

namespace detail {

template <FieldDesc F>
std::size_t oracle_pick_pivot(const DenseMatrix<F>& m, std::size_t col,
                              std::size_t start) {
  const std::size_t n = m.rows();
  if (elimination_pivot_policy(m.field()) == PivotPolicy::kPartialAbs) {
    std::size_t best = start;
    for (std::size_t r = start + 1; r < n; ++r)
      if (pivot_weight(m(r, col)) > pivot_weight(m(best, col))) best = r;
    return best;
  }
  std::size_t r = start;
  while (r < n && m(r, col).is_zero()) ++r;
  return r;  // == n when the column is dead
}

}  // namespace detail

// Bareiss fraction-free condensation; returns the field zero when singular.
template <FieldDesc F>
typename F::Value dense_det(DenseMatrix<F> m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("determinant needs a square matrix");
  const F& fld = m.field();
  const std::size_t n = m.rows();
  if (n == 0) return fld.one();
  bool negate = false;
  typename F::Value prev = fld.one();
  for (std::size_t t = 0; t + 1 < n; ++t) {
    std::size_t pivot = detail::oracle_pick_pivot(m, t, t);
    if (pivot >= n || m(pivot, t).is_zero()) return fld.zero();
    if (pivot != t) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(pivot, j), m(t, j));
      negate = !negate;
    }
    for (std::size_t i = t + 1; i < n; ++i) {
      for (std::size_t j = t + 1; j < n; ++j)
        m(i, j) = (m(t, t) * m(i, j) - m(i, t) * m(t, j)) / prev;
      m(i, t) = fld.zero();
    }
    prev = m(t, t);
  }
  typename F::Value det = m(n - 1, n - 1);
  return negate ? -det : det;
}

// Inverse by forward elimination to a triangle, then back-substitution over
// an explicit [M | I] augment. Absent exactly when the matrix is singular.
template <FieldDesc F>
std::optional<DenseMatrix<F>> dense_inverse(const DenseMatrix<F>& m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("inverse needs a square matrix");
  const F& fld = m.field();
  const std::size_t n = m.rows();
  DenseMatrix<F> aug(fld, n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    aug(r, n + r) = fld.one();
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = detail::oracle_pick_pivot(aug, col, col);
    if (pivot >= n || aug(pivot, col).is_zero()) return std::nullopt;
    if (pivot != col)
      for (std::size_t j = 0; j < 2 * n; ++j)
        std::swap(aug(pivot, j), aug(col, j));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (aug(r, col).is_zero()) continue;
      const typename F::Value f = aug(r, col) / aug(col, col);
      for (std::size_t j = col; j < 2 * n; ++j)
        aug(r, j) = aug(r, j) - f * aug(col, j);
    }
  }
  for (std::size_t colp = n; colp > 0; --colp) {
    const std::size_t col = colp - 1;
    const typename F::Value pinv = aug(col, col).inv();
    for (std::size_t j = col; j < 2 * n; ++j)
      aug(col, j) = aug(col, j) * pinv;
    for (std::size_t r = 0; r < col; ++r) {
      if (aug(r, col).is_zero()) continue;
      const typename F::Value f = aug(r, col);
      for (std::size_t j = col; j < 2 * n; ++j)
        aug(r, j) = aug(r, j) - f * aug(col, j);
    }
  }

  DenseMatrix<F> out(fld, n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = aug(r, n + c);
  return out;
}

// Dense build straight from the entry rule: with 1-based indices, entry
// (r, c) holds stencil slot j exactly when c == r + j - alignment (mod n).
template <FieldDesc F>
DenseMatrix<F> dense_build_banded(
    const F& fld, const std::vector<std::vector<typename F::Value>>& rows,
    std::size_t alignment) {
  const std::size_t n = rows.size();
  DenseMatrix<F> m(fld, n, n);
  for (std::size_t r = 1; r <= n; ++r) {
    const std::size_t k = rows[r - 1].size();
    for (std::size_t c = 1; c <= n; ++c) {
      const long long raw = static_cast<long long>(c) -
                            static_cast<long long>(r) +
                            static_cast<long long>(alignment) - 1;
      const long long nn = static_cast<long long>(n);
      const std::size_t j = static_cast<std::size_t>((raw % nn + nn) % nn) + 1;
      if (j <= k) m(r - 1, c - 1) = rows[r - 1][j - 1];
    }
  }
  return m;
}

template <FieldDesc F>
DenseMatrix<F> dense_build_circulant(const F& fld,
                                     const std::vector<typename F::Value>& x,
                                     std::size_t n, std::size_t alignment) {
  return dense_build_banded(
      fld, std::vector<std::vector<typename F::Value>>(n, x), alignment);
}

}  // namespace ringband
