#pragma once

// k-diagonal cyclic banded matrices with per-row stencils: determinant via an
// ordered transfer-matrix product plus a small Schur complement, and inverse
// via cofactor seeds, a column recurrence for the first k-1 columns, and a
// row recurrence for the rest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ringband/counters.hpp"
#include "ringband/dense.hpp"
#include "ringband/errors.hpp"
#include "ringband/field.hpp"
#include "ringband/oracle.hpp"

namespace ringband {

template <FieldDesc F>
class CyclicBandedMatrix {
 public:
  using Value = typename F::Value;

  CyclicBandedMatrix(F field, std::size_t n,
                     std::vector<std::vector<Value>> rows,
                     std::size_t alignment)
      : field_(std::move(field)),
        n_(n),
        alignment_(alignment),
        rows_(std::move(rows)) {
    if (rows_.size() != n_)
      throw ValueError("expected " + std::to_string(n_) +
                       " row stencils, got " + std::to_string(rows_.size()));
    if (n_ == 0) throw ValueError("order must be positive");
    const std::size_t k = rows_[0].size();
    if (k < 1) throw ValueError("stencils must hold at least one value");
    if (n_ < k)
      throw ValueError("order " + std::to_string(n_) +
                       " smaller than band width " + std::to_string(k) +
                       "; the band would collide with itself");
    if (alignment_ < 1 || alignment_ > k)
      throw ValueError("alignment " + std::to_string(alignment_) +
                       " outside [1, " + std::to_string(k) + "]");
    for (std::size_t r = 0; r < n_; ++r) {
      if (rows_[r].size() != k)
        throw ValueError("row " + std::to_string(r + 1) + " has " +
                         std::to_string(rows_[r].size()) +
                         " values, expected " + std::to_string(k));
      if (rows_[r].back().is_zero())
        throw ValueError("trailing stencil value x_k of row " +
                         std::to_string(r + 1) + " must be nonzero");
    }
  }

  const F& field() const { return field_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return rows_[0].size(); }
  std::size_t alignment() const { return alignment_; }
  const std::vector<std::vector<Value>>& rows() const { return rows_; }

  // Row stencil by 1-based index, wrapped modulo n.
  const std::vector<Value>& row_stencil(std::size_t i) const {
    return rows_[(i - 1) % n_];
  }
  // x^{(i)}_j, 1-based in both positions, superscript wrapped modulo n.
  const Value& x(std::size_t i, std::size_t j) const {
    return rows_[(i - 1) % n_][j - 1];
  }

 private:
  F field_;
  std::size_t n_;
  std::size_t alignment_;
  std::vector<std::vector<Value>> rows_;
};

// Full n-by-n inverse; fallback records that a dense computation stood in
// for the structured path.
template <FieldDesc F>
struct InverseMatrix {
  std::size_t n = 0;
  DenseMatrix<F> entries;
  bool fallback = false;
};

// Ordered product of transfer matrices over a cyclic index window, together
// with the running product of the trailing stencil values on that window.
template <FieldDesc F>
struct TransferWindow {
  DenseMatrix<F> product;      // T_end * ... * T_start
  typename F::Value scalar;    // prod of x_k^{(p)} for p in [start, end]
  std::size_t start = 0;
  std::size_t end = 0;         // inclusive; empty window when end < start
};

template <FieldDesc F>
struct CbmDetResult {
  typename F::Value det;
  bool fallback = false;
};

template <FieldDesc F>
DenseMatrix<F> cbm_to_dense(const CyclicBandedMatrix<F>& m) {
  DenseMatrix<F> out(m.field(), m.n(), m.n());
  const std::size_t n = m.n();
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t j = 1; j <= m.k(); ++j) {
      const std::size_t c =
          mod_index(static_cast<long long>(r + j) -
                        static_cast<long long>(m.alignment()) - 1,
                    n);
      out(r - 1, c) = m.x(r, j);
    }
  return out;
}

// Band-structured product M*v in k*n field operations.
template <FieldDesc F>
std::vector<typename F::Value> cbm_matvec(
    const CyclicBandedMatrix<F>& m, const std::vector<typename F::Value>& v) {
  if (v.size() != m.n()) throw DimensionMismatch("vector length must be n");
  const std::size_t n = m.n();
  std::vector<typename F::Value> out(n, m.field().zero());
  for (std::size_t r = 0; r < n; ++r) {
    typename F::Value acc = m.field().zero();
    for (std::size_t j = 1; j <= m.k(); ++j) {
      const std::size_t c =
          mod_index(static_cast<long long>(r + j) -
                        static_cast<long long>(m.alignment()),
                    n);
      acc = acc + m.x(r + 1, j) * v[c];
    }
    out[r] = acc;
  }
  return out;
}

// Transfer matrix T_p: first column -x^{(p+r)}_{k-r} / x^{(p)}_k, ones on
// the superdiagonal. It is singular exactly when x^{(p+k-1)}_1 = 0.
template <FieldDesc F>
DenseMatrix<F> cbm_transfer_matrix(const CyclicBandedMatrix<F>& m,
                                   std::size_t p) {
  const std::size_t k = m.k();
  const std::size_t km = k - 1;
  DenseMatrix<F> t(m.field(), km, km);
  for (std::size_t r = 1; r <= km; ++r) {
    t(r - 1, 0) = -(m.x(p + r, k - r) / m.x(p, k));
    if (r < km) t(r - 1, r) = m.field().one();
  }
  return t;
}

namespace detail {

// Ordered product T_{hi} * ... * T_{lo} built by successive left-multiplies.
template <FieldDesc F>
DenseMatrix<F> cbm_window_product_naive(const CyclicBandedMatrix<F>& m,
                                        std::size_t lo, std::size_t hi) {
  DenseMatrix<F> w = DenseMatrix<F>::identity(m.field(), m.k() - 1);
  for (std::size_t p = lo; p <= hi && hi >= lo; ++p)
    w = mat_mul(cbm_transfer_matrix(m, p), w);
  return w;
}

}  // namespace detail

// The k-1 cyclic windows W_j = T_{m+j} * ... * T_{j+1}, m = n-2k+2, used by
// the inverse seeds. Successive windows are updated incrementally as
// W_{j+1} = T_{m+j+1} * W_j * T_{j+1}^{-1} whenever T_{j+1} is invertible,
// probed through its closed-form determinant; otherwise that window is
// recomputed from scratch.
template <FieldDesc F>
std::vector<TransferWindow<F>> cbm_transfer_windows(
    const CyclicBandedMatrix<F>& m) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();
  if (k < 2) return {};
  if (n < 2 * k - 2)
    throw ValueError("transfer windows require n >= 2k-2");
  const std::size_t mm = n - 2 * k + 2;

  std::vector<TransferWindow<F>> windows;
  windows.reserve(k - 1);

  auto window_scalar = [&](std::size_t lo, std::size_t hi) {
    typename F::Value s = fld.one();
    for (std::size_t p = lo; p <= hi && hi >= lo; ++p) s = s * m.x(p, k);
    return s;
  };

  DenseMatrix<F> w =
      mm == 0 ? DenseMatrix<F>::identity(fld, k - 1)
              : detail::cbm_window_product_naive(m, 2, mm + 1);
  typename F::Value scalar =
      mm == 0 ? fld.one() : window_scalar(2, mm + 1);
  windows.push_back(TransferWindow<F>{w, scalar, 2, mm + 1});

  for (std::size_t j = 2; j <= k - 1; ++j) {
    // Window j spans p in [j+1, mm+j].
    scalar = scalar * m.x(mm + j, k) / m.x(j, k);
    if (!m.x(j + k - 1, 1).is_zero()) {
      DenseMatrix<F> tj = cbm_transfer_matrix(m, j);
      w = mat_mul(mat_mul(cbm_transfer_matrix(m, mm + j), w),
                  mat_inverse(tj));
    } else {
      w = detail::cbm_window_product_naive(m, j + 1, mm + j);
    }
    windows.push_back(TransferWindow<F>{w, scalar, j + 1, mm + j});
  }
  return windows;
}

namespace detail {

// Shared reduction of the determinant path: the ordered product over
// p = 1..m and the Schur-complement determinant of the corner system.
// Block layout ((k-1)x(k-1), 1-based r, c):
//   A(r,c) = x^{(m+r)}_{k-r+c}     for c <= r   (lower, nonzero diagonal)
//   B(r,c) = x^{(r)}_{c-r+1}       for c >= r   (upper)
//   C(r,c) = x^{(n-k+1+r)}_{c-r+1} for c >= r   (upper)
//   D(r,c) = x^{(n-k+1+r)}_{k-r+c} for c <= r   (lower)
// reduced value = det(D - C A^{-1} W B) with W = T_m * ... * T_1.
template <FieldDesc F>
struct CbmCore {
  typename F::Value schur_det;
  std::uint64_t m = 0;
};

template <FieldDesc F>
CbmCore<F> cbm_core(const CyclicBandedMatrix<F>& mat) {
  const F& fld = mat.field();
  const std::size_t k = mat.k();
  const std::size_t n = mat.n();
  const std::size_t km = k - 1;
  const std::size_t mm = n - 2 * k + 2;

  DenseMatrix<F> a(fld, km, km);
  DenseMatrix<F> b(fld, km, km);
  DenseMatrix<F> c(fld, km, km);
  DenseMatrix<F> d(fld, km, km);
  for (std::size_t r = 1; r <= km; ++r) {
    for (std::size_t cc = 1; cc <= r; ++cc) {
      a(r - 1, cc - 1) = mat.x(mm + r, k - r + cc);
      d(r - 1, cc - 1) = mat.x(n - k + 1 + r, k - r + cc);
    }
    for (std::size_t cc = r; cc <= km; ++cc) {
      b(r - 1, cc - 1) = mat.x(r, cc - r + 1);
      c(r - 1, cc - 1) = mat.x(n - k + 1 + r, cc - r + 1);
    }
  }

  DenseMatrix<F> w = cbm_window_product_naive(mat, 1, mm);
  if constexpr (!F::exact) {
    if (any_nonfinite(w))
      throw NumericOverflow(
          "transfer-matrix product overflowed f64; use an exact field");
  }

  DenseMatrix<F> reduced = mat_mul(mat_mul(mat_mul(c, mat_inverse(a)), w), b);
  for (std::size_t r = 0; r < km; ++r)
    for (std::size_t cc = 0; cc < km; ++cc)
      reduced(r, cc) = d(r, cc) - reduced(r, cc);
  typename F::Value schur_det = mat_det(reduced);
  if constexpr (!F::exact) {
    if (!value_is_finite(schur_det))
      throw NumericOverflow(
          "reduced-system determinant overflowed f64; use an exact field");
  }
  return CbmCore<F>{std::move(schur_det), mm};
}

}  // namespace detail

template <FieldDesc F>
CbmDetResult<F> cbm_det_info(const CyclicBandedMatrix<F>& m) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();
  if (k == 1) {
    typename F::Value det = fld.one();
    for (std::size_t r = 1; r <= n; ++r) det = det * m.x(r, 1);
    if constexpr (!F::exact) {
      if (!value_is_finite(det))
        throw NumericOverflow("determinant overflowed f64; use an exact field");
    }
    return {std::move(det), false};
  }
  if (n < 2 * k - 2) return {dense_det(cbm_to_dense(m)), true};

  detail::CbmCore<F> core = detail::cbm_core(m);
  typename F::Value det = core.schur_det;
  for (std::size_t j = 1; j <= n - k + 1; ++j) det = det * m.x(j, k);
  const std::size_t i = m.alignment();
  if (((k - i) * (n - k + i)) % 2) det = -det;
  if constexpr (!F::exact) {
    if (!value_is_finite(det))
      throw NumericOverflow("determinant overflowed f64; use an exact field");
  }
  return {std::move(det), false};
}

template <FieldDesc F>
typename F::Value cbm_det(const CyclicBandedMatrix<F>& m) {
  return cbm_det_info(m).det;
}

namespace detail {

// Seed entries of the inverse of the canonical (alignment-2) matrix: the
// value at 1-based position ((i+j-2 mod n)+1, j) for i, j in 1..k-1, as a
// signed ratio of a (2k-3)-sized block determinant to the determinant. The
// trailing-stencil products shared by numerator and denominator cancel down
// to exactly k-1 leftover factors, so nothing of product-length n is ever
// materialized:
//   seed(i,j) = (-1)^((i+1) + k m + (k-2)(n-k+2)) det_{i,j}
//               / (schur_det * prod_{p in [1,j] or [m+j+1, n-k+1]} x^{(p)}_k).
// Seed block layout (1-based r, c; zero outside the stated triangle):
//   A_j(r,c) = x^{(j+r)}_{c-r+1}         c >= r   ((k-1) square)
//   B_j(r,c) = x^{(n+j-2k+2+r)}_{k-r+c}  c <= r   ((k-1) square)
//   C_j(r,c) = x^{(n+j-k+1+r)}_{k-r+c}   c <= r   ((k-2) rows)
//   D_j(r,c) = x^{(n+j-k+1+r)}_{c-r+1}   c >= r   ((k-2) rows)
// and det_{i,j} = det [[W_j A_j minus col i, B_j], [C_j minus col i, D_j]].
template <FieldDesc F>
DenseMatrix<F> cbm_seeds_impl(const CyclicBandedMatrix<F>& mat,
                              const typename F::Value& schur_det,
                              const std::vector<TransferWindow<F>>& windows) {
  const F& fld = mat.field();
  const std::size_t k = mat.k();
  const std::size_t n = mat.n();
  const std::size_t km = k - 1;
  const std::size_t mm = n - 2 * k + 2;

  if (schur_det.is_zero()) throw SingularMatrix();

  DenseMatrix<F> seeds(fld, km, km);  // (i-1, j-1)

  auto leftover = [&](std::size_t j) {
    typename F::Value s = schur_det;
    for (std::size_t p = 1; p <= j; ++p) s = s * mat.x(p, k);
    for (std::size_t p = mm + j + 1; p <= n - k + 1; ++p) s = s * mat.x(p, k);
    return s;
  };
  const std::size_t tail_exp = ((k % 2) * (mm % 2) + (k - 2) * (n - k + 2)) % 2;

  if (k == 2) {
    // Closed form: the single 1x1 block determinant is x^{(n+j-1)}_2 and the
    // leftover denominator factor is x^{(j)}_2, with j = 1.
    seeds(0, 0) = mat.x(n, 2) / leftover(1);
    if (tail_exp) seeds(0, 0) = -seeds(0, 0);
    counters().entry_ops += k;
    return seeds;
  }

  for (std::size_t j = 1; j <= km; ++j) {
    DenseMatrix<F> a(fld, km, km);
    DenseMatrix<F> b(fld, km, km);
    DenseMatrix<F> c(fld, k - 2, km);
    DenseMatrix<F> d(fld, k - 2, km);
    for (std::size_t r = 1; r <= km; ++r) {
      for (std::size_t cc = r; cc <= km; ++cc)
        a(r - 1, cc - 1) = mat.x(j + r, cc - r + 1);
      for (std::size_t cc = 1; cc <= r; ++cc)
        b(r - 1, cc - 1) = mat.x(n + j - 2 * k + 2 + r, k - r + cc);
    }
    for (std::size_t r = 1; r + 1 <= km; ++r) {
      for (std::size_t cc = 1; cc <= r; ++cc)
        c(r - 1, cc - 1) = mat.x(n + j - k + 1 + r, k - r + cc);
      for (std::size_t cc = r; cc <= km; ++cc)
        d(r - 1, cc - 1) = mat.x(n + j - k + 1 + r, cc - r + 1);
    }

    DenseMatrix<F> wa = mat_mul(windows[j - 1].product, a);
    const typename F::Value denom = leftover(j);
    for (std::size_t i = 1; i <= km; ++i) {
      DenseMatrix<F> block =
          assemble_block(remove_column(wa, i), b, remove_column(c, i), d);
      typename F::Value y = mat_det(block) / denom;
      if (((i + 1) + tail_exp) % 2) y = -y;
      seeds(i - 1, j - 1) = std::move(y);
      counters().entry_ops += k;
    }
  }
  return seeds;
}

}  // namespace detail

// Seed entries for the canonical alignment-2 layout; seeds(i-1, j-1) is the
// inverse entry at 1-based position ((i+j-2 mod n)+1, j).
template <FieldDesc F>
DenseMatrix<F> cbm_inv_seed(const CyclicBandedMatrix<F>& m) {
  if (m.k() < 2)
    throw ValueError("seed computation needs band width at least 2");
  if (m.alignment() != 2)
    throw ValueError("seed computation requires the canonical alignment-2 form");
  if (m.n() < 2 * m.k() - 2)
    throw ValueError("seed computation requires n >= 2k-2");
  detail::CbmCore<F> core = detail::cbm_core(m);
  std::vector<TransferWindow<F>> windows = cbm_transfer_windows(m);
  return detail::cbm_seeds_impl(m, core.schur_det, windows);
}

// Fill columns 1..k-1 of the canonical inverse from the seeds via
//   entry((i-1 mod n)+1, j) = -(sum_t x^{(r)}_t entry((r+t-3 mod n)+1, j))
//                             / x^{(r)}_k,  r = i-k+2,  i = k-1+j .. n+j-1,
// then verify the one wrap-around equation per column. Every produced entry
// costs exactly k counted multiply/divide steps.
template <FieldDesc F>
DenseMatrix<F> cbm_inv_fill_columns(const CyclicBandedMatrix<F>& m,
                                    const DenseMatrix<F>& seeds) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();
  const std::size_t km = k - 1;
  if (seeds.rows() != km || seeds.cols() != km)
    throw DimensionMismatch("seed bundle must be (k-1) square");

  DenseMatrix<F> cols(fld, n, km);
  for (std::size_t j = 1; j <= km; ++j)
    for (std::size_t i = 1; i <= km; ++i)
      cols(mod_index(static_cast<long long>(i + j) - 2, n), j - 1) =
          seeds(i - 1, j - 1);

  for (std::size_t j = 1; j <= km; ++j) {
    for (std::size_t i = k - 1 + j; i <= n + j - 1; ++i) {
      const std::size_t r = i - k + 2;  // equation row, stays within [2, n]
      typename F::Value acc = fld.zero();
      for (std::size_t t = 1; t + 1 <= k; ++t)
        acc = acc +
              m.x(r, t) * cols(mod_index(static_cast<long long>(r + t) - 3, n),
                               j - 1);
      cols(mod_index(static_cast<long long>(i) - 1, n), j - 1) =
          -(acc / m.x(r, k));
      counters().entry_ops += k;
    }
    // Wrap equation of row j: sum_t x^{(j)}_t entry((j+t-3 mod n)+1, j) = 1.
    typename F::Value wrap = fld.zero();
    for (std::size_t t = 1; t <= k; ++t)
      wrap = wrap +
             m.x(j, t) * cols(mod_index(static_cast<long long>(j + t) - 3, n),
                              j - 1);
    if constexpr (F::exact) {
      if (!(wrap == fld.one()))
        throw ConsistencyFailure("column wrap-around equation violated");
    } else {
      if (!value_is_finite(wrap) ||
          !approx_equal(wrap.v, 1.0, kFloatResidualTol, kFloatResidualTol))
        throw ConsistencyFailure(
            "column wrap-around residual exceeds float tolerance");
    }
  }
  return cols;
}

namespace detail {

// Row recurrence for columns k..n; throws ZeroFirstStencilEntry when the
// required division by x^{(j)}_1 is impossible.
template <FieldDesc F>
DenseMatrix<F> cbm_fill_rows_fast(const CyclicBandedMatrix<F>& m,
                                  const DenseMatrix<F>& left_columns) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();

  // Work in a transposed scratch grid, tr(c, r) holding inverse entry (r, c):
  // the per-column recurrence then streams along contiguous rows instead of
  // striding down a row-major grid, which keeps the quadratic sweep cache-
  // and TLB-friendly at large n. The arithmetic is unchanged.
  DenseMatrix<F> tr(fld, n, n);
  for (std::size_t c = 0; c + 1 < k; ++c)
    for (std::size_t r = 0; r < n; ++r) tr(c, r) = left_columns(r, c);

  for (std::size_t j = k; j <= n; ++j) {
    if (m.x(j, 1).is_zero()) throw ZeroFirstStencilEntry(j);
    const typename F::Value div_inv = m.x(j, 1).inv();  // hoisted per column
    for (std::size_t i = 1; i <= n; ++i) {
      typename F::Value acc = fld.zero();
      for (std::size_t t = 2; t <= k; ++t)
        acc = acc + m.x(j - t + 1, t) * tr(j - t, i - 1);
      typename F::Value num = i == j - 1 ? fld.one() - acc : -acc;
      tr(j - 1, i - 1) = num * div_inv;
      counters().entry_ops += k;
    }
  }

  constexpr std::size_t kTile = 32;  // blocked in-place transpose to row-major
  for (std::size_t rb = 0; rb < n; rb += kTile) {
    const std::size_t rend = std::min(rb + kTile, n);
    for (std::size_t cb = rb; cb < n; cb += kTile) {
      const std::size_t cend = std::min(cb + kTile, n);
      for (std::size_t r = rb; r < rend; ++r) {
        const std::size_t cstart = cb == rb ? r + 1 : cb;
        for (std::size_t c = cstart; c < cend; ++c) std::swap(tr(r, c), tr(c, r));
      }
    }
  }
  return tr;
}

}  // namespace detail

// Complete the inverse from its first k-1 columns. When some x^{(j)}_1 = 0
// makes the row recurrence impossible, the whole inverse is recomputed
// densely and flagged fallback=true.
template <FieldDesc F>
InverseMatrix<F> cbm_inv_fill_rows(const CyclicBandedMatrix<F>& m,
                                   const DenseMatrix<F>& left_columns) {
  if (left_columns.rows() != m.n() || left_columns.cols() != m.k() - 1)
    throw DimensionMismatch("left column block must be n by k-1");
  try {
    return InverseMatrix<F>{m.n(),
                            detail::cbm_fill_rows_fast(m, left_columns), false};
  } catch (const ZeroFirstStencilEntry&) {
    auto inv = dense_inverse(cbm_to_dense(m));
    if (!inv) throw SingularMatrix();
    return InverseMatrix<F>{m.n(), std::move(*inv), true};
  }
}

namespace detail {

// Infinity norm of M * candidate - I, accumulated column by column through
// the band-structured product; returns +inf-ish sentinel via the bool when a
// non-finite value appears.
inline std::pair<double, bool> cbm_residual_f64(
    const CyclicBandedMatrix<F64Field>& m, const DenseMatrix<F64Field>& inv) {
  const std::size_t n = m.n();
  std::vector<double> row_abs(n, 0.0);
  std::vector<F64> col(n);
  bool finite = true;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) col[r] = inv(r, c);
    std::vector<F64> prod = cbm_matvec(m, col);
    for (std::size_t r = 0; r < n; ++r) {
      const double e = prod[r].v - (r == c ? 1.0 : 0.0);
      if (!std::isfinite(e)) finite = false;
      row_abs[r] += std::fabs(e);
    }
  }
  double norm = 0.0;
  for (double v : row_abs) norm = std::max(norm, v);
  return {norm, finite};
}

template <FieldDesc F>
InverseMatrix<F> cbm_inverse_fast_canonical(const CyclicBandedMatrix<F>& canon) {
  detail::CbmCore<F> core = detail::cbm_core(canon);
  if (core.schur_det.is_zero()) throw SingularMatrix();
  std::vector<TransferWindow<F>> windows = cbm_transfer_windows(canon);
  DenseMatrix<F> seeds =
      detail::cbm_seeds_impl(canon, core.schur_det, windows);
  DenseMatrix<F> cols = cbm_inv_fill_columns(canon, seeds);
  return cbm_inv_fill_rows(canon, cols);
}

}  // namespace detail

// Full inverse pipeline: canonicalize the alignment by a cyclic column
// rotation, run reduction + seeds + column fill + row fill, then de-rotate
// the rows of the result back to the caller's alignment.
template <FieldDesc F>
InverseMatrix<F> cbm_inverse(const CyclicBandedMatrix<F>& m) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();

  InverseMatrix<F> result;
  bool computed = false;

  if (k == 1) {
    DenseMatrix<F> inv(fld, n, n);
    for (std::size_t r = 1; r <= n; ++r) {
      inv(r - 1, r - 1) = m.x(r, 1).inv();
      counters().entry_ops += 1;
    }
    result = InverseMatrix<F>{n, std::move(inv), false};
    computed = true;
  } else if (n < 2 * k - 2) {
    auto inv = dense_inverse(cbm_to_dense(m));
    if (!inv) throw SingularMatrix();
    result = InverseMatrix<F>{n, std::move(*inv), true};
    computed = true;
  }

  if (!computed) {
    const std::size_t shift =
        mod_index(static_cast<long long>(m.alignment()) - 2, n);
    CyclicBandedMatrix<F> canon(fld, n, m.rows(), 2);

    auto derotate = [&](InverseMatrix<F> canon_inv) {
      if (shift == 0) return canon_inv;
      DenseMatrix<F> out(fld, n, n);
      for (std::size_t r = 0; r < n; ++r) {
        const std::size_t src = mod_index(static_cast<long long>(r + shift), n);
        for (std::size_t c = 0; c < n; ++c) out(r, c) = canon_inv.entries(src, c);
      }
      return InverseMatrix<F>{n, std::move(out), canon_inv.fallback};
    };

    if constexpr (F::exact) {
      result = derotate(detail::cbm_inverse_fast_canonical(canon));
    } else {
      try {
        result = derotate(detail::cbm_inverse_fast_canonical(canon));
      } catch (const NumericOverflow&) {
        result = InverseMatrix<F>{};
      } catch (const ConsistencyFailure&) {
        result = InverseMatrix<F>{};
      } catch (const SingularMatrix&) {
        result = InverseMatrix<F>{};
      }
      if (result.n == 0) {
        auto inv = dense_inverse(cbm_to_dense(m));
        if (!inv) throw SingularMatrix();
        result = InverseMatrix<F>{n, std::move(*inv), true};
      }
    }
  }

  if constexpr (!F::exact) {
    auto [norm, finite] = detail::cbm_residual_f64(m, result.entries);
    if (!finite || norm > kFloatResidualTol) {
      if (!result.fallback) {
        auto inv = dense_inverse(cbm_to_dense(m));
        if (!inv) throw SingularMatrix();
        result = InverseMatrix<F>{n, std::move(*inv), true};
        auto [norm2, finite2] = detail::cbm_residual_f64(m, result.entries);
        norm = norm2;
        finite = finite2;
      }
      if (!finite)
        throw NumericOverflow(
            "inverse entries overflowed f64; use an exact field");
      if (norm > kFloatResidualTol)
        throw ConsistencyFailure(
            "f64 inverse residual " + std::to_string(norm) +
            " exceeds tolerance; the instance is too ill-conditioned");
    }
  }
  return result;
}

}  // namespace ringband
