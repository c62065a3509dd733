#pragma once

// k-diagonal circulant matrices: compressed representation, fast determinant
// via a transfer-matrix power and a small Schur complement, and fast inverse
// via cofactor seeds plus a k-term linear recurrence.

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

// Band values x_1..x_k plus the alignment index: x_alignment sits on the main
// diagonal, x_j lands in column r + j - alignment (mod n) of row r.
template <FieldDesc F>
struct Stencil {
  std::vector<typename F::Value> x;
  std::size_t alignment = 1;

  std::size_t k() const { return x.size(); }
};

template <FieldDesc F>
class CirculantMatrix {
 public:
  using Value = typename F::Value;

  CirculantMatrix(F field, std::size_t n, std::vector<Value> x,
                  std::size_t alignment)
      : field_(std::move(field)), n_(n), stencil_{std::move(x), alignment} {
    const std::size_t k = stencil_.k();
    if (k < 1) throw ValueError("stencil must hold at least one value");
    if (n_ < k)
      throw ValueError("order " + std::to_string(n_) +
                       " smaller than band width " + std::to_string(k) +
                       "; the band would collide with itself");
    if (alignment < 1 || alignment > k)
      throw ValueError("alignment " + std::to_string(alignment) +
                       " outside [1, " + std::to_string(k) + "]");
    if (stencil_.x.back().is_zero())
      throw ValueError("trailing stencil value x_k must be nonzero");
  }

  const F& field() const { return field_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return stencil_.k(); }
  std::size_t alignment() const { return stencil_.alignment; }
  const Stencil<F>& stencil() const { return stencil_; }
  // 1-based stencil access.
  const Value& x(std::size_t j) const { return stencil_.x[j - 1]; }

 private:
  F field_;
  std::size_t n_;
  Stencil<F> stencil_;
};

// The inverse of a circulant matrix is circulant, so one column represents
// it. `fallback` records that a dense computation stood in for the fast path.
template <FieldDesc F>
struct CirculantInverse {
  std::size_t n = 0;
  std::vector<typename F::Value> first_column;
  bool fallback = false;
};

template <FieldDesc F>
struct CmDetResult {
  typename F::Value det;
  bool fallback = false;
};

template <FieldDesc F>
struct CmCanonicalized {
  CirculantMatrix<F> canonical;
  std::size_t shift = 0;        // canonical = original * P^shift
  typename F::Value sign;       // (-1)^((k-i)(n-k+i)) for the original i
};

template <FieldDesc F>
DenseMatrix<F> cm_to_dense(const CirculantMatrix<F>& m) {
  DenseMatrix<F> out(m.field(), m.n(), m.n());
  const std::size_t n = m.n();
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t j = 1; j <= m.k(); ++j) {
      const std::size_t c =
          mod_index(static_cast<long long>(r + j) -
                        static_cast<long long>(m.alignment()) - 1,
                    n);
      out(r - 1, c) = m.x(j);
    }
  return out;
}

// Band-structured product M*v in k*n field operations.
template <FieldDesc F>
std::vector<typename F::Value> cm_matvec(
    const CirculantMatrix<F>& m, const std::vector<typename F::Value>& v) {
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
      acc = acc + m.x(j) * v[c];
    }
    out[r] = acc;
  }
  return out;
}

// Materialize a represented inverse: entry (r, c) = y[(r - c) mod n].
template <FieldDesc F>
DenseMatrix<F> cm_materialize(const F& fld, const CirculantInverse<F>& inv) {
  DenseMatrix<F> out(fld, inv.n, inv.n);
  for (std::size_t r = 0; r < inv.n; ++r)
    for (std::size_t c = 0; c < inv.n; ++c)
      out(r, c) = inv.first_column[mod_index(
          static_cast<long long>(r) - static_cast<long long>(c), inv.n)];
  return out;
}

// Rotate the stencil's diagonal to position 2 by a cyclic column permutation;
// the returned sign links det(original) to the reduced canonical form.
template <FieldDesc F>
CmCanonicalized<F> cm_canonicalize(const CirculantMatrix<F>& m) {
  const std::size_t k = m.k();
  const std::size_t n = m.n();
  const std::size_t i = m.alignment();
  const std::size_t exponent = ((k - i) * (n - k + i)) % 2;
  typename F::Value sign =
      exponent == 0 ? m.field().one() : -m.field().one();
  if (k == 1) {
    // Width-1 bands have no position-2 slot; the matrix is already diagonal.
    return {m, 0, std::move(sign)};
  }
  const std::size_t shift =
      mod_index(static_cast<long long>(i) - 2, n);
  CirculantMatrix<F> canonical(m.field(), n, m.stencil().x, 2);
  return {std::move(canonical), shift, std::move(sign)};
}

namespace detail {

// Shared machinery of the fast determinant and the inverse seeds: the
// transfer-matrix power W = T^(n-2k+2) and the Schur-complement determinant
// of the reduced corner system. Block layout ((k-1)x(k-1), 1-based r, c):
//   A (lower, x_k diagonal): A(r,c) = x_{k-r+c} for c <= r
//   B (upper, x_1 diagonal): B(r,c) = x_{c-r+1} for c >= r
//   T: first column -x_{k-r}/x_k, ones on the superdiagonal
// and the reduction value is det(A - B A^{-1} W B).
template <FieldDesc F>
struct CmCore {
  DenseMatrix<F> w;               // T^(n-2k+2)
  typename F::Value schur_det;    // det of the reduced corner system
  std::uint64_t m = 0;            // the power n-2k+2
};

template <FieldDesc F>
typename F::Value cm_stencil_at(const CirculantMatrix<F>& mat,
                                long long j) {
  // x_j with the out-of-band guard: zero outside [1, k].
  if (j < 1 || j > static_cast<long long>(mat.k()))
    return mat.field().zero();
  return mat.x(static_cast<std::size_t>(j));
}

template <FieldDesc F>
CmCore<F> cm_core(const CirculantMatrix<F>& mat) {
  const F& fld = mat.field();
  const std::size_t k = mat.k();
  const std::size_t n = mat.n();
  const std::size_t km = k - 1;
  const std::uint64_t m = static_cast<std::uint64_t>(n - 2 * k + 2);

  DenseMatrix<F> a(fld, km, km);
  DenseMatrix<F> b(fld, km, km);
  DenseMatrix<F> t(fld, km, km);
  for (std::size_t r = 1; r <= km; ++r) {
    for (std::size_t c = 1; c <= r; ++c) a(r - 1, c - 1) = mat.x(k - r + c);
    for (std::size_t c = r; c <= km; ++c) b(r - 1, c - 1) = mat.x(c - r + 1);
    t(r - 1, 0) = -(mat.x(k - r) / mat.x(k));
    if (r < km) t(r - 1, r) = fld.one();
  }

  DenseMatrix<F> w = mat_pow(t, m);
  if constexpr (!F::exact) {
    if (any_nonfinite(w))
      throw NumericOverflow(
          "transfer-matrix power overflowed f64; use an exact field");
  }

  DenseMatrix<F> reduced = mat_mul(mat_mul(mat_mul(b, mat_inverse(a)), w), b);
  for (std::size_t r = 0; r < km; ++r)
    for (std::size_t c = 0; c < km; ++c)
      reduced(r, c) = a(r, c) - reduced(r, c);
  typename F::Value schur_det = mat_det(reduced);
  if constexpr (!F::exact) {
    if (!value_is_finite(schur_det))
      throw NumericOverflow(
          "reduced-system determinant overflowed f64; use an exact field");
  }
  return CmCore<F>{std::move(w), std::move(schur_det), m};
}

}  // namespace detail

template <FieldDesc F>
CmDetResult<F> cm_det_info(const CirculantMatrix<F>& m) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();
  if (k == 1) {
    typename F::Value det = fld_pow(fld, m.x(1), n);
    if constexpr (!F::exact) {
      if (!value_is_finite(det))
        throw NumericOverflow("determinant overflowed f64; use an exact field");
    }
    return {std::move(det), false};
  }
  if (n < 2 * k - 2) {
    // The corner reduction needs n >= 2k-2; below that, answer densely.
    return {dense_det(cm_to_dense(m)), true};
  }
  detail::CmCore<F> core = detail::cm_core(m);
  const std::size_t i = m.alignment();
  const std::size_t exponent = ((k - i) * (n - k + i)) % 2;
  typename F::Value det =
      fld_pow(fld, m.x(k), static_cast<std::uint64_t>(n - k + 1)) *
      core.schur_det;
  if (exponent) det = -det;
  if constexpr (!F::exact) {
    if (!value_is_finite(det))
      throw NumericOverflow("determinant overflowed f64; use an exact field");
  }
  return {std::move(det), false};
}

template <FieldDesc F>
typename F::Value cm_det(const CirculantMatrix<F>& m) {
  return cm_det_info(m).det;
}

namespace detail {

// First k-1 inverse-column entries of the canonical (alignment-2) matrix.
// Each is a signed ratio of a (2k-3)-sized block determinant to the matrix
// determinant; the x_k powers shared by numerator and denominator are
// cancelled algebraically so nothing of size x_k^n is ever materialized:
//   y_i = (-1)^((i+1) + k m + (k-2)(n-k+2)) det_i / (x_k^(k-1) schur_det).
template <FieldDesc F>
std::vector<typename F::Value> cm_seeds_from_core(const CirculantMatrix<F>& mat,
                                                  const CmCore<F>& core) {
  const F& fld = mat.field();
  const std::size_t k = mat.k();
  const std::size_t n = mat.n();
  const std::size_t km = k - 1;

  if (core.schur_det.is_zero()) throw SingularMatrix();

  if (k == 2) {
    // Closed form: the only seed collapses to the reciprocal of the reduced
    // determinant; all x_2 powers cancel.
    return {fld.one() / core.schur_det};
  }

  DenseMatrix<F> a(fld, km, km);   // upper, x_1 diagonal
  DenseMatrix<F> b(fld, km, km);   // lower, x_k diagonal
  DenseMatrix<F> c(fld, k - 2, km);  // lower, x_k leading
  DenseMatrix<F> d(fld, k - 2, km);  // upper, x_1 leading
  for (std::size_t r = 1; r <= km; ++r) {
    for (std::size_t cc = r; cc <= km; ++cc)
      a(r - 1, cc - 1) = cm_stencil_at(mat, static_cast<long long>(cc) -
                                                static_cast<long long>(r) + 1);
    for (std::size_t cc = 1; cc <= r; ++cc)
      b(r - 1, cc - 1) =
          cm_stencil_at(mat, static_cast<long long>(k) -
                                 static_cast<long long>(r) +
                                 static_cast<long long>(cc));
  }
  for (std::size_t r = 1; r + 1 <= km; ++r) {
    for (std::size_t cc = 1; cc <= r; ++cc)
      c(r - 1, cc - 1) =
          cm_stencil_at(mat, static_cast<long long>(k) -
                                 static_cast<long long>(r) +
                                 static_cast<long long>(cc));
    for (std::size_t cc = r; cc <= km; ++cc)
      d(r - 1, cc - 1) = cm_stencil_at(mat, static_cast<long long>(cc) -
                                                static_cast<long long>(r) + 1);
  }

  DenseMatrix<F> wa = mat_mul(core.w, a);
  typename F::Value denom =
      fld_pow(fld, mat.x(k), static_cast<std::uint64_t>(k - 1)) *
      core.schur_det;
  const std::size_t base_exp =
      (static_cast<std::size_t>(core.m) % 2) * (k % 2) +
      ((k - 2) * (n - k + 2)) % 2;

  std::vector<typename F::Value> seeds;
  seeds.reserve(km);
  for (std::size_t i = 1; i <= km; ++i) {
    DenseMatrix<F> block = assemble_block(remove_column(wa, i), b,
                                          remove_column(c, i), d);
    typename F::Value det_i = mat_det(block);
    const std::size_t exponent = ((i + 1) + base_exp) % 2;
    typename F::Value y = det_i / denom;
    seeds.push_back(exponent ? -y : std::move(y));
  }
  return seeds;
}

}  // namespace detail

// Seeds of the inverse's first column; requires the canonical alignment-2
// layout (or a width-1 band, which has no seeds).
template <FieldDesc F>
std::vector<typename F::Value> cm_inv_seed(const CirculantMatrix<F>& m) {
  if (m.k() < 2) return {};
  if (m.alignment() != 2)
    throw ValueError("seed computation requires the canonical alignment-2 form");
  if (m.n() < 2 * m.k() - 2)
    throw ValueError("seed computation requires n >= 2k-2");
  detail::CmCore<F> core = detail::cm_core(m);
  return detail::cm_seeds_from_core(m, core);
}

// Extend k-1 seed values to the full first column by the band recurrence
//   y_i = -(x_1 y_{i-k+1} + ... + x_{k-1} y_{i-1}) / x_k,  i = k..n,
// then verify the single wrap-around equation the recurrence never touched.
// Each produced entry costs exactly k counted multiply/divide steps.
template <FieldDesc F>
CirculantInverse<F> cm_inv_extend(const CirculantMatrix<F>& m,
                                  const std::vector<typename F::Value>& seed) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();
  if (seed.size() != k - 1)
    throw DimensionMismatch("expected " + std::to_string(k - 1) +
                            " seed values, got " + std::to_string(seed.size()));
  if (k == 1) {
    // No recurrence to run: the inverse of a diagonal band is diagonal.
    std::vector<typename F::Value> y(n, fld.zero());
    y[0] = m.x(1).inv();
    return CirculantInverse<F>{n, std::move(y), false};
  }
  if (m.alignment() != 2)
    throw ValueError("recurrence extension requires the canonical form");

  std::vector<typename F::Value> y = seed;
  y.reserve(n);
  const typename F::Value inv_xk = m.x(k).inv();  // hoisted: one inversion
  for (std::size_t i = k; i <= n; ++i) {
    typename F::Value acc = fld.zero();
    for (std::size_t j = 1; j + 1 <= k; ++j)
      acc = acc + m.x(j) * y[i - k + j - 1];
    y.push_back(-(acc * inv_xk));
    counters().entry_ops += k;
  }

  // Wrap equation: x_1 y_n + x_2 y_1 + ... + x_k y_{k-1} = 1.
  typename F::Value wrap = m.x(1) * y[n - 1];
  for (std::size_t j = 2; j <= k; ++j) wrap = wrap + m.x(j) * y[j - 2];
  if constexpr (F::exact) {
    if (!(wrap == fld.one()))
      throw ConsistencyFailure("wrap-around equation violated on exact field");
  } else {
    if (!value_is_finite(wrap) ||
        !approx_equal(wrap.v, 1.0, kFloatResidualTol, kFloatResidualTol))
      throw ConsistencyFailure(
          "wrap-around equation residual exceeds float tolerance");
  }
  return CirculantInverse<F>{n, std::move(y), false};
}

namespace detail {

// Dense solve for the representing column, used below the reduction
// threshold and as the float fallback. The inverse of a circulant matrix is
// circulant, so the first column determines everything.
template <FieldDesc F>
CirculantInverse<F> cm_dense_first_column(const CirculantMatrix<F>& m) {
  auto inv = dense_inverse(cm_to_dense(m));
  if (!inv) throw SingularMatrix();
  std::vector<typename F::Value> y;
  y.reserve(m.n());
  for (std::size_t r = 0; r < m.n(); ++r) y.push_back((*inv)(r, 0));
  return CirculantInverse<F>{m.n(), std::move(y), true};
}

// l1 norm of (M * z - e_1); by circulant closure this equals the full
// infinity norm of M * M^{-1} - I, so one column certifies the product.
inline double cm_first_column_residual_f64(const CirculantMatrix<F64Field>& m,
                                           const std::vector<F64>& z) {
  const std::size_t n = m.n();
  double l1 = 0.0;
  for (std::size_t r = 1; r <= n; ++r) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= m.k(); ++j) {
      const std::size_t idx =
          mod_index(static_cast<long long>(r) - 1 + static_cast<long long>(j) -
                        static_cast<long long>(m.alignment()),
                    n);
      acc += m.x(j).v * z[idx].v;
    }
    l1 += std::fabs(acc - (r == 1 ? 1.0 : 0.0));
  }
  return l1;
}

}  // namespace detail

// Full inverse pipeline: canonicalize, reduce, seed, extend, de-rotate.
template <FieldDesc F>
CirculantInverse<F> cm_inverse(const CirculantMatrix<F>& m) {
  const F& fld = m.field();
  const std::size_t k = m.k();
  const std::size_t n = m.n();

  CirculantInverse<F> result;
  if (k == 1) {
    std::vector<typename F::Value> y(n, fld.zero());
    y[0] = m.x(1).inv();
    result = CirculantInverse<F>{n, std::move(y), false};
  } else if (n < 2 * k - 2) {
    // Below the reduction threshold only the dense route applies.
    result = detail::cm_dense_first_column(m);
  } else {
    auto fast = [&]() {
      CmCanonicalized<F> canon = cm_canonicalize(m);
      detail::CmCore<F> core = detail::cm_core(canon.canonical);
      std::vector<typename F::Value> seeds =
          detail::cm_seeds_from_core(canon.canonical, core);
      CirculantInverse<F> canonical_inv =
          cm_inv_extend(canon.canonical, seeds);
      // (M P^s)^{-1} = P^{-s} M^{-1}: rotating columns of the input rotates
      // the representing vector of the inverse.
      std::vector<typename F::Value> z;
      z.reserve(n);
      for (std::size_t r = 0; r < n; ++r)
        z.push_back(canonical_inv.first_column[mod_index(
            static_cast<long long>(r + canon.shift), n)]);
      return CirculantInverse<F>{n, std::move(z), false};
    };
    if constexpr (F::exact) {
      result = fast();
    } else {
      try {
        result = fast();
      } catch (const ConsistencyFailure&) {
        // The forward recurrence amplifies rounding error whenever a
        // non-trailing stencil entry dominates; the wrap-around check caught
        // that. A dense solve is slower but does not share the failure mode.
        // NumericOverflow intentionally propagates instead: when the
        // structured path overflows the instance is far outside f64 range at
        // sizes where a dense retry would be prohibitive, and callers need
        // the error, not a silently different code path.
        result = detail::cm_dense_first_column(m);
      } catch (const SingularMatrix&) {
        // In f64 a vanishing reduced determinant may be cancellation noise
        // rather than true singularity; let the dense route decide. A truly
        // singular input re-raises from there.
        result = detail::cm_dense_first_column(m);
      }
    }
  }

  if constexpr (!F::exact) {
    auto check_finite = [](const CirculantInverse<F>& inv) {
      for (const auto& v : inv.first_column)
        if (!value_is_finite(v))
          throw NumericOverflow(
              "inverse entries overflowed f64; use an exact field");
    };
    check_finite(result);
    double residual =
        detail::cm_first_column_residual_f64(m, result.first_column);
    if (residual > kFloatResidualTol && !result.fallback) {
      result = detail::cm_dense_first_column(m);
      check_finite(result);
      residual = detail::cm_first_column_residual_f64(m, result.first_column);
    }
    if (residual > kFloatResidualTol)
      throw ConsistencyFailure(
          "f64 inverse residual " + std::to_string(residual) +
          " exceeds tolerance; the instance is too ill-conditioned");
  }
  return result;
}

}  // namespace ringband
