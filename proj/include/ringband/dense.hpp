#pragma once

#include <cassert>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ringband/counters.hpp"
#include "ringband/errors.hpp"
#include "ringband/field.hpp"

namespace ringband {

// Small dense matrix over a field descriptor F. Row-major storage; the
// descriptor travels with the matrix so mixed-field operations are caught.
template <FieldDesc F>
class DenseMatrix {
 public:
  using Value = typename F::Value;

  DenseMatrix() : field_(), rows_(0), cols_(0) {}
  DenseMatrix(F field, std::size_t rows, std::size_t cols)
      : field_(std::move(field)),
        rows_(rows),
        cols_(cols),
        a_(rows * cols, field_.zero()) {}

  static DenseMatrix identity(F field, std::size_t n) {
    DenseMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = m.field_.one();
    return m;
  }

  const F& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Value& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return a_[r * cols_ + c];
  }
  const Value& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return a_[r * cols_ + c];
  }

  Value& at(std::size_t r, std::size_t c) {
    if (r >= rows_ || c >= cols_)
      throw IndexOutOfRange("dense index (" + std::to_string(r) + ", " +
                            std::to_string(c) + ") outside " +
                            std::to_string(rows_) + "x" +
                            std::to_string(cols_));
    return a_[r * cols_ + c];
  }

  friend bool operator==(const DenseMatrix& x, const DenseMatrix& y) {
    if (!(x.field_ == y.field_)) return false;
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) return false;
    for (std::size_t i = 0; i < x.a_.size(); ++i)
      if (!(x.a_[i] == y.a_[i])) return false;
    return true;
  }

 private:
  F field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Value> a_;
};

template <FieldDesc F>
void require_same_field(const DenseMatrix<F>& x, const DenseMatrix<F>& y) {
  if (!(x.field() == y.field()))
    throw FieldMismatch("matrices belong to different fields");
}

// Matrix product; every call is one counted block multiplication.
template <FieldDesc F>
DenseMatrix<F> mat_mul(const DenseMatrix<F>& x, const DenseMatrix<F>& y) {
  require_same_field(x, y);
  if (x.cols() != y.rows())
    throw DimensionMismatch("product needs inner dimensions to agree: " +
                            std::to_string(x.cols()) + " vs " +
                            std::to_string(y.rows()));
  ++counters().block_muls;
  DenseMatrix<F> out(x.field(), x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t t = 0; t < x.cols(); ++t) {
      const auto& xv = x(i, t);
      if (xv.is_zero()) continue;
      for (std::size_t j = 0; j < y.cols(); ++j)
        out(i, j) = out(i, j) + xv * y(t, j);
    }
  return out;
}

template <FieldDesc F>
std::vector<typename F::Value> mat_vec(
    const DenseMatrix<F>& m, const std::vector<typename F::Value>& v) {
  if (m.cols() != v.size())
    throw DimensionMismatch("matrix-vector shapes disagree");
  std::vector<typename F::Value> out(m.rows(), m.field().zero());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out[i] = out[i] + m(i, j) * v[j];
  return out;
}

// Left-to-right binary powering: for e >= 1 this spends exactly
// floor(log2 e) + popcount(e) - 1 multiplications.
template <FieldDesc F>
DenseMatrix<F> mat_pow(const DenseMatrix<F>& base, std::uint64_t e) {
  if (base.rows() != base.cols())
    throw DimensionMismatch("powering needs a square matrix");
  if (e == 0) return DenseMatrix<F>::identity(base.field(), base.rows());
  int top = 63;
  while (!((e >> top) & 1)) --top;
  DenseMatrix<F> acc = base;
  for (int bit = top - 1; bit >= 0; --bit) {
    acc = mat_mul(acc, acc);
    if ((e >> bit) & 1) acc = mat_mul(acc, base);
  }
  return acc;
}

namespace detail {

// Elimination workhorse: reduces `work` in place, returns the determinant
// scale gathered so far; 0 (field zero) signals a singular input. When
// `augment` is non-null it receives the same row operations.
template <FieldDesc F>
typename F::Value eliminate(DenseMatrix<F>& work, DenseMatrix<F>* augment) {
  const F& fld = work.field();
  const std::size_t n = work.rows();
  typename F::Value det = fld.one();
  const PivotPolicy policy = elimination_pivot_policy(fld);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    if (policy == PivotPolicy::kPartialAbs) {
      for (std::size_t r = col + 1; r < n; ++r)
        if (pivot_weight(work(r, col)) > pivot_weight(work(pivot, col)))
          pivot = r;
    } else {
      while (pivot < n && work(pivot, col).is_zero()) ++pivot;
    }
    if (pivot >= n || work(pivot, col).is_zero()) return fld.zero();

    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(work(pivot, j), work(col, j));
      if (augment)
        for (std::size_t j = 0; j < augment->cols(); ++j)
          std::swap((*augment)(pivot, j), (*augment)(col, j));
      det = -det;
    }

    const typename F::Value p = work(col, col);
    det = det * p;
    const typename F::Value pinv = p.inv();
    for (std::size_t j = col; j < n; ++j) work(col, j) = work(col, j) * pinv;
    if (augment)
      for (std::size_t j = 0; j < augment->cols(); ++j)
        (*augment)(col, j) = (*augment)(col, j) * pinv;

    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const typename F::Value factor = work(r, col);
      if (factor.is_zero()) continue;
      for (std::size_t j = col; j < n; ++j)
        work(r, j) = work(r, j) - factor * work(col, j);
      if (augment)
        for (std::size_t j = 0; j < augment->cols(); ++j)
          (*augment)(r, j) = (*augment)(r, j) - factor * (*augment)(col, j);
    }
  }
  return det;
}

}  // namespace detail

// Determinant via Gauss-Jordan; a singular matrix yields the field zero.
template <FieldDesc F>
typename F::Value mat_det(const DenseMatrix<F>& m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("determinant needs a square matrix");
  DenseMatrix<F> work = m;
  return detail::eliminate<F>(work, nullptr);
}

// Determinant and inverse in one elimination pass; the inverse is absent
// exactly when the determinant is zero.
template <FieldDesc F>
std::pair<typename F::Value, std::optional<DenseMatrix<F>>> mat_det_inv(
    const DenseMatrix<F>& m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("inverse needs a square matrix");
  DenseMatrix<F> work = m;
  DenseMatrix<F> aug = DenseMatrix<F>::identity(m.field(), m.rows());
  typename F::Value det = detail::eliminate<F>(work, &aug);
  if (det.is_zero()) return {det, std::nullopt};
  return {det, std::move(aug)};
}

// Inverse convenience; throws SingularMatrix instead of returning an option.
template <FieldDesc F>
DenseMatrix<F> mat_inverse(const DenseMatrix<F>& m) {
  auto [det, inv] = mat_det_inv(m);
  if (!inv) throw SingularMatrix();
  return std::move(*inv);
}

// True when any entry is non-finite; only f64 can ever report true.
template <FieldDesc F>
bool any_nonfinite(const DenseMatrix<F>& m) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!value_is_finite(m(r, c))) return true;
  return false;
}

// Copy of `m` with 1-based column `idx` removed, remaining order preserved.
template <FieldDesc F>
DenseMatrix<F> remove_column(const DenseMatrix<F>& m, std::size_t idx) {
  if (idx < 1 || idx > m.cols())
    throw IndexOutOfRange("column " + std::to_string(idx) +
                          " to remove outside [1, " + std::to_string(m.cols()) +
                          "]");
  DenseMatrix<F> out(m.field(), m.rows(), m.cols() - 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0, w = 0; c < m.cols(); ++c) {
      if (c == idx - 1) continue;
      out(r, w++) = m(r, c);
    }
  }
  return out;
}

// [[TL, TR], [BL, BR]] block assembly with shape consistency checks.
template <FieldDesc F>
DenseMatrix<F> assemble_block(const DenseMatrix<F>& tl, const DenseMatrix<F>& tr,
                              const DenseMatrix<F>& bl,
                              const DenseMatrix<F>& br) {
  if (tl.rows() != tr.rows() || bl.rows() != br.rows() ||
      tl.cols() != bl.cols() || tr.cols() != br.cols())
    throw DimensionMismatch("block shapes do not tile a matrix");
  DenseMatrix<F> out(tl.field(), tl.rows() + bl.rows(), tl.cols() + tr.cols());
  for (std::size_t r = 0; r < tl.rows(); ++r) {
    for (std::size_t c = 0; c < tl.cols(); ++c) out(r, c) = tl(r, c);
    for (std::size_t c = 0; c < tr.cols(); ++c) out(r, tl.cols() + c) = tr(r, c);
  }
  for (std::size_t r = 0; r < bl.rows(); ++r) {
    for (std::size_t c = 0; c < bl.cols(); ++c) out(tl.rows() + r, c) = bl(r, c);
    for (std::size_t c = 0; c < br.cols(); ++c)
      out(tl.rows() + r, tl.cols() + c) = br(r, c);
  }
  return out;
}

}  // namespace ringband
