// Dense kernel: multiplication/power counters, determinant + inverse via
// elimination cross-checked against an in-test Laplace expansion, block
// assembly, and the 1-based column-removal helper.

#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include <ringband/counters.hpp>
#include <ringband/dense.hpp>
#include <ringband/errors.hpp>
#include <ringband/field.hpp>

using namespace ringband;

namespace {

template <FieldDesc F>
DenseMatrix<F> random_matrix(const F& fld, std::size_t rows, std::size_t cols,
                             std::mt19937_64& g, std::uint64_t span = 19) {
  DenseMatrix<F> m(fld, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = fld.from_int(static_cast<long long>(g() % span) -
                             static_cast<long long>(span / 2));
  return m;
}

// Independent ground truth: textbook cofactor expansion along row 0.
// Exponential cost, so only used for sizes <= 5.
template <FieldDesc F>
typename F::Value laplace_det(const DenseMatrix<F>& m) {
  const std::size_t n = m.rows();
  if (n == 0) return m.field().one();
  if (n == 1) return m(0, 0);
  typename F::Value acc = m.field().zero();
  for (std::size_t c = 0; c < n; ++c) {
    DenseMatrix<F> minor(m.field(), n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t cc = 0, w = 0; cc < n; ++cc) {
        if (cc == c) continue;
        minor(r - 1, w++) = m(r, cc);
      }
    typename F::Value term = m(0, c) * laplace_det(minor);
    acc = (c % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

TEST_CASE("mat_mul shape checks and identity behavior") {
  RatField rq;
  std::mt19937_64 g(3);
  auto a = random_matrix(rq, 3, 4, g);
  auto b = random_matrix(rq, 4, 2, g);
  auto ab = mat_mul(a, b);
  CHECK(ab.rows() == 3);
  CHECK(ab.cols() == 2);
  CHECK_THROWS_AS(mat_mul(b, a), DimensionMismatch);
  auto i3 = DenseMatrix<RatField>::identity(rq, 3);
  CHECK(mat_mul(i3, a) == a);
}

TEST_CASE("every mat_mul bumps the block multiplication counter") {
  ZpField z7(7);
  std::mt19937_64 g(4);
  auto a = random_matrix(z7, 3, 3, g, 7);
  Counters before = counters_snapshot();
  auto b = mat_mul(a, a);
  (void)mat_mul(b, a);
  CHECK(counters_delta(before).block_muls == 2);
}

TEST_CASE("mat_pow equals repeated multiplication for every m up to 16") {
  ZpField zp(998244353);
  std::mt19937_64 g(5);
  auto base = random_matrix(zp, 4, 4, g, 998244353);
  auto seq = DenseMatrix<ZpField>::identity(zp, 4);
  for (std::uint64_t m = 0; m <= 16; ++m) {
    CAPTURE(m);
    CHECK(mat_pow(base, m) == seq);
    seq = mat_mul(seq, base);
  }
}

TEST_CASE("mat_pow multiplication count stays within 2*ceil(log2 m)") {
  ZpField z7(7);
  std::mt19937_64 g(6);
  auto base = random_matrix(z7, 3, 3, g, 7);
  const std::uint64_t samples[] = {1,    2,     3,      7,      8,
                                   9,    31,    64,     100,    1023,
                                   4096, 55555, 524288, 999999, 1000000};
  for (std::uint64_t m : samples) {
    CAPTURE(m);
    Counters before = counters_snapshot();
    (void)mat_pow(base, m);
    std::uint64_t muls = counters_delta(before).block_muls;
    std::uint64_t ceil_log2 = 0;
    while ((1ULL << ceil_log2) < m) ++ceil_log2;
    CHECK(muls <= 2 * ceil_log2);
  }
}

TEST_CASE("mat_det_inv produces two-sided exact inverses over exact fields") {
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 25; ++trial) {
    ZpField zp(998244353);
    auto a = random_matrix(zp, 1 + trial % 6, 1 + trial % 6, g, 998244353);
    auto [det, inv] = mat_det_inv(a);
    if (!inv) {
      CHECK(det.is_zero());
      continue;
    }
    auto eye = DenseMatrix<ZpField>::identity(zp, a.rows());
    CHECK(mat_mul(a, *inv) == eye);
    CHECK(mat_mul(*inv, a) == eye);
  }
  RatField rq;
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_matrix(rq, 4, 4, g);
    auto [det, inv] = mat_det_inv(a);
    if (!inv) continue;
    auto eye = DenseMatrix<RatField>::identity(rq, 4);
    CHECK(mat_mul(a, *inv) == eye);
    CHECK(mat_mul(*inv, a) == eye);
  }
}

TEST_CASE("determinant is multiplicative over random pairs") {
  ZpField zp(998244353);
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + trial % 5;
    auto a = random_matrix(zp, n, n, g, 998244353);
    auto b = random_matrix(zp, n, n, g, 998244353);
    CHECK(mat_det(mat_mul(a, b)) == mat_det(a) * mat_det(b));
  }
}

TEST_CASE("elimination determinant matches Laplace expansion up to 5x5") {
  std::mt19937_64 g(9);
  RatField rq;
  ZpField z7(7);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 12; ++trial) {
      CAPTURE(n);
      CAPTURE(trial);
      auto a = random_matrix(rq, n, n, g);
      CHECK(mat_det(a) == laplace_det(a));
      auto b = random_matrix(z7, n, n, g, 7);
      CHECK(mat_det(b) == laplace_det(b));
    }
  }
}

TEST_CASE("first-nonzero pivoting handles zero leading entries exactly") {
  RatField rq;
  DenseMatrix<RatField> a(rq, 2, 2);
  a(0, 0) = Rat(0);
  a(0, 1) = Rat(1);
  a(1, 0) = Rat(1);
  a(1, 1) = Rat(0);
  CHECK(mat_det(a) == Rat(-1));
  auto inv = mat_inverse(a);
  CHECK(mat_mul(a, inv) == DenseMatrix<RatField>::identity(rq, 2));
}

TEST_CASE("singular matrices yield zero determinant and no inverse") {
  RatField rq;
  DenseMatrix<RatField> a(rq, 2, 2);
  a(0, 0) = Rat(1);
  a(0, 1) = Rat(2);
  a(1, 0) = Rat(2);
  a(1, 1) = Rat(4);
  auto [det, inv] = mat_det_inv(a);
  CHECK(det.is_zero());
  CHECK(!inv);
  CHECK_THROWS_AS(mat_inverse(a), SingularMatrix);
}

TEST_CASE("mat_vec multiplies and validates shapes") {
  ZpField z7(7);
  DenseMatrix<ZpField> a(z7, 2, 3);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) a(r, c) = Zp(r + c, 7);
  std::vector<Zp> v = {Zp(1, 7), Zp(2, 7), Zp(3, 7)};
  auto out = mat_vec(a, v);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == z7.from_int(1 * 0 + 2 * 1 + 3 * 2));
  CHECK(out[1] == z7.from_int(1 * 1 + 2 * 2 + 3 * 3));
  v.pop_back();
  CHECK_THROWS_AS(mat_vec(a, v), DimensionMismatch);
}

TEST_CASE("remove_column is 1-based and preserves order") {
  RatField rq;
  DenseMatrix<RatField> a(rq, 2, 3);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      a(r, c) = Rat(static_cast<long long>(10 * r + c));
  auto b = remove_column(a, 2);
  REQUIRE(b.cols() == 2);
  CHECK(b(0, 0) == Rat(0));
  CHECK(b(0, 1) == Rat(2));
  CHECK(b(1, 0) == Rat(10));
  CHECK(b(1, 1) == Rat(12));
  CHECK_THROWS_AS(remove_column(a, 0), IndexOutOfRange);
  CHECK_THROWS_AS(remove_column(a, 4), IndexOutOfRange);
}

TEST_CASE("assemble_block tiles four blocks and checks shapes") {
  RatField rq;
  std::mt19937_64 g(10);
  auto tl = random_matrix(rq, 2, 3, g);
  auto tr = random_matrix(rq, 2, 1, g);
  auto bl = random_matrix(rq, 1, 3, g);
  auto br = random_matrix(rq, 1, 1, g);
  auto m = assemble_block(tl, tr, bl, br);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 4);
  CHECK(m(0, 0) == tl(0, 0));
  CHECK(m(1, 3) == tr(1, 0));
  CHECK(m(2, 2) == bl(0, 2));
  CHECK(m(2, 3) == br(0, 0));
  CHECK_THROWS_AS(assemble_block(tl, br, bl, br), DimensionMismatch);
}

TEST_CASE("any_nonfinite flags inf only for floats") {
  F64Field f;
  DenseMatrix<F64Field> a(f, 1, 2);
  a(0, 0) = F64(1.0);
  a(0, 1) = F64(2.0);
  CHECK(!any_nonfinite(a));
  a(0, 1) = F64(1e308) * F64(1e308);
  CHECK(any_nonfinite(a));
}
