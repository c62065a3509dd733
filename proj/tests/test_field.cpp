// Scalar-field layer: axioms on random triples, canonical forms, primality
// screening, division errors, powers, and the operation counters that the
// benchmark and acceptance suites rely on.

#include <doctest.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <ringband/counters.hpp>
#include <ringband/errors.hpp>
#include <ringband/field.hpp>

using namespace ringband;

namespace {

// Deterministic draws; each field maps the raw 64-bit stream into its domain.
F64 draw(const F64Field&, std::mt19937_64& g) {
  return F64(static_cast<double>(static_cast<std::int64_t>(g() >> 20)) /
                 8796093022208.0 -
             0.5);
}
Rat draw(const RatField&, std::mt19937_64& g) {
  const long num = static_cast<long>(g() % 41) - 20;
  const long den = 1 + static_cast<long>(g() % 19);
  return Rat::from_parts(mpz_class(num), mpz_class(den));
}
Zp draw(const ZpField& f, std::mt19937_64& g) { return Zp(g() % f.p, f.p); }

template <FieldDesc F>
bool same(const F&, const typename F::Value& a, const typename F::Value& b) {
  if constexpr (F::exact) {
    return a == b;
  } else {
    return approx_equal(a.v, b.v);
  }
}

template <FieldDesc F>
void check_axioms(const F& fld, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = draw(fld, g);
    auto b = draw(fld, g);
    auto c = draw(fld, g);
    CAPTURE(trial);
    CHECK(same(fld, (a + b) + c, a + (b + c)));
    CHECK(same(fld, a + b, b + a));
    CHECK(same(fld, (a * b) * c, a * (b * c)));
    CHECK(same(fld, a * b, b * a));
    CHECK(same(fld, a * (b + c), a * b + a * c));
    CHECK((a + (-a)).is_zero());
    CHECK(same(fld, a + fld.zero(), a));
    CHECK(same(fld, a * fld.one(), a));
    if (!a.is_zero()) CHECK(same(fld, a * a.inv(), fld.one()));
  }
}

}  // namespace

TEST_CASE("field axioms hold on random triples for all three fields") {
  check_axioms(F64Field{}, 11);
  check_axioms(RatField{}, 12);
  check_axioms(ZpField(7), 13);
  check_axioms(ZpField(998244353), 14);
  check_axioms(ZpField(2), 15);
}

TEST_CASE("prime-field inverses match pinned values over Z_7") {
  ZpField z7(7);
  CHECK(Zp(1, 7).inv() == Zp(1, 7));
  // Exhaustive search: 3 * x = 1 (mod 7) has the unique solution x = 5.
  int seen = 0;
  for (std::uint64_t x = 1; x < 7; ++x)
    if (Zp(3, 7) * Zp(x, 7) == z7.one()) {
      CHECK(x == 5);
      ++seen;
    }
  CHECK(seen == 1);
  CHECK(Zp(3, 7).inv() == Zp(5, 7));
}

TEST_CASE("rational inverse and canonical form") {
  Rat twothirds = Rat::from_parts(mpz_class(2), mpz_class(3));
  CHECK(twothirds.inv().str() == "3/2");
  // Lowest terms with positive denominator, idempotent under recanonicalizing.
  Rat r = Rat::from_parts(mpz_class(4), mpz_class(-6));
  CHECK(r.str() == "-2/3");
  Rat again = Rat::from_parts(mpz_class(-2), mpz_class(3));
  CHECK(r == again);
  CHECK(Rat(5).str() == "5/1");
  CHECK(Rat(0).str() == "0/1");
  CHECK((Rat(3) / Rat(6)).str() == "1/2");
}

TEST_CASE("prime-field residues are canonical in [0, p)") {
  ZpField z7(7);
  CHECK(z7.from_int(-3) == Zp(4, 7));
  CHECK(z7.from_int(13) == Zp(6, 7));
  CHECK(z7.from_int(0).is_zero());
  CHECK((Zp(6, 7) + Zp(5, 7)) == Zp(4, 7));
  CHECK((Zp(2, 7) - Zp(5, 7)) == Zp(4, 7));
  CHECK((-Zp(0, 7)).is_zero());
}

TEST_CASE("division by zero raises in every field") {
  CHECK_THROWS_AS(F64(0.0).inv(), DivisionByZero);
  CHECK_THROWS_AS(Rat(0).inv(), DivisionByZero);
  CHECK_THROWS_AS(Zp(0, 7).inv(), DivisionByZero);
  CHECK_THROWS_AS(Rat(1) / Rat(0), DivisionByZero);
  CHECK_THROWS_AS(F64(1.0) / F64(0.0), DivisionByZero);
}

TEST_CASE("fld_pow pinned values and exponent law") {
  ZpField z7(7);
  CHECK(fld_pow(z7, Zp(3, 7), 0) == z7.one());
  CHECK(fld_pow(z7, Zp(3, 7), 6) == z7.one());  // little Fermat
  RatField rq;
  CHECK(fld_pow(rq, Rat::from_parts(mpz_class(1), mpz_class(2)), 3).str() ==
        "1/8");
  // 0^0 = 1 by convention.
  CHECK(fld_pow(rq, rq.zero(), 0) == rq.one());

  std::mt19937_64 g(21);
  for (int trial = 0; trial < 50; ++trial) {
    Zp a(g() % 998244353, 998244353);
    std::uint64_t m = g() % 64;
    std::uint64_t n = g() % 64;
    ZpField zbig(998244353);
    CHECK(fld_pow(zbig, a, m + n) == fld_pow(zbig, a, m) * fld_pow(zbig, a, n));
    Rat b = draw(rq, g);
    CHECK(fld_pow(rq, b, (m % 8) + (n % 8)) ==
          fld_pow(rq, b, m % 8) * fld_pow(rq, b, n % 8));
  }
}

TEST_CASE("primality screening accepts primes and rejects composites") {
  const std::uint64_t primes[] = {2,
                                  3,
                                  5,
                                  7,
                                  11,
                                  13,
                                  65537,
                                  998244353,
                                  (1ULL << 61) - 1};
  for (std::uint64_t p : primes) {
    CAPTURE(p);
    CHECK(is_prime_u64(p));
  }
  // 561, 1105, 1729, 6601 are Carmichael numbers (Fermat pseudoprime traps).
  const std::uint64_t composites[] = {0, 1,    4,    6,    9,   15,
                                      561, 1105, 1729, 6601, 1ULL << 40};
  for (std::uint64_t c : composites) {
    CAPTURE(c);
    CHECK(!is_prime_u64(c));
  }
}

TEST_CASE("prime-field construction validates the modulus") {
  CHECK_THROWS_AS(ZpField(1), ValueError);
  CHECK_THROWS_AS(ZpField(4), ValueError);
  CHECK_THROWS_AS(ZpField(561), ValueError);
  // 2^62 is out of range even if it were prime; (2^62 - 1) = 3·715827883·...
  CHECK_THROWS_AS(ZpField(1ULL << 62), ValueError);
  CHECK_NOTHROW(ZpField(2));
  CHECK_NOTHROW(ZpField((1ULL << 61) - 1));
  // Mixing moduli is a field mismatch.
  CHECK_THROWS_AS(Zp(1, 7) + Zp(1, 11), FieldMismatch);
}

TEST_CASE("large-modulus products do not wrap 64-bit range") {
  const std::uint64_t p = (1ULL << 61) - 1;
  ZpField zp(p);
  Zp a(p - 1, p);
  // (p-1)^2 mod p = 1; would overflow without 128-bit intermediates.
  CHECK(a * a == zp.one());
  CHECK(a.inv() * a == zp.one());
}

TEST_CASE("approx_equal uses atol + rtol*|b|") {
  CHECK(approx_equal(1.0, 1.0 + 5e-10));
  CHECK(!approx_equal(1.0, 1.0 + 5e-8));
  CHECK(approx_equal(0.0, 1e-13));
  CHECK(!approx_equal(0.0, 1e-11));
  CHECK(approx_equal(1e6, 1e6 * (1 + 1e-10)));
}

TEST_CASE("only f64 arithmetic moves the f64 op counter") {
  Counters before = counters_snapshot();
  Zp a(3, 7), b(5, 7);
  Rat r(4), s(9);
  for (int i = 0; i < 10; ++i) {
    a = a * b + a;
    r = r * s - r;
  }
  CHECK(counters_delta(before).f64_ops == 0);

  before = counters_snapshot();
  F64 x(1.5), y(2.5);
  F64 z = x * y;   // 1 op
  z = z + x;       // 1 op
  z = z - y;       // 1 op
  z = z / x;       // 1 op
  (void)z;
  CHECK(counters_delta(before).f64_ops == 4);
}

TEST_CASE("pivot policy is first-nonzero for exact fields, partial for f64") {
  static_assert(elimination_pivot_policy(RatField{}) ==
                PivotPolicy::kFirstNonzero);
  static_assert(elimination_pivot_policy(F64Field{}) ==
                PivotPolicy::kPartialAbs);
  CHECK(elimination_pivot_policy(ZpField(7)) == PivotPolicy::kFirstNonzero);
}
