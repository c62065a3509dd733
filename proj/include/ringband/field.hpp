#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "ringband/counters.hpp"
#include "ringband/errors.hpp"

namespace ringband {

// ---------------------------------------------------------------------------
// Modular-arithmetic helpers (definitions in field.cpp).
// ---------------------------------------------------------------------------

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);
std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m);
// Inverse of a modulo prime p via extended Euclid; throws DivisionByZero on 0.
std::uint64_t invmod_u64(std::uint64_t a, std::uint64_t p);

// ---------------------------------------------------------------------------
// Float64 field.
// ---------------------------------------------------------------------------

struct F64 {
  double v = 0.0;

  F64() = default;
  explicit F64(double x) : v(x) {}

  bool is_zero() const { return v == 0.0; }

  friend F64 operator+(F64 a, F64 b) {
    ++counters().f64_ops;
    return F64(a.v + b.v);
  }
  friend F64 operator-(F64 a, F64 b) {
    ++counters().f64_ops;
    return F64(a.v - b.v);
  }
  friend F64 operator*(F64 a, F64 b) {
    ++counters().f64_ops;
    return F64(a.v * b.v);
  }
  friend F64 operator-(F64 a) {
    ++counters().f64_ops;
    return F64(-a.v);
  }
  F64 inv() const {
    if (v == 0.0) throw DivisionByZero("division by zero in f64");
    ++counters().f64_ops;
    return F64(1.0 / v);
  }
  friend F64 operator/(F64 a, F64 b) {
    if (b.v == 0.0) throw DivisionByZero("division by zero in f64");
    ++counters().f64_ops;
    return F64(a.v / b.v);
  }
  friend bool operator==(F64 a, F64 b) { return a.v == b.v; }
  friend bool operator!=(F64 a, F64 b) { return a.v != b.v; }
};

struct F64Field {
  using Value = F64;
  static constexpr bool exact = false;

  Value zero() const { return F64(0.0); }
  Value one() const { return F64(1.0); }
  Value from_int(long long x) const { return F64(static_cast<double>(x)); }
  static std::string name() { return "f64"; }
  friend bool operator==(const F64Field&, const F64Field&) { return true; }
};

// Component-wise closeness: |a - b| <= atol + rtol*|b|.
inline bool approx_equal(double a, double b, double atol = 1e-12,
                         double rtol = 1e-9) {
  return std::fabs(a - b) <= atol + rtol * std::fabs(b);
}

// ---------------------------------------------------------------------------
// Arbitrary-precision rational field (GMP-backed, always lowest terms with a
// positive denominator).
// ---------------------------------------------------------------------------

struct Rat {
  mpq_class v;

  Rat() : v(0) {}
  explicit Rat(long long x) : v(static_cast<long>(x)) {}
  explicit Rat(mpq_class q) : v(std::move(q)) { v.canonicalize(); }
  static Rat from_parts(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DivisionByZero("rational with zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    Rat r;
    r.v = std::move(q);
    return r;
  }

  bool is_zero() const { return v == 0; }
  const mpz_class num() const { return v.get_num(); }
  const mpz_class den() const { return v.get_den(); }
  std::string str() const { return num().get_str() + "/" + den().get_str(); }

  friend Rat operator+(const Rat& a, const Rat& b) { return wrap(a.v + b.v); }
  friend Rat operator-(const Rat& a, const Rat& b) { return wrap(a.v - b.v); }
  friend Rat operator*(const Rat& a, const Rat& b) { return wrap(a.v * b.v); }
  friend Rat operator-(const Rat& a) { return wrap(-a.v); }
  Rat inv() const {
    if (is_zero()) throw DivisionByZero("division by zero in rational");
    return wrap(mpq_class(v.get_den(), v.get_num()));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.is_zero()) throw DivisionByZero("division by zero in rational");
    return wrap(a.v / b.v);
  }
  friend bool operator==(const Rat& a, const Rat& b) { return a.v == b.v; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v != b.v; }

 private:
  // mpq arithmetic keeps canonical operands canonical except for the sign of
  // a raw num/den swap, so normalize once on the way in.
  static Rat wrap(mpq_class q) {
    q.canonicalize();
    Rat r;
    r.v = std::move(q);
    return r;
  }
};

struct RatField {
  using Value = Rat;
  static constexpr bool exact = true;

  Value zero() const { return Rat(); }
  Value one() const { return Rat(1); }
  Value from_int(long long x) const { return Rat(x); }
  static std::string name() { return "rational"; }
  friend bool operator==(const RatField&, const RatField&) { return true; }
};

// ---------------------------------------------------------------------------
// Prime field Z_p, p prime and < 2^62 so products fit in 128-bit
// intermediates. Values store canonical representatives in [0, p).
// ---------------------------------------------------------------------------

struct Zp {
  std::uint64_t v = 0;
  std::uint64_t p = 0;  // 0 marks a default-constructed placeholder

  Zp() = default;
  Zp(std::uint64_t value, std::uint64_t modulus) : v(value), p(modulus) {}

  bool is_zero() const { return v == 0; }

  static void require_match(const Zp& a, const Zp& b) {
    if (a.p == 0 || b.p == 0)
      throw FieldMismatch("operation on uninitialized Z_p value");
    if (a.p != b.p)
      throw FieldMismatch("mixed moduli: " + std::to_string(a.p) + " vs " +
                          std::to_string(b.p));
  }

  friend Zp operator+(const Zp& a, const Zp& b) {
    require_match(a, b);
    std::uint64_t s = a.v + b.v;  // p < 2^62 so no wraparound
    if (s >= a.p) s -= a.p;
    return Zp(s, a.p);
  }
  friend Zp operator-(const Zp& a, const Zp& b) {
    require_match(a, b);
    std::uint64_t s = a.v + a.p - b.v;
    if (s >= a.p) s -= a.p;
    return Zp(s, a.p);
  }
  friend Zp operator*(const Zp& a, const Zp& b) {
    require_match(a, b);
    return Zp(mulmod_u64(a.v, b.v, a.p), a.p);
  }
  friend Zp operator-(const Zp& a) {
    if (a.p == 0) throw FieldMismatch("operation on uninitialized Z_p value");
    return Zp(a.v == 0 ? 0 : a.p - a.v, a.p);
  }
  Zp inv() const {
    if (p == 0) throw FieldMismatch("operation on uninitialized Z_p value");
    return Zp(invmod_u64(v, p), p);
  }
  friend Zp operator/(const Zp& a, const Zp& b) {
    require_match(a, b);
    return a * b.inv();
  }
  friend bool operator==(const Zp& a, const Zp& b) {
    require_match(a, b);
    return a.v == b.v;
  }
  friend bool operator!=(const Zp& a, const Zp& b) { return !(a == b); }
};

struct ZpField {
  using Value = Zp;
  static constexpr bool exact = true;

  std::uint64_t p = 0;

  ZpField() = default;
  explicit ZpField(std::uint64_t modulus) : p(modulus) {
    if (modulus < 2 || modulus >= (std::uint64_t{1} << 62))
      throw ValueError("Z_p modulus must satisfy 2 <= p < 2^62, got " +
                       std::to_string(modulus));
    if (!is_prime_u64(modulus))
      throw ValueError("Z_p modulus must be prime, got " +
                       std::to_string(modulus));
  }

  Value zero() const { return Zp(0, p); }
  Value one() const { return Zp(p > 1 ? 1 : 0, p); }
  Value from_int(long long x) const {
    long long r = x % static_cast<long long>(p);
    if (r < 0) r += static_cast<long long>(p);
    return Zp(static_cast<std::uint64_t>(r), p);
  }
  std::string name() const { return "zp:" + std::to_string(p); }
  friend bool operator==(const ZpField& a, const ZpField& b) {
    return a.p == b.p;
  }
};

// ---------------------------------------------------------------------------
// Field concept + generic helpers.
// ---------------------------------------------------------------------------

template <typename F>
concept FieldDesc = requires(const F f, const typename F::Value a,
                             const typename F::Value b) {
  { f.zero() } -> std::same_as<typename F::Value>;
  { f.one() } -> std::same_as<typename F::Value>;
  { f.from_int(1LL) } -> std::same_as<typename F::Value>;
  { a + b } -> std::same_as<typename F::Value>;
  { a - b } -> std::same_as<typename F::Value>;
  { a* b } -> std::same_as<typename F::Value>;
  { -a } -> std::same_as<typename F::Value>;
  { a.inv() } -> std::same_as<typename F::Value>;
  { a.is_zero() } -> std::same_as<bool>;
  { a == b } -> std::same_as<bool>;
  { F::exact } -> std::convertible_to<bool>;
};

// Multiplicative inverse; throws DivisionByZero on zero input.
template <typename V>
V fld_inv(const V& a) {
  return a.inv();
}

// Binary exponentiation with the convention 0^0 = 1.
template <FieldDesc F>
typename F::Value fld_pow(const F& field, typename F::Value base,
                          std::uint64_t e) {
  typename F::Value acc = field.one();
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

// Tolerance for a-posteriori residual and wrap checks on the f64 paths.
inline constexpr double kFloatResidualTol = 1e-8;

// Canonical representative of `a` modulo `n` for possibly-negative `a`.
inline std::size_t mod_index(long long a, std::size_t n) {
  const long long nn = static_cast<long long>(n);
  return static_cast<std::size_t>((a % nn + nn) % nn);
}

// Pivot selection strategy used by Gaussian elimination.
enum class PivotPolicy { kFirstNonzero, kPartialAbs };

template <FieldDesc F>
constexpr PivotPolicy elimination_pivot_policy(const F&) {
  return F::exact ? PivotPolicy::kFirstNonzero : PivotPolicy::kPartialAbs;
}

// Magnitude key for partial pivoting; only meaningful for f64.
inline double pivot_weight(const F64& a) { return std::fabs(a.v); }
inline double pivot_weight(const Rat& a) { return a.is_zero() ? 0.0 : 1.0; }
inline double pivot_weight(const Zp& a) { return a.is_zero() ? 0.0 : 1.0; }

inline bool value_is_finite(const F64& a) { return std::isfinite(a.v); }
inline bool value_is_finite(const Rat&) { return true; }
inline bool value_is_finite(const Zp&) { return true; }

}  // namespace ringband
