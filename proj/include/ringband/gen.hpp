#pragma once

// Seeded, reproducible random instance generation. All randomness flows
// through a standard mt19937_64 engine whose bit stream is fixed by the
// language standard, combined with in-house unbiased samplers, so identical
// specs produce identical matrices on every platform and toolchain.

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ringband/circulant.hpp"
#include "ringband/cyclic_banded.hpp"
#include "ringband/errors.hpp"
#include "ringband/field.hpp"
#include "ringband/oracle.hpp"

namespace ringband {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a_hash(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Unbiased uniform draw from [0, bound) by rejection.
inline std::uint64_t next_below(std::mt19937_64& g, std::uint64_t bound) {
  if (bound == 0) throw ValueError("empty sampling range");
  const std::uint64_t rem =
      (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
  std::uint64_t r;
  do {
    r = g();
  } while (r > limit);
  return r % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit_double(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

template <FieldDesc F>
struct RandomInstanceSpec {
  std::uint64_t seed = 0;
  std::size_t k = 1;
  std::size_t n = 1;
  std::size_t alignment = 1;
  F field{};
  bool ensure_invertible = false;
  bool diagonally_dominant = false;

  std::string describe() const {
    return "seed=" + std::to_string(seed) + " k=" + std::to_string(k) +
           " n=" + std::to_string(n) +
           " alignment=" + std::to_string(alignment) +
           " field=" + field.name() +
           " ensure_invertible=" + (ensure_invertible ? "true" : "false") +
           " diagonally_dominant=" + (diagonally_dominant ? "true" : "false");
  }
};

namespace detail {

template <FieldDesc F>
std::mt19937_64 gen_engine(const RandomInstanceSpec<F>& spec,
                           std::uint64_t stream_tag) {
  std::uint64_t state = spec.seed;
  std::uint64_t h = splitmix64(state);
  for (std::uint64_t piece :
       {static_cast<std::uint64_t>(spec.k), static_cast<std::uint64_t>(spec.n),
        static_cast<std::uint64_t>(spec.alignment),
        fnv1a_hash(spec.field.name()),
        static_cast<std::uint64_t>(spec.ensure_invertible ? 1 : 0),
        static_cast<std::uint64_t>(spec.diagonally_dominant ? 2 : 0),
        stream_tag}) {
    state = h ^ piece;
    h = splitmix64(state);
  }
  return std::mt19937_64(h);
}

inline F64 draw_value(const F64Field&, std::mt19937_64& g) {
  return F64(2.0 * unit_double(g) - 1.0);
}
inline Rat draw_value(const RatField&, std::mt19937_64& g) {
  return Rat(static_cast<long>(next_below(g, 19)) - 9);
}
inline Zp draw_value(const ZpField& f, std::mt19937_64& g) {
  return Zp(next_below(g, f.p), f.p);
}

template <FieldDesc F>
typename F::Value draw_nonzero(const F& f, std::mt19937_64& g) {
  for (;;) {
    typename F::Value v = draw_value(f, g);
    if (!v.is_zero()) return v;
  }
}

// One stencil: uniform entries, trailing value resampled until nonzero, and
// for dominant float instances the diagonal (alignment) slot boosted to the
// absolute sum of the others plus one.
template <FieldDesc F>
std::vector<typename F::Value> draw_stencil(const RandomInstanceSpec<F>& spec,
                                            std::mt19937_64& g) {
  std::vector<typename F::Value> x;
  x.reserve(spec.k);
  for (std::size_t j = 1; j < spec.k; ++j)
    x.push_back(draw_value(spec.field, g));
  x.push_back(draw_nonzero(spec.field, g));
  if constexpr (!F::exact) {
    if (spec.diagonally_dominant) {
      double sum = 0.0;
      for (std::size_t j = 0; j < spec.k; ++j)
        if (j + 1 != spec.alignment) sum += std::fabs(x[j].v);
      x[spec.alignment - 1] = F64(sum + 1.0);
    }
  }
  return x;
}

}  // namespace detail

template <FieldDesc F>
CirculantMatrix<F> gen_cm(const RandomInstanceSpec<F>& spec) {
  std::mt19937_64 g = detail::gen_engine(spec, 0xC1);
  const int attempts = spec.ensure_invertible ? 64 : 1;
  for (int a = 0; a < attempts; ++a) {
    CirculantMatrix<F> m(spec.field, spec.n, detail::draw_stencil(spec, g),
                         spec.alignment);
    if (!spec.ensure_invertible) return m;
    DenseMatrix<F> dense = dense_build_circulant(
        spec.field, m.stencil().x, spec.n, spec.alignment);
    if (!dense_det(dense).is_zero()) return m;
  }
  throw GenerationExhausted(
      "no invertible circulant instance found in 64 attempts for " +
      spec.describe());
}

template <FieldDesc F>
CyclicBandedMatrix<F> gen_cbm(const RandomInstanceSpec<F>& spec) {
  std::mt19937_64 g = detail::gen_engine(spec, 0xCB);
  const int attempts = spec.ensure_invertible ? 64 : 1;
  for (int a = 0; a < attempts; ++a) {
    std::vector<std::vector<typename F::Value>> rows;
    rows.reserve(spec.n);
    for (std::size_t r = 0; r < spec.n; ++r)
      rows.push_back(detail::draw_stencil(spec, g));
    CyclicBandedMatrix<F> m(spec.field, spec.n, std::move(rows),
                            spec.alignment);
    if (!spec.ensure_invertible) return m;
    DenseMatrix<F> dense =
        dense_build_banded(spec.field, m.rows(), spec.alignment);
    if (!dense_det(dense).is_zero()) return m;
  }
  throw GenerationExhausted(
      "no invertible cyclic banded instance found in 64 attempts for " +
      spec.describe());
}

}  // namespace ringband
