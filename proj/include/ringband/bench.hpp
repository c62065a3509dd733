#pragma once

// Scaling benchmarks: wall time plus exact structured-operation counters for
// the three headline operations. Counters come from a single instrumented
// run and are bit-deterministic; wall time is the best of three trials, each
// trial averaging enough repetitions to dominate timer noise.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ringband/circulant.hpp"
#include "ringband/counters.hpp"
#include "ringband/cyclic_banded.hpp"
#include "ringband/errors.hpp"
#include "ringband/field.hpp"
#include "ringband/gen.hpp"

namespace ringband {

struct BenchRecord {
  std::string op;
  std::size_t k = 0;
  std::size_t n = 0;
  std::string field;
  std::uint64_t ns = 0;         // best-of-3 wall time per execution
  std::uint64_t block_muls = 0; // deterministic, from one counted run
  std::uint64_t entry_ops = 0;
  bool fallback = false;
};

inline const std::vector<std::string>& bench_ops() {
  static const std::vector<std::string> ops = {"det-kcm", "inv-kcm",
                                               "inv-kcbm"};
  return ops;
}

namespace detail {

// ns per execution: three trials, each averaging `reps` runs where reps is
// calibrated so one trial spans roughly two milliseconds.
inline std::uint64_t best_of_three_ns(const std::function<void()>& fn,
                                      std::uint64_t calibration_ns) {
  using clock = std::chrono::steady_clock;
  std::uint64_t reps = 1;
  if (calibration_ns > 0 && calibration_ns < 2'000'000)
    reps = std::min<std::uint64_t>(10'000, 2'000'000 / calibration_ns + 1);
  std::uint64_t best = UINT64_MAX;
  for (int trial = 0; trial < 3; ++trial) {
    const auto t0 = clock::now();
    for (std::uint64_t r = 0; r < reps; ++r) fn();
    const auto t1 = clock::now();
    const std::uint64_t ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
            .count());
    best = std::min(best, ns / reps);
  }
  return best;
}

template <typename Fn>
BenchRecord bench_one(const std::string& op, std::size_t k, std::size_t n,
                      const std::string& field_name, Fn&& run) {
  using clock = std::chrono::steady_clock;
  BenchRecord rec;
  rec.op = op;
  rec.k = k;
  rec.n = n;
  rec.field = field_name;

  // Counted (and calibration) run.
  const Counters before = counters_snapshot();
  const auto t0 = clock::now();
  rec.fallback = run();
  const auto t1 = clock::now();
  const Counters delta = counters_delta(before);
  rec.block_muls = delta.block_muls;
  rec.entry_ops = delta.entry_ops;

  const std::uint64_t calibration_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  rec.ns = best_of_three_ns([&run] { (void)run(); }, calibration_ns);
  return rec;
}

}  // namespace detail

// Run one benchmark operation over ascending orders. The generated instance
// per order is a fixed function of (seed, op, k, n, field).
template <FieldDesc F>
std::vector<BenchRecord> run_bench(const std::string& op, std::size_t k,
                                   const std::vector<std::size_t>& orders,
                                   const F& fld, std::uint64_t seed = 1) {
  if (op != "det-kcm" && op != "inv-kcm" && op != "inv-kcbm")
    throw ValueError("unknown bench op \"" + op +
                     "\" (expected det-kcm, inv-kcm, or inv-kcbm)");
  for (std::size_t i = 1; i < orders.size(); ++i)
    if (orders[i] <= orders[i - 1])
      throw ValueError("bench orders must be strictly ascending");

  std::vector<BenchRecord> records;
  records.reserve(orders.size());
  for (std::size_t n : orders) {
    RandomInstanceSpec<F> spec{seed, k,        n, 1 + (n % k), fld,
                               false, !F::exact};
    if (op == "inv-kcbm") {
      CyclicBandedMatrix<F> m = gen_cbm(spec);
      records.push_back(detail::bench_one(op, k, n, fld.name(), [&m] {
        return cbm_inverse(m).fallback;
      }));
    } else if (op == "inv-kcm") {
      CirculantMatrix<F> m = gen_cm(spec);
      records.push_back(detail::bench_one(op, k, n, fld.name(), [&m] {
        return cm_inverse(m).fallback;
      }));
    } else {
      CirculantMatrix<F> m = gen_cm(spec);
      records.push_back(detail::bench_one(op, k, n, fld.name(), [&m] {
        return cm_det_info(m).fallback;
      }));
    }
  }
  return records;
}

// CSV serialization: LF line endings, no BOM, no trailing comma.
inline std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "op,k,n,field,ns,block_muls,entry_ops,fallback\n";
  for (const BenchRecord& r : records)
    out << r.op << ',' << r.k << ',' << r.n << ',' << r.field << ',' << r.ns
        << ',' << r.block_muls << ',' << r.entry_ops << ','
        << (r.fallback ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace ringband
