// In-process checks of the randomized selftest harness and the benchmark
// runner: report bookkeeping, fault injection, field-tag dispatch, pure
// finite-field runs, counter formulas, and CSV rendering.

#include <doctest.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <ringband/bench.hpp>
#include <ringband/counters.hpp>
#include <ringband/errors.hpp>
#include <ringband/field.hpp>
#include <ringband/selftest.hpp>

using namespace ringband;

namespace {

std::uint64_t ceil_log2(std::uint64_t n) {
  std::uint64_t bits = 0;
  while ((1ull << bits) < n) ++bits;
  return bits;
}

}  // namespace

TEST_CASE("selftest reports consistent tallies and passes across fields") {
  SelftestOptions opt;
  opt.cases = 36;
  opt.max_k = 4;
  opt.max_n = 16;
  opt.seed = 11;
  opt.fields = {"zp:998244353", "rational", "f64"};

  SelftestReport report = run_selftest(opt);
  CHECK(report.ok());
  CHECK(report.passed == 36);
  CHECK(report.failed == 0);
  CHECK(report.failures.empty());

  // Cells partition the cases; the three field tags split them evenly.
  std::size_t total = 0, zp_total = 0, rat_total = 0, f64_total = 0;
  for (const auto& [key, counts] : report.cells) {
    const auto& [k, n, field] = key;
    CHECK(k >= 1);
    CHECK(k <= 4);
    CHECK(n >= k);
    CHECK(n <= 16);
    total += counts.first + counts.second;
    if (field == "zp:998244353") zp_total += counts.first + counts.second;
    if (field == "rational") rat_total += counts.first + counts.second;
    if (field == "f64") f64_total += counts.first + counts.second;
  }
  CHECK(total == 36);
  CHECK(zp_total == 12);
  CHECK(rat_total == 12);
  CHECK(f64_total == 12);
}

TEST_CASE("selftest fault injection is caught and reported") {
  SelftestOptions opt;
  opt.cases = 10;
  opt.max_k = 3;
  opt.max_n = 12;
  opt.seed = 3;
  opt.fields = {"zp:7"};
  opt.inject_fault = true;

  SelftestReport report = run_selftest(opt);
  CHECK_FALSE(report.ok());
  CHECK(report.failed == 1);
  CHECK(report.passed == 9);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].find("det mismatch") != std::string::npos);
  // The failure message carries the reproducible instance description.
  CHECK(report.failures[0].find("seed=") != std::string::npos);
}

TEST_CASE("selftest runs in pure finite fields without any f64 traffic") {
  for (const char* tag : {"zp:7", "zp:998244353"}) {
    SelftestOptions opt;
    opt.cases = 40;
    opt.max_k = 5;
    opt.max_n = 18;
    opt.seed = 21;
    opt.fields = {tag};

    Counters before = counters_snapshot();
    SelftestReport report = run_selftest(opt);
    const std::uint64_t f64_delta = counters_delta(before).f64_ops;

    CHECK(report.ok());
    CHECK(report.passed == 40);
    CHECK(f64_delta == 0);
  }
}

TEST_CASE("selftest passes on rational-only and f64-only slices") {
  {
    SelftestOptions opt;
    opt.cases = 12;
    opt.max_k = 3;
    opt.max_n = 10;
    opt.seed = 5;
    opt.fields = {"rational"};
    CHECK(run_selftest(opt).ok());
  }
  {
    SelftestOptions opt;
    opt.cases = 30;
    opt.max_k = 4;
    opt.max_n = 20;
    opt.seed = 9;
    opt.fields = {"f64"};
    CHECK(run_selftest(opt).ok());
  }
}

TEST_CASE("selftest log stream mirrors the report") {
  SelftestOptions opt;
  opt.cases = 8;
  opt.max_k = 2;
  opt.max_n = 8;
  opt.seed = 2;
  opt.fields = {"zp:7"};
  std::ostringstream log;
  opt.log = &log;

  SelftestReport report = run_selftest(opt);
  CHECK(report.ok());
  const std::string text = log.str();
  CHECK(text.find("total: 8 passed, 0 failed") != std::string::npos);
}

TEST_CASE("selftest option validation") {
  SelftestOptions opt;
  opt.fields = {};
  CHECK_THROWS_AS(run_selftest(opt), ValueError);

  SelftestOptions bad_range;
  bad_range.max_k = 10;
  bad_range.max_n = 4;
  CHECK_THROWS_AS(run_selftest(bad_range), ValueError);

  SelftestOptions bad_tag;
  bad_tag.cases = 1;
  bad_tag.fields = {"float32"};
  CHECK_THROWS_AS(run_selftest(bad_tag), ValueError);
}

TEST_CASE("field tags dispatch to the right descriptors") {
  const std::uint64_t p =
      detail::with_field_tag("zp:13", [](auto fld) -> std::uint64_t {
        if constexpr (requires { fld.p; })
          return fld.p;
        else
          return 0;
      });
  CHECK(p == 13);

  const bool is_rat =
      detail::with_field_tag("rational", [](auto fld) {
        return std::is_same_v<decltype(fld), RatField>;
      });
  CHECK(is_rat);

  const bool is_f64 = detail::with_field_tag("f64", [](auto fld) {
    return std::is_same_v<decltype(fld), F64Field>;
  });
  CHECK(is_f64);

  auto ignore = [](auto) { return 0; };
  CHECK_THROWS_AS(detail::with_field_tag("zp:abc", ignore), ValueError);
  CHECK_THROWS_AS(detail::with_field_tag("zp:", ignore), ValueError);
  CHECK_THROWS_AS(detail::with_field_tag("Q", ignore), ValueError);
  CHECK_THROWS_AS(detail::with_field_tag("zp:4", ignore), ValueError);
}

TEST_CASE("bench validates operations and order lists") {
  ZpField zp(998244353);
  CHECK_THROWS_AS(run_bench("lu-kcm", 3, {8, 16}, zp), ValueError);
  CHECK_THROWS_AS(run_bench("det-kcm", 3, {16, 8}, zp), ValueError);
  CHECK_THROWS_AS(run_bench("det-kcm", 3, {8, 8}, zp), ValueError);

  const std::vector<std::string> ops = bench_ops();
  REQUIRE(ops.size() == 3);
  CHECK(ops[0] == "det-kcm");
  CHECK(ops[1] == "inv-kcm");
  CHECK(ops[2] == "inv-kcbm");
}

TEST_CASE("bench records carry the pinned counter formulas") {
  ZpField zp(998244353);

  // Determinant: a logarithmic number of block multiplications.
  for (auto rec : run_bench("det-kcm", 5, {256, 1024, 4096}, zp, 3)) {
    CHECK(rec.op == "det-kcm");
    CHECK(rec.k == 5);
    CHECK_FALSE(rec.fallback);
    CHECK(rec.ns > 0);
    CHECK(rec.block_muls <= 2 * ceil_log2(rec.n) + 4);
  }

  // Circulant inverse extension: exactly k (n - k + 1) entry steps.
  for (auto rec : run_bench("inv-kcm", 4, {64, 128}, zp, 3)) {
    CHECK_FALSE(rec.fallback);
    CHECK(rec.entry_ops == 4 * (rec.n - 4 + 1));
  }

  // Banded inverse: exactly k n^2 entry steps on the fast path, inside the
  // k n^2 .. k n^2 + 8 k n budget window.
  for (auto rec : run_bench("inv-kcbm", 3, {32, 64}, zp, 3)) {
    CHECK_FALSE(rec.fallback);
    CHECK(rec.entry_ops == 3 * rec.n * rec.n);
    CHECK(rec.entry_ops >= 3 * rec.n * rec.n);
    CHECK(rec.entry_ops <= 3 * rec.n * rec.n + 8 * 3 * rec.n);
  }
}

TEST_CASE("bench counter columns are deterministic run to run") {
  ZpField zp(998244353);
  auto a = run_bench("inv-kcbm", 3, {16, 32}, zp, 7);
  auto b = run_bench("inv-kcbm", 3, {16, 32}, zp, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].op == b[i].op);
    CHECK(a[i].k == b[i].k);
    CHECK(a[i].n == b[i].n);
    CHECK(a[i].field == b[i].field);
    CHECK(a[i].block_muls == b[i].block_muls);
    CHECK(a[i].entry_ops == b[i].entry_ops);
    CHECK(a[i].fallback == b[i].fallback);
  }
}

TEST_CASE("bench CSV renders the pinned header and one row per order") {
  ZpField zp(998244353);
  F64Field f;
  auto records = run_bench("det-kcm", 3, {16, 32, 64}, zp, 1);
  auto frecords = run_bench("det-kcm", 2, {16}, f, 1);
  records.insert(records.end(), frecords.begin(), frecords.end());

  const std::string csv = bench_csv(records);
  REQUIRE_FALSE(csv.empty());
  CHECK(csv.back() == '\n');
  CHECK(csv.find('\r') == std::string::npos);

  std::vector<std::string> lines;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  REQUIRE(lines.size() == 1 + records.size());
  CHECK(lines[0] == "op,k,n,field,ns,block_muls,entry_ops,fallback");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::size_t commas = 0;
    for (char c : lines[i]) commas += c == ',';
    CHECK(commas == 7);
    CHECK(lines[i].back() != ',');
  }
  // The f64 row names its field tag.
  CHECK(lines.back().find(",f64,") != std::string::npos);
  CHECK(lines[1].find(",zp:998244353,") != std::string::npos);
}
