// ringband CLI: determinants and inverses of k-diagonal circulant and cyclic
// banded matrices from JSON files, plus a randomized selftest against the
// dense oracle and scaling benchmarks with exact operation counters.
//
// Exit codes: 0 success, 1 schema/usage error, 2 field or value error,
// 3 singular matrix, 4 selftest mismatch.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "ringband/bench.hpp"
#include "ringband/circulant.hpp"
#include "ringband/cyclic_banded.hpp"
#include "ringband/errors.hpp"
#include "ringband/field.hpp"
#include "ringband/io.hpp"
#include "ringband/selftest.hpp"

namespace {

using ringband::json;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ringband::SchemaError("cannot open output file: " + path);
  out << text;
}

template <typename M>
inline constexpr bool is_circulant = requires(const M& m) { m.stencil(); };

json run_det(const std::string& input) {
  ringband::AnyMatrix any =
      ringband::parse_matrix(ringband::load_json_file(input));
  return std::visit(
      [](auto& m) -> json {
        if constexpr (is_circulant<std::decay_t<decltype(m)>>) {
          auto r = ringband::cm_det_info(m);
          return json{{"det", ringband::scalar_to_json(m.field(), r.det)},
                      {"fallback", r.fallback}};
        } else {
          auto r = ringband::cbm_det_info(m);
          return json{{"det", ringband::scalar_to_json(m.field(), r.det)},
                      {"fallback", r.fallback}};
        }
      },
      any);
}

json run_inv(const std::string& input, const std::string& format) {
  ringband::AnyMatrix any =
      ringband::parse_matrix(ringband::load_json_file(input));
  return std::visit(
      [&](auto& m) -> json {
        const auto& fld = m.field();
        if constexpr (is_circulant<std::decay_t<decltype(m)>>) {
          auto inv = ringband::cm_inverse(m);
          if (format == "vector") {
            json vec = json::array();
            for (const auto& v : inv.first_column)
              vec.push_back(ringband::scalar_to_json(fld, v));
            return vec;
          }
          auto grid = ringband::cm_materialize(fld, inv);
          json rows = json::array();
          for (std::size_t r = 0; r < grid.rows(); ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < grid.cols(); ++c)
              row.push_back(ringband::scalar_to_json(fld, grid(r, c)));
            rows.push_back(std::move(row));
          }
          return json{{"inverse", std::move(rows)},
                      {"fallback", inv.fallback}};
        } else {
          if (format == "vector")
            throw ringband::SchemaError(
                "--format vector is only valid for kcm inputs: a kcbm "
                "inverse has no single representing vector");
          auto inv = ringband::cbm_inverse(m);
          json rows = json::array();
          for (std::size_t r = 0; r < inv.entries.rows(); ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < inv.entries.cols(); ++c)
              row.push_back(ringband::scalar_to_json(fld, inv.entries(r, c)));
            rows.push_back(std::move(row));
          }
          return json{{"inverse", std::move(rows)},
                      {"fallback", inv.fallback}};
        }
      },
      any);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "structured determinants and inverses of k-diagonal circulant (kcm) "
      "and cyclic banded (kcbm) matrices"};
  app.require_subcommand(1);

  // --- det ---
  auto* det_cmd = app.add_subcommand("det", "determinant of a matrix file");
  std::string det_input, det_output;
  det_cmd->add_option("input", det_input, "JSON matrix file")->required();
  det_cmd->add_option("--output", det_output, "write result JSON here");

  // --- inv ---
  auto* inv_cmd = app.add_subcommand("inv", "inverse of a matrix file");
  std::string inv_input, inv_output, inv_format = "full";
  inv_cmd->add_option("input", inv_input, "JSON matrix file")->required();
  inv_cmd->add_option("--output", inv_output, "write result JSON here");
  inv_cmd->add_option("--format", inv_format, "full|vector (default full)")
      ->check(CLI::IsMember({"full", "vector"}));

  // --- selftest ---
  auto* st_cmd =
      app.add_subcommand("selftest", "randomized comparison vs dense oracle");
  ringband::SelftestOptions st_opt;
  std::string st_field = "all";
  auto* st_seed_opt =
      st_cmd->add_option("--seed", st_opt.seed, "random seed (default 7, or "
                                                "RINGBAND_SEED when set)");
  st_cmd->add_option("--max-k", st_opt.max_k, "largest band width (default 5)");
  st_cmd->add_option("--max-n", st_opt.max_n, "largest order (default 24)");
  st_cmd->add_option("--cases", st_opt.cases, "number of cases (default 200)");
  st_cmd->add_option("--field", st_field,
                     "all, f64, rational, or zp:<p> (default all)");
  bool st_fault = false;
  st_cmd->add_flag("--inject-fault", st_fault,
                   "negative control: corrupt one result on purpose")
      ->group("");  // hidden

  // --- bench ---
  auto* bench_cmd =
      app.add_subcommand("bench", "wall time and operation counters");
  std::string bench_op, bench_nlist, bench_field = "zp:998244353",
                        bench_out;
  std::size_t bench_k = 3;
  std::uint64_t bench_seed = 1;
  bench_cmd->add_option("--op", bench_op, "det-kcm | inv-kcm | inv-kcbm")
      ->required();
  bench_cmd->add_option("--k", bench_k, "band width (default 3)");
  bench_cmd->add_option("--n-list", bench_nlist,
                        "comma-separated ascending orders")
      ->required();
  bench_cmd->add_option("--field", bench_field,
                        "f64, rational, or zp:<p> (default zp:998244353)");
  bench_cmd->add_option("--out", bench_out, "CSV output path (default stdout)");
  bench_cmd->add_option("--seed", bench_seed, "instance seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*det_cmd) {
      write_text(det_output, run_det(det_input).dump(2) + "\n");
      return 0;
    }
    if (*inv_cmd) {
      write_text(inv_output, run_inv(inv_input, inv_format).dump(2) + "\n");
      return 0;
    }
    if (*st_cmd) {
      if (st_seed_opt->count() == 0) {
        if (const char* env = std::getenv("RINGBAND_SEED")) {
          try {
            st_opt.seed = std::stoull(env);
          } catch (const std::exception&) {
            throw ringband::ValueError(
                "RINGBAND_SEED must be an unsigned integer, got \"" +
                std::string(env) + "\"");
          }
        }
      }
      if (st_field == "all")
        st_opt.fields = {"zp:998244353", "rational", "f64"};
      else
        st_opt.fields = {st_field};
      st_opt.inject_fault = st_fault;
      st_opt.log = &std::cout;
      ringband::SelftestReport report = ringband::run_selftest(st_opt);
      return report.ok() ? 0 : 4;
    }
    if (*bench_cmd) {
      bool found = false;
      for (const std::string& op : ringband::bench_ops())
        found = found || op == bench_op;
      if (!found) {
        std::cerr << "error: unknown bench op \"" << bench_op
                  << "\" (expected det-kcm, inv-kcm, or inv-kcbm)\n";
        return 1;
      }
      std::vector<std::size_t> orders;
      std::stringstream ss(bench_nlist);
      std::string part;
      while (std::getline(ss, part, ',')) {
        try {
          orders.push_back(std::stoull(part));
        } catch (const std::exception&) {
          std::cerr << "error: bad order \"" << part << "\" in --n-list\n";
          return 1;
        }
      }
      for (std::size_t i = 1; i < orders.size(); ++i)
        if (orders[i] <= orders[i - 1]) {
          std::cerr << "error: --n-list orders must be strictly ascending\n";
          return 1;
        }
      if (orders.empty()) {
        std::cerr << "error: --n-list is empty\n";
        return 1;
      }
      std::vector<ringband::BenchRecord> records =
          ringband::detail::with_field_tag(bench_field, [&](auto fld) {
            return ringband::run_bench(bench_op, bench_k, orders, fld,
                                       bench_seed);
          });
      write_text(bench_out, ringband::bench_csv(records));
      return 0;
    }
  } catch (const ringband::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ringband::SingularMatrix& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ringband::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
