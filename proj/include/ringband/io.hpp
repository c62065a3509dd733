#pragma once

// JSON matrix-file parsing and result serialization. Matrices are stored by
// their O(kn) describing scalars, never as dense grids. Scalar encoding per
// field: JSON numbers for f64, "p/q" strings (integers also accepted) for
// rationals, integers for Z_p. Every schema violation names the offending
// JSON path.

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ringband/circulant.hpp"
#include "ringband/cyclic_banded.hpp"
#include "ringband/errors.hpp"
#include "ringband/field.hpp"

namespace ringband {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("malformed JSON in " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Scalar conversions

inline F64 scalar_from_json(const F64Field&, const json& j,
                            const std::string& path) {
  if (!j.is_number())
    throw SchemaError(path + ": expected a number for an f64 scalar");
  return F64(j.get<double>());
}

inline Rat scalar_from_json(const RatField&, const json& j,
                            const std::string& path) {
  if (j.is_number_integer())
    return Rat(static_cast<long long>(j.get<std::int64_t>()));
  if (!j.is_string())
    throw SchemaError(path +
                      ": expected a \"p/q\" string or integer for a rational "
                      "scalar");
  const std::string s = j.get<std::string>();
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw SchemaError(path + ": cannot parse rational \"" + s + "\"");
  if (q.get_den() == 0)
    throw SchemaError(path + ": zero denominator in \"" + s + "\"");
  return Rat(std::move(q));
}

inline Zp scalar_from_json(const ZpField& f, const json& j,
                           const std::string& path) {
  if (!j.is_number_integer())
    throw SchemaError(path + ": expected an integer for a Z_p scalar");
  return f.from_int(j.get<std::int64_t>());
}

inline json scalar_to_json(const F64Field&, const F64& v) { return v.v; }
inline json scalar_to_json(const RatField&, const Rat& v) { return v.str(); }
inline json scalar_to_json(const ZpField&, const Zp& v) { return v.v; }

// ---------------------------------------------------------------------------
// Matrix files

using AnyMatrix =
    std::variant<CirculantMatrix<F64Field>, CirculantMatrix<RatField>,
                 CirculantMatrix<ZpField>, CyclicBandedMatrix<F64Field>,
                 CyclicBandedMatrix<RatField>, CyclicBandedMatrix<ZpField>>;

namespace detail {

inline std::size_t size_field(const json& doc, const char* key) {
  if (!doc.contains(key))
    throw SchemaError(std::string("/") + key + ": missing required field");
  const json& j = doc.at(key);
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw SchemaError(std::string("/") + key +
                      ": expected a non-negative integer");
  return static_cast<std::size_t>(j.get<std::int64_t>());
}

template <FieldDesc F>
AnyMatrix parse_typed_matrix(F fld, const json& doc) {
  const std::string type = doc.at("type").get<std::string>();
  const std::size_t n = size_field(doc, "n");
  const std::size_t k = size_field(doc, "k");
  const std::size_t alignment = size_field(doc, "alignment");

  if (type == "kcm") {
    if (!doc.contains("stencil"))
      throw SchemaError("/stencil: missing required field for type kcm");
    const json& st = doc.at("stencil");
    if (!st.is_array() || st.size() != k)
      throw SchemaError("/stencil: expected an array of k=" +
                        std::to_string(k) + " scalars");
    std::vector<typename F::Value> x;
    x.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
      x.push_back(scalar_from_json(fld, st[j],
                                   "/stencil/" + std::to_string(j)));
    return CirculantMatrix<F>(fld, n, std::move(x), alignment);
  }
  if (type == "kcbm") {
    if (!doc.contains("rows"))
      throw SchemaError("/rows: missing required field for type kcbm");
    const json& rows = doc.at("rows");
    if (!rows.is_array() || rows.size() != n)
      throw SchemaError("/rows: expected an array of n=" + std::to_string(n) +
                        " stencils");
    std::vector<std::vector<typename F::Value>> vals;
    vals.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      const json& row = rows[r];
      const std::string rpath = "/rows/" + std::to_string(r);
      if (!row.is_array() || row.size() != k)
        throw SchemaError(rpath + ": expected an array of k=" +
                          std::to_string(k) + " scalars");
      std::vector<typename F::Value> stencil;
      stencil.reserve(k);
      for (std::size_t j = 0; j < k; ++j)
        stencil.push_back(
            scalar_from_json(fld, row[j], rpath + "/" + std::to_string(j)));
      vals.push_back(std::move(stencil));
    }
    return CyclicBandedMatrix<F>(fld, n, std::move(vals), alignment);
  }
  throw SchemaError("/type: expected \"kcm\" or \"kcbm\", got \"" + type +
                    "\"");
}

}  // namespace detail

// Parse the "field" member into one of the three field descriptors and hand
// the document to fn, which receives (descriptor, doc).
template <typename Fn>
auto with_parsed_field(const json& doc, Fn&& fn) {
  if (!doc.contains("field"))
    throw SchemaError("/field: missing required field");
  const json& f = doc.at("field");
  if (f.is_string()) {
    const std::string name = f.get<std::string>();
    if (name == "f64") return fn(F64Field{});
    if (name == "rational") return fn(RatField{});
    throw SchemaError("/field: unknown field \"" + name +
                      "\" (expected \"f64\", \"rational\", or {\"zp\": p})");
  }
  if (f.is_object() && f.contains("zp")) {
    const json& p = f.at("zp");
    if (!p.is_number_integer())
      throw SchemaError("/field/zp: expected an integer modulus");
    const std::int64_t raw = p.get<std::int64_t>();
    if (raw < 2)
      throw ValueError("Z_p modulus must satisfy 2 <= p < 2^62, got " +
                       std::to_string(raw));
    return fn(ZpField(static_cast<std::uint64_t>(raw)));
  }
  throw SchemaError(
      "/field: expected \"f64\", \"rational\", or an object {\"zp\": p}");
}

inline AnyMatrix parse_matrix(const json& doc) {
  if (!doc.is_object()) throw SchemaError("/: expected a JSON object");
  if (!doc.contains("type"))
    throw SchemaError("/type: missing required field");
  if (!doc.at("type").is_string())
    throw SchemaError("/type: expected a string");
  return with_parsed_field(
      doc, [&](auto fld) { return detail::parse_typed_matrix(fld, doc); });
}

template <FieldDesc F>
json field_to_json(const F& fld) {
  if constexpr (std::is_same_v<F, F64Field>) {
    (void)fld;
    return "f64";
  } else if constexpr (std::is_same_v<F, RatField>) {
    (void)fld;
    return "rational";
  } else {
    return json{{"zp", fld.p}};
  }
}

template <FieldDesc F>
json matrix_to_json(const CirculantMatrix<F>& m) {
  json st = json::array();
  for (std::size_t j = 1; j <= m.k(); ++j)
    st.push_back(scalar_to_json(m.field(), m.x(j)));
  return json{{"field", field_to_json(m.field())},
              {"type", "kcm"},
              {"n", m.n()},
              {"k", m.k()},
              {"alignment", m.alignment()},
              {"stencil", std::move(st)}};
}

template <FieldDesc F>
json matrix_to_json(const CyclicBandedMatrix<F>& m) {
  json rows = json::array();
  for (std::size_t r = 1; r <= m.n(); ++r) {
    json row = json::array();
    for (std::size_t j = 1; j <= m.k(); ++j)
      row.push_back(scalar_to_json(m.field(), m.x(r, j)));
    rows.push_back(std::move(row));
  }
  return json{{"field", field_to_json(m.field())},
              {"type", "kcbm"},
              {"n", m.n()},
              {"k", m.k()},
              {"alignment", m.alignment()},
              {"rows", std::move(rows)}};
}

}  // namespace ringband
