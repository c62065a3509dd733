#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ringband {

// Root of the library's error taxonomy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structural errors.
struct DimensionMismatch : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};

// Value/field-domain errors.
struct ValueError : Error {
  using Error::Error;
};
struct FieldMismatch : ValueError {
  using ValueError::ValueError;
};
struct DivisionByZero : ValueError {
  using ValueError::ValueError;
};

// Algorithmic outcomes.
struct SingularMatrix : Error {
  SingularMatrix() : Error("matrix is singular (det = 0)") {}
  explicit SingularMatrix(const std::string& msg) : Error(msg) {}
};

// An internal cross-check equation failed; indicates a defect (exact fields)
// or an instance outside the float method's stable regime.
struct ConsistencyFailure : Error {
  using Error::Error;
};

// A double-precision intermediate left the representable/trustworthy range.
struct NumericOverflow : Error {
  using Error::Error;
};

// Row `row` (1-based) has a zero leading stencil entry where the banded
// row-fill recurrence must divide by it.
struct ZeroFirstStencilEntry : Error {
  std::size_t row;
  explicit ZeroFirstStencilEntry(std::size_t r)
      : Error("zero leading stencil entry at row " + std::to_string(r) +
              "; dense fallback required"),
        row(r) {}
};

// Randomized generation could not satisfy a constraint within its attempt
// budget.
struct GenerationExhausted : Error {
  using Error::Error;
};

// Input file violates the matrix-file schema; message names the JSON path.
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace ringband
