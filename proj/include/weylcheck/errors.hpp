#pragma once

#include <stdexcept>
#include <string>

namespace weylcheck {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A repeated index that is not a proper up/down pair of one alphabet, or
/// terms of a sum whose free indices disagree.
struct MalformedIndex : Error {
  using Error::Error;
};

/// A substitution rule whose replacement does not carry the free indices of
/// the atom it replaces.
struct IndexClash : Error {
  using Error::Error;
};

/// Fermion fields out of bilinear order, or terms of a sum with different
/// spinor structure.
struct StructureError : Error {
  using Error::Error;
};

/// Covariantization met a derivative of an atom kind that has no rule.
struct UncoveredDerivative : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct UndeclaredField : Error {
  using Error::Error;
};

struct IndexArityMismatch : Error {
  using Error::Error;
};

struct UnboundIndex : Error {
  using Error::Error;
};

struct SingularAssignment : Error {
  using Error::Error;
};

}  // namespace weylcheck
