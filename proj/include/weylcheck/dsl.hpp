#pragma once

// Plain-text densities, e.g.
//
//   indices spacetime mu nu;
//   fields phi ginv;
//   1/2 * ginv[mu,nu] * d[mu](phi) * d[nu](phi) - lambda * phi^4
//
// Declarations end with ';'. An index's alphabet comes from its declaration
// or, when undeclared, from the slot it sits in; frame indices take ^ or _.
// Without a `fields` line every atom is allowed. `i` is the imaginary unit;
// lambda, f, e and gc are couplings. '#' starts a comment.

#include "weylcheck/report.hpp"

#include <string>

namespace weylcheck {

/// Throws ParseError, UndeclaredField or IndexArityMismatch.
LagrangianDef parse(const std::string& src, const std::string& name = "input");

/// Declaration block plus the canonical rendering of `e`.
std::string render_source(const Expr& e);

LagrangianDef make_lagrangian(const std::string& name, const Expr& e);

}  // namespace weylcheck
