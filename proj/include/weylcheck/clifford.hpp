#pragma once

#include "weylcheck/expr.hpp"
#include "weylcheck/rules.hpp"

#include <vector>

namespace weylcheck {

/// Replaces every sigma^{ab} by (gamma^a gamma^b - gamma^b gamma^a)/4.
Expr expand_sigma(const Expr& e);

/// Rewrites every Clifford chain into the antisymmetrized basis
/// {1, gamma^a, gamma^{[ab]}, gamma^{[abc]}, gamma^{[abcd]}} using
/// {gamma^a, gamma^b} = 2 eta^{ab} with eta = diag(+,-,-,-); rank-5 products
/// vanish in four dimensions. Sigma atoms are expanded first. Contracted eta
/// factors are absorbed, so gamma^c gamma_c -> 4.
Expr gamma_canonicalize(const Expr& e);

/// contract_pairs, expand_sigma and gamma_canonicalize iterated to a fixpoint.
Expr simplify(const Expr& e);

/// Coefficient c(d) in gamma^c sigma_{cb} = c(d) gamma_b for a d-dimensional
/// frame, from {gamma^a, gamma^b} = 2 eta^{ab}: (d - 1)/2.
Rational gamma_sigma_coefficient(int dimension);

std::vector<RewriteRule> clifford_rules();

}  // namespace weylcheck
