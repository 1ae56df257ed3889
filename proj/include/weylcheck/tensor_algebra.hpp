#pragma once

#include "weylcheck/expr.hpp"
#include "weylcheck/rules.hpp"

#include <vector>

namespace weylcheck {

/// Contracts metric, inverse metric, eta, delta and tetrad pairs until no
/// rule applies, then canonicalizes. Only underived atoms take part:
///   g^{mu rho} g_{rho nu} -> delta^mu_nu        delta^mu_mu -> 4
///   eta absorbed into its contraction partner  eta^a_a -> 4
///   eps^a_mu eps_a^nu -> delta^nu_mu           eps^a_mu eps_b^mu -> eta^a_b
///   eps_{a mu} eps^a_nu -> g_{mu nu}           eps_a^mu eps^{a nu} -> g^{mu nu}
///   g^{mu nu} eps^a_nu -> eps^{a mu}           g_{mu nu} eps_a^nu -> eps_{a mu}
Expr contract_pairs(const Expr& e);

struct ChristoffelExpr {
  Index upper;
  Index lower_first;
  Index lower_second;
  Expr expansion;
};

/// Gamma^rho_{mu nu} = g^{rho sigma}/2 (d_mu g_{sigma nu} + d_nu g_{sigma mu} - d_sigma g_{mu nu}).
ChristoffelExpr christoffel(const Index& rho = st("rho", Variance::Upper), const Index& mu = st("mu"),
                            const Index& nu = st("nu"));

std::vector<RewriteRule> tensor_rules();

}  // namespace weylcheck
