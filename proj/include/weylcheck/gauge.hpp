#pragma once

// Scale-covariant derivatives: d_mu X -> (d_mu + w f S_mu) X for a field of
// Weyl weight w, i.e. +2 for g, -2 for ginv, +1 for eps, -1 for epsinv and
// phi, -3/2 for Psi and Psibar. A and W are left alone.

#include "weylcheck/expr.hpp"
#include "weylcheck/report.hpp"
#include "weylcheck/rules.hpp"

#include <optional>
#include <vector>

namespace weylcheck {

/// Weight used in the covariant derivative of `kind`, or nullopt when the
/// kind is exempt (A, W) or has no rule.
std::optional<Rational> covariant_weight(AtomKind kind);

/// Throws UncoveredDerivative for a derivative of an atom without a rule or
/// for repeated derivatives of one atom.
Expr gauge_covariantize(const Expr& L);

/// Covariantizing the Dirac density changes nothing: the S terms from the
/// spin connection, f gamma^c sigma_cb eps^{b nu} S_nu = 3/2 f gamma^b eps_b^nu S_nu,
/// cancel the -3/2 f S_mu from d_mu Psi.
VerificationReport verify_fermion_decoupling(int trials = 5, std::uint64_t seed = 1);

/// Maxwell and Yang-Mills densities are unchanged.
VerificationReport verify_gauge_decoupling(int trials = 5, std::uint64_t seed = 1);

/// The scalar does couple: the difference is -f g^{mu nu} S_mu phi d_nu phi
/// + f^2/2 g^{mu nu} S_mu S_nu phi^2.
VerificationReport verify_scalar_coupling(int trials = 5, std::uint64_t seed = 1);

std::vector<RewriteRule> gauge_rules();

}  // namespace weylcheck
