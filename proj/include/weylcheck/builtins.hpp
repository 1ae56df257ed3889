#pragma once

// The densities the tool knows by name.
//   scalar         1/2 g^{mu nu} d_mu phi d_nu phi - lambda phi^4
//   maxwell        -1/4 g^{mu rho} g^{nu sigma} F_{mu nu} F_{rho sigma}
//   yangmills      same with F^i_{mu nu} = d_mu W^i_nu - d_nu W^i_mu - gc f^{ijk} W^j_mu W^k_nu
//   dirac          Psibar i gamma^c eps_c^mu [d_mu + i e A_mu
//                    - 1/2 sigma_{ab} eps^{b nu} (d_mu eps^a_nu - Gamma^rho_{mu nu} eps^a_rho)] Psi
//   scalar-gauged  1/2 g^{mu nu} (d_mu - f S_mu) phi (d_nu - f S_nu) phi - lambda phi^4

#include "weylcheck/expr.hpp"
#include "weylcheck/report.hpp"

#include <string>
#include <vector>

namespace weylcheck {

Expr scalar_density();
Expr maxwell_density();
Expr yangmills_density();
Expr dirac_density();
Expr scalar_gauged_density();

/// Pieces of the Dirac density: the d_mu Psi term and the spin-connection term.
Expr dirac_kinetic();
Expr dirac_spin_connection();

const std::vector<std::string>& builtin_names();
/// Throws Error for an unknown name.
LagrangianDef builtin(const std::string& name);

}  // namespace weylcheck
