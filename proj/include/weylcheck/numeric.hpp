#pragma once

// Independent numeric evaluation of expressions. Fields are sampled as
// second-order jets at one point (equivalently, degree-two polynomials in
// the coordinates), the metric is built from a sampled tetrad, Lambda is
// exp(l) for a sampled degree-two l, and Clifford atoms are 4x4 matrices in
// the standard Dirac representation with eta = diag(+,-,-,-).

#include "weylcheck/expr.hpp"
#include "weylcheck/jet.hpp"
#include "weylcheck/rules.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace weylcheck {

using cplx = std::complex<double>;

struct Assignment {
  JetMatrix<double> tetrad;      // eps^a_mu as [a][mu]
  JetMatrix<double> tetrad_inv;  // eps_a^mu as [a][mu]
  JetMatrix<double> g;
  JetMatrix<double> ginv;
  RealJet sqrtg;
  RealJet phi;
  std::array<RealJet, 4> A;
  std::array<RealJet, 4> S;
  std::array<std::array<RealJet, 4>, kGaugeDimension> W;  // [i][mu]
  std::map<std::string, RealJet> ell;                     // Lambda_tag = exp(ell[tag])
  std::map<std::string, double> couplings;
  std::array<ComplexJet, 4> psi;
  std::array<ComplexJet, 4> psibar;

  /// Recomputes g, ginv, tetrad_inv and sqrtg from the tetrad. Throws
  /// SingularAssignment for a singular tetrad.
  void derive();
};

/// Resamples the tetrad until |det| >= 0.1. Scale parameters sampled: "",
/// "1" and "2".
Assignment sample_assignment(std::mt19937_64& rng);
/// Constant tetrad equal to the identity (g = eta); other fields sampled.
Assignment flat_assignment(std::mt19937_64& rng);

enum class Rescale { Local, Global };
/// Fields after a scale transformation with Lambda_tag: eps -> Lambda eps,
/// phi -> phi / Lambda, Psi -> Lambda^{-3/2} Psi, S -> S - d ln Lambda / f.
/// Global holds Lambda at its value at the evaluation point.
Assignment rescaled(const Assignment& a, Rescale mode, const std::string& tag = "");
double lambda_value(const Assignment& a, const std::string& tag = "");

/// Component array over the free labels of an expression (sorted by name).
/// Matrix-valued expressions carry the spinor labels "~row" and "~col";
/// open spinors carry "~spin".
struct Components {
  std::vector<std::string> labels;
  std::vector<int> dims;
  std::vector<cplx> data;
};

/// Throws UnboundIndex if a derivative order above two is requested or a
/// coupling or scale tag is unknown.
Components evaluate(const Expr& e, const Assignment& a);
Components evaluate(const Term& t, const Assignment& a);

/// max over components of |x - y| / max(1, |x|, |y|). Arrays with different
/// labels are compared after treating an empty (zero) array as zeros.
double deviation(const Components& x, const Components& y);
Components scaled(Components c, cplx factor);

/// Standard Dirac representation.
const std::array<std::array<std::array<cplx, 4>, 4>, 4>& dirac_gammas();

std::mt19937_64 trial_rng(std::uint64_t seed, int trial);

struct OracleOutcome {
  int trials = 0;
  double maxdev = 0.0;
  double tolerance = 1e-9;
  bool pass() const { return maxdev < tolerance; }
};

double tolerance_for(RuleCheck check);
/// Runs one rule against `trials` seeded assignments.
OracleOutcome check_rule(const RewriteRule& rule, int trials, std::uint64_t seed);

/// Every rewrite rule of the tensor, Clifford, scale and gauge modules.
std::vector<RewriteRule> all_rules();

struct RandomOptions {
  int max_terms = 3;
  int max_factors = 4;
  bool fermions = true;
  bool weyl_vector = true;
};
/// A random well-formed scalar density (no free indices).
Expr random_density(std::mt19937_64& rng, const RandomOptions& opts = {});

}  // namespace weylcheck
