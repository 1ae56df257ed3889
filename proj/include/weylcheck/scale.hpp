#pragma once

// Weyl weights and scale transformations. Under a scale transformation the
// metric goes to Lambda^2 g and every field X to Lambda^w X; locally, with
// Lambda(x), derivatives of Lambda^k produce k Lambda^k D_mu with
// D_mu = d_mu ln Lambda, and the Weyl vector shifts S_mu -> S_mu - D_mu / f.

#include "weylcheck/expr.hpp"
#include "weylcheck/report.hpp"
#include "weylcheck/rules.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace weylcheck {

struct WeylWeight {
  Rational value{0};
  bool homogeneous = true;

  friend bool operator==(const WeylWeight&, const WeylWeight&) = default;
};

using WeightTable = std::map<AtomKind, WeylWeight>;

/// g:+2, ginv:-2, sqrtg:+4, phi:-1, A:0, W:0, eps:+1, epsinv:-1,
/// Psi and Psibar:-3/2, S:0 (inhomogeneous), constants 0.
const WeightTable& default_weights();

struct WeightResult {
  enum class Status { Homogeneous, Inhomogeneous, Mixed };
  Status status = Status::Homogeneous;
  Rational value{0};  // meaningful unless Mixed
};

/// Weight of a canonical expression: per term the sum of atom weights times
/// exponents (derivatives, Lambda and D count 0). Mixed if the terms
/// disagree; Inhomogeneous if `strict` and an S atom occurs.
WeightResult infer_weight(const Expr& e, const WeightTable& table = default_weights(), bool strict = false);
std::string to_string(const WeightResult& w);

/// Constant Lambda: X -> Lambda^w X, derivatives untouched, S unchanged.
Expr apply_global_scale(const Expr& e, const WeightTable& table = default_weights());

/// Lambda(x): X -> Lambda^w X with derivatives re-applied by the chain rule,
/// plus S_mu -> S_mu - D_mu / f. `tag` names the scale parameter so that
/// successive transformations can be told apart.
Expr apply_local_scale(const Expr& e, const std::string& tag = "", const WeightTable& table = default_weights());

/// Sets every D atom carrying `tag` to zero (Lambda held constant).
Expr drop_log_derivatives(const Expr& e, const std::string& tag = "");

enum class ScaleMode { Global, Local };

/// residual = Lambda^4 * apply_X_scale(L) - L, simplified. The oracle
/// confirms numerically that the symbolic residual equals the directly
/// evaluated Lambda^4 L(a') - L(a) on `trials` random assignments.
VerificationReport check_invariance(const LagrangianDef& L, ScaleMode mode, int trials = 20,
                                    std::uint64_t seed = 1);

std::vector<RewriteRule> scale_rules();

}  // namespace weylcheck
