#pragma once

#include "weylcheck/expr.hpp"

#include <string>
#include <vector>

namespace weylcheck {

/// How the numeric oracle checks a rewrite lhs -> rhs.
enum class RuleCheck {
  Identity,           // eval(lhs) == eval(rhs) on sampled fields
  FieldFreeIdentity,  // same, but only constant matrices involved (tighter tolerance)
  LocalTransform,     // eval(rhs, a) == eval(lhs, a') with a' the locally rescaled fields
  GlobalTransform,    // same with constant Lambda
  Covariance,         // eval(rhs, a') == Lambda^weight * eval(rhs, a), local rescaling
};

struct RewriteRule {
  std::string module;
  std::string name;
  Expr lhs;
  Expr rhs;
  RuleCheck check = RuleCheck::Identity;
  Rational weight{0};  // Covariance only
};

}  // namespace weylcheck
