#pragma once

#include "weylcheck/expr.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace weylcheck {

/// A named density with its declared field content.
struct LagrangianDef {
  std::string name;
  std::string source;  // DSL text (rendered for built-ins)
  Expr parsed;
  std::vector<AtomKind> declared_fields;
  /// Free indices left over; such densities are accepted but flagged.
  std::vector<Index> free;

  bool is_scalar() const { return free.empty(); }
};

struct TraceStep {
  std::string rule;
  std::string before;
  std::string after;
};

struct OracleSummary {
  int trials = 0;
  double maxdev = 0.0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
};

struct VerificationReport {
  std::string claim;
  std::string mode;  // global, local, covariantize, decoupling, identity, oracle
  bool pass = false;
  std::string residual = "0";
  std::vector<TraceStep> trace;
  OracleSummary oracle;
  std::vector<std::string> notes;

  /// Recomputes pass from the residual and the oracle summary.
  void settle() { pass = residual == "0" && oracle.maxdev < oracle.tolerance; }
};

/// Decade bucket used when printing deviations, so that reports are stable
/// across platforms: "=0" for exact zero, otherwise "<=1e-N".
std::string deviation_bucket(double maxdev);

std::string to_text(const VerificationReport& r);
/// Pretty-printed JSON with a trailing newline.
std::string to_json(const VerificationReport& r);

}  // namespace weylcheck
