#include "weylcheck/cli.hpp"

#include "weylcheck/builtins.hpp"
#include "weylcheck/clifford.hpp"
#include "weylcheck/dsl.hpp"
#include "weylcheck/gauge.hpp"
#include "weylcheck/numeric.hpp"
#include "weylcheck/scale.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace weylcheck {

namespace {

struct UsageError : Error {
  using Error::Error;
};

LagrangianDef load(const std::string& target) {
  const std::string prefix = "builtin:";
  if (target.rfind(prefix, 0) == 0) {
    const std::string name = target.substr(prefix.size());
    const auto& names = builtin_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw UsageError("unknown built-in '" + name + "'");
    return builtin(name);
  }
  std::ifstream in(target);
  if (!in) throw UsageError("cannot read '" + target + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), target);
}

VerificationReport gamma_sigma_report() {
  VerificationReport r;
  r.claim = "gamma-sigma";
  r.mode = "identity";
  const Expr lhs = gamma(up("c")) * sigma(lo("c"), lo("b"));
  const Expr rhs = Rational(3, 2) * gamma(lo("b"));
  const Expr expanded = expand_sigma(lhs);
  r.trace.push_back({"expand_sigma", render(canonicalize(lhs)), render(expanded)});
  const Expr reduced = gamma_canonicalize(expanded);
  r.trace.push_back({"gamma_canonicalize", render(expanded), render(reduced)});
  r.residual = render(simplify(reduced - rhs));
  r.notes.push_back("coefficient (d-1)/2 at d=4: " + to_string(gamma_sigma_coefficient(kDimension)));
  RewriteRule rule{"clifford", "gamma sigma", lhs, rhs, RuleCheck::FieldFreeIdentity, 0};
  const auto o = check_rule(rule, 1, 1);
  r.oracle.trials = o.trials;
  r.oracle.maxdev = o.maxdev;
  r.oracle.seed = 1;
  r.oracle.tolerance = o.tolerance;
  r.settle();
  return r;
}

VerificationReport covariantize_report(const LagrangianDef& L, int trials, std::uint64_t seed) {
  const Expr covariant = gauge_covariantize(L.parsed);
  VerificationReport r = check_invariance(make_lagrangian(L.name, covariant), ScaleMode::Local, trials, seed);
  r.mode = "covariantize";
  r.trace.insert(r.trace.begin(), TraceStep{"gauge_covariantize", render(L.parsed), render(covariant)});
  r.notes.insert(r.notes.begin(), "result: " + render(covariant));
  return r;
}

VerificationReport oracle_report(int trials, std::uint64_t seed) {
  VerificationReport r;
  r.claim = "rewrite-rules";
  r.mode = "oracle";
  r.oracle.trials = trials;
  r.oracle.seed = seed;
  bool ok = true;
  for (const auto& rule : all_rules()) {
    const auto o = check_rule(rule, trials, seed);
    r.trace.push_back({rule.module + ": " + rule.name, render(rule.lhs), render(rule.rhs)});
    r.oracle.maxdev = std::max(r.oracle.maxdev, o.maxdev);
    if (!o.pass()) {
      ok = false;
      r.notes.push_back(rule.module + ": " + rule.name + " deviates by " + deviation_bucket(o.maxdev));
    }
  }
  r.residual = "0";
  r.settle();
  r.pass = ok;
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"weylcheck: symbolic checks of Weyl scale invariance"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  bool json = false;
  std::uint64_t seed = 1;
  int trials = 5;
  app.add_flag("--json", json, "Print the report as JSON");
  app.add_option("--seed", seed, "Oracle run seed (WEYLCHECK_SEED overrides)");
  app.add_option("--trials", trials, "Oracle trials per check")->check(CLI::PositiveNumber);

  std::string target, mode = "global", field, identity;
  auto* verify = app.add_subcommand("verify", "Check global or local scale invariance of a density");
  verify->add_option("target", target, "File or builtin:NAME")->required();
  verify->add_option("--mode", mode, "global or local")->check(CLI::IsMember({"global", "local"}));
  auto* covariantize = app.add_subcommand("covariantize", "Apply the covariant-derivative replacements");
  covariantize->add_option("target", target, "File or builtin:NAME")->required();
  auto* decoupling = app.add_subcommand("decoupling", "Check which fields decouple from S");
  decoupling->add_option("--field", field, "fermion, gauge or scalar")
      ->required()
      ->check(CLI::IsMember({"fermion", "gauge", "scalar"}));
  auto* ident = app.add_subcommand("identity", "Check a Clifford identity");
  ident->add_option("name", identity, "gamma-sigma")->required()->check(CLI::IsMember({"gamma-sigma"}));
  auto* oracle = app.add_subcommand("oracle", "Check every rewrite rule numerically");
  int oracle_trials = 100;
  oracle->add_option("--trials", oracle_trials, "Assignments per rule")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", seed, "Run seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (const char* env = std::getenv("WEYLCHECK_SEED")) {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: WEYLCHECK_SEED is not an unsigned integer\n";
      return 2;
    }
  }

  VerificationReport report;
  try {
    if (*verify) {
      const auto L = load(target);
      report = check_invariance(L, mode == "local" ? ScaleMode::Local : ScaleMode::Global, trials, seed);
    } else if (*covariantize) {
      report = covariantize_report(load(target), trials, seed);
    } else if (*decoupling) {
      if (field == "fermion") {
        report = verify_fermion_decoupling(trials, seed);
      } else if (field == "gauge") {
        report = verify_gauge_decoupling(trials, seed);
      } else {
        report = verify_scalar_coupling(trials, seed);
      }
    } else if (*ident) {
      report = gamma_sigma_report();
    } else if (*oracle) {
      report = oracle_report(oracle_trials, seed);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  out << (json ? to_json(report) : to_text(report));
  return report.pass ? 0 : 1;
}

}  // namespace weylcheck
