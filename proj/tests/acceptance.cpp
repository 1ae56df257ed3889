// Acceptance checks, one line per criterion. Exit status is the number of
// failed criteria.

#include "weylcheck/builtins.hpp"
#include "weylcheck/cli.hpp"
#include "weylcheck/clifford.hpp"
#include "weylcheck/gauge.hpp"
#include "weylcheck/numeric.hpp"
#include "weylcheck/scale.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace weylcheck;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void criterion(const char* id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && dt >= limit_seconds) o.require(false, "took longer than the time limit");
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", dt);
  std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << title << " [" << timing << "]";
  if (!o.detail.empty()) std::cout << "  -- " << o.detail;
  std::cout << std::endl;
  if (!o.pass) ++failures;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome weights() {
  Outcome o;
  const Index mu = st("mu"), nu = st("nu");
  const std::vector<std::pair<Expr, Rational>> atoms{
      {metric(mu, nu), Rational(2)},           {metric_inv(mu, nu), Rational(-2)},
      {det_factor(), Rational(4)},             {scalar_field(), Rational(-1)},
      {em_vector(mu), Rational(0)},            {ym_vector(gauge("i"), mu), Rational(0)},
      {tetrad(up("a"), mu), Rational(1)},      {tetrad_inv(lo("a"), mu), Rational(-1)},
  };
  for (const auto& [e, w] : atoms) {
    const auto r = infer_weight(canonicalize(e));
    o.require(r.status == WeightResult::Status::Homogeneous && r.value == w, "weight of " + render(e));
  }
  o.require(default_weights().at(AtomKind::Fermion).value == Rational(-3, 2), "weight of Psi");
  for (const auto& name : builtin_names()) {
    const auto r = infer_weight(builtin(name).parsed);
    o.require(r.status == WeightResult::Status::Homogeneous && r.value == Rational(-4), name + " weight");
  }
  return o;
}

Outcome gamma_sigma() {
  Outcome o;
  const Expr lhs = gamma(up("c")) * sigma(lo("c"), lo("b"));
  const Expr rhs = Rational(3, 2) * gamma(lo("b"));
  o.require(render(gamma_canonicalize(expand_sigma(lhs))) == render(canonicalize(rhs)), "symbolic reduction");
  auto rng = trial_rng(1, 0);
  const Components diff = evaluate(lhs - rhs, sample_assignment(rng));
  double worst = 0;
  for (const auto& x : diff.data) worst = std::max(worst, std::abs(x));
  o.require(diff.data.size() == 64, "components over b and both spinor indices");
  o.require(worst < 1e-12, "Dirac matrices disagree");
  return o;
}

bool trace_has(const VerificationReport& r, const std::string& needle) {
  for (const auto& s : r.trace)
    if (s.after.find(needle) != std::string::npos) return true;
  return false;
}

Outcome fermion_decoupling() {
  Outcome o;
  const auto r = verify_fermion_decoupling();
  o.require(r.residual == "0", "residual " + r.residual);
  o.require(r.pass, "report failed");
  o.require(trace_has(r, "3/2*i*f*epsinv[^a,mu]*S[mu]*Psibar*gamma[_a]*Psi"), "missing +3/2 f spin-connection term");
  o.require(trace_has(r, "-3/2*i*f*epsinv[^a,mu]*S[mu]*Psibar*gamma[_a]*Psi"), "missing -3/2 f kinetic term");
  return o;
}

Outcome gauge_decoupling() {
  Outcome o;
  for (const char* name : {"maxwell", "yangmills"}) {
    const Expr L = canonicalize(builtin(name).parsed);
    o.require(render(gauge_covariantize(L)) == render(L), std::string(name) + " changed");
  }
  return o;
}

Outcome local_invariance() {
  Outcome o;
  o.require(!canonicalize(apply_local_scale(weyl_vector(st("mu"))) - weyl_vector(st("mu"))).is_zero(),
            "S shift inactive");
  for (const char* name : {"scalar-gauged", "maxwell", "yangmills", "dirac"}) {
    const auto r = check_invariance(builtin(name), ScaleMode::Local);
    o.require(r.pass && r.residual == "0", std::string(name) + " residual " + r.residual);
  }
  const auto neg = check_invariance(builtin("scalar"), ScaleMode::Local);
  o.require(!neg.pass && neg.residual != "0", "ungauged scalar unexpectedly invariant");
  return o;
}

Outcome oracle_agreement() {
  Outcome o;
  for (const auto& rule : all_rules()) {
    const auto r = check_rule(rule, 100, 1);
    o.require(r.trials == 100 && r.pass(), rule.module + ": " + rule.name + " deviates " + deviation_bucket(r.maxdev));
  }
  return o;
}

Outcome degeneracy() {
  Outcome o;
  for (const auto& name : builtin_names()) {
    const Expr L = builtin(name).parsed;
    o.require(equal(set_coupling_zero(gauge_covariantize(L), "f"), set_coupling_zero(L, "f")), name + " at f = 0");
  }
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    const Expr e = random_density(rng);
    if (!equal(drop_log_derivatives(apply_local_scale(e)), apply_global_scale(e))) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " of 200 generated densities differ");
  return o;
}

Outcome cli_contract() {
  Outcome o;
  ::unsetenv("WEYLCHECK_SEED");
  std::ostringstream out, err;
  const int code = run({"decoupling", "--field=fermion", "--json"}, out, err);
  o.require(code == 0, "exit code " + std::to_string(code));
  const std::string path = "acceptance_fermion_report.json";
  {
    std::ofstream f(path);
    f << out.str();
  }
  const std::string cmd = std::string(WEYLCHECK_PYTHON) + " " + WEYLCHECK_SOURCE_DIR + "/tools/validate_report.py " +
                          WEYLCHECK_SOURCE_DIR + "/report.schema.json " + path;
  o.require(std::system(cmd.c_str()) == 0, "schema validation failed");
  std::remove(path.c_str());

  const std::string dir = std::string(WEYLCHECK_SOURCE_DIR) + "/goldens/";
  for (const char* b : {"scalar", "maxwell", "yangmills", "dirac", "scalar-gauged"})
    for (const char* m : {"global", "local"})
      for (bool json : {false, true}) {
        std::vector<std::string> args{"verify", std::string("builtin:") + b, std::string("--mode=") + m};
        if (json) args.push_back("--json");
        std::ostringstream o2, e2;
        run(args, o2, e2);
        const std::string name = std::string("verify-") + b + "-" + m + (json ? ".json" : ".txt");
        o.require(o2.str() == read_file(dir + name), name + " differs");
      }
  return o;
}

}  // namespace

int main() {
  criterion("AC1", "global weights of every atom and weight -4 for every built-in", 1.0, weights);
  criterion("AC2", "gamma^c sigma_cb = 3/2 gamma_b symbolically and in the Dirac representation", 1.0, gamma_sigma);
  criterion("AC3", "covariantized Dirac density minus the original is 0 with both 3/2 terms traced", 10.0,
            fermion_decoupling);
  criterion("AC4", "Maxwell and Yang-Mills unchanged by covariantization", 0, gauge_decoupling);
  criterion("AC5", "local invariance of gauged scalar, Maxwell, Yang-Mills, Dirac; ungauged scalar fails", 0,
            local_invariance);
  criterion("AC6", "numeric oracle agrees with every rewrite rule on 100 assignments", 60.0, oracle_agreement);
  criterion("AC7", "f = 0 and constant Lambda degenerate correctly", 0, degeneracy);
  criterion("AC8", "CLI exit code, schema-valid JSON and byte-exact goldens", 0, cli_contract);
  return failures;
}
