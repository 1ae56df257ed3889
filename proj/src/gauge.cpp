#include "weylcheck/gauge.hpp"

#include "weylcheck/builtins.hpp"
#include "weylcheck/clifford.hpp"
#include "weylcheck/numeric.hpp"
#include "weylcheck/tensor_algebra.hpp"

#include <algorithm>

namespace weylcheck {

std::optional<Rational> covariant_weight(AtomKind kind) {
  switch (kind) {
    case AtomKind::Metric: return Rational(2);
    case AtomKind::InverseMetric: return Rational(-2);
    case AtomKind::Tetrad: return Rational(1);
    case AtomKind::InverseTetrad: return Rational(-1);
    case AtomKind::Scalar: return Rational(-1);
    case AtomKind::Fermion:
    case AtomKind::FermionBar: return Rational(-3, 2);
    default: return std::nullopt;
  }
}

namespace {

bool exempt(AtomKind kind) { return kind == AtomKind::EMVector || kind == AtomKind::YMVector; }

std::optional<Expr> covariant_atom(const Factor& f) {
  if (f.derivs.empty() || exempt(f.kind)) return std::nullopt;
  const auto w = covariant_weight(f.kind);
  if (!w) throw UncoveredDerivative("no covariant derivative for " + render(f));
  if (f.derivs.size() > 1) throw UncoveredDerivative("repeated derivatives are not covered: " + render(f));
  Factor base = f;
  base.derivs.clear();
  return atom_expr(f) + Coeff(*w) * (coupling("f") * weyl_vector(f.derivs[0]) * atom_expr(base));
}

// Numeric check that the simplified difference equals the raw one.
OracleSummary difference_oracle(const Expr& raw, const Expr& simplified, int trials, std::uint64_t seed) {
  OracleSummary o;
  o.trials = trials;
  o.seed = seed;
  for (int k = 0; k < trials; ++k) {
    auto rng = trial_rng(seed, k);
    const Assignment a = sample_assignment(rng);
    o.maxdev = std::max(o.maxdev, deviation(evaluate(raw, a), evaluate(simplified, a)));
  }
  return o;
}

}  // namespace

Expr gauge_covariantize(const Expr& L) { return canonicalize(map_atoms(L, covariant_atom)); }

VerificationReport verify_fermion_decoupling(int trials, std::uint64_t seed) {
  VerificationReport r;
  r.claim = "fermion-decoupling";
  r.mode = "decoupling";
  const Expr L = canonicalize(dirac_density());
  const Expr covariant = gauge_covariantize(L);
  r.trace.push_back({"covariantize", render(L), render(covariant)});

  const Expr spin = canonicalize(dirac_spin_connection());
  const Expr spin_terms = canonicalize(gauge_covariantize(spin) - spin);
  const Expr spin_contracted = contract_pairs(spin_terms);
  r.trace.push_back({"spin-connection S terms", render(spin_terms), render(spin_contracted)});
  const Expr spin_simplified = simplify(spin_terms);
  r.trace.push_back({"gamma sigma contraction", render(spin_contracted), render(spin_simplified)});

  const Expr kinetic = canonicalize(dirac_kinetic());
  const Expr kinetic_terms = simplify(gauge_covariantize(kinetic) - kinetic);
  r.trace.push_back({"d Psi S terms", render(kinetic), render(kinetic_terms)});

  const Expr raw = covariant - L;
  const Expr residual = simplify(raw);
  r.trace.push_back({"sum", render(spin_simplified) + " + " + render(kinetic_terms), render(residual)});
  r.residual = render(residual);
  r.oracle = difference_oracle(raw, residual, trials, seed);
  r.settle();
  return r;
}

VerificationReport verify_gauge_decoupling(int trials, std::uint64_t seed) {
  VerificationReport r;
  r.claim = "gauge-decoupling";
  r.mode = "decoupling";
  Expr total;
  std::vector<Expr> raws;
  for (const char* name : {"maxwell", "yangmills"}) {
    const Expr L = builtin(name).parsed;
    const Expr covariant = gauge_covariantize(L);
    r.trace.push_back({std::string("covariantize ") + name, render(L), render(covariant)});
    const Expr diff = canonicalize(covariant - L);
    if (!diff.is_zero()) r.notes.push_back(std::string(name) + " changed under covariantization");
    total += diff;
    raws.push_back(covariant - L);
  }
  r.residual = render(total);
  r.oracle.trials = trials;
  r.oracle.seed = seed;
  for (const auto& raw : raws) {
    const auto o = difference_oracle(raw, Expr{}, trials, seed);
    r.oracle.maxdev = std::max(r.oracle.maxdev, o.maxdev);
  }
  r.settle();
  return r;
}

VerificationReport verify_scalar_coupling(int trials, std::uint64_t seed) {
  VerificationReport r;
  r.claim = "scalar-coupling";
  r.mode = "decoupling";
  const Index mu = st("mu"), nu = st("nu");
  const Expr L = builtin("scalar").parsed;
  const Expr covariant = gauge_covariantize(L);
  r.trace.push_back({"covariantize", render(L), render(covariant)});
  const Expr raw = covariant - L;
  const Expr diff = simplify(raw);
  r.trace.push_back({"difference", render(raw), render(diff)});
  const Expr phi = scalar_field();
  const Expr expected =
      canonicalize(-(coupling("f") * metric_inv(mu, nu) * weyl_vector(mu) * phi * partial(nu, phi)) +
                   Rational(1, 2) * (coupling("f", 2) * metric_inv(mu, nu) * weyl_vector(mu) * weyl_vector(nu) *
                                     power(phi, 2)));
  r.trace.push_back({"expected coupling", render(diff), render(expected)});
  const Expr without_f = canonicalize(set_coupling_zero(diff, "f"));
  r.trace.push_back({"f -> 0", render(diff), render(without_f)});
  const Expr residual = simplify(diff - expected);
  r.residual = render(residual);
  if (diff.is_zero()) r.notes.push_back("covariantization left the scalar density unchanged");
  if (!without_f.is_zero()) r.notes.push_back("difference survives f -> 0");
  r.oracle = difference_oracle(raw, expected, trials, seed);
  r.settle();
  if (diff.is_zero() || !without_f.is_zero()) r.pass = false;
  return r;
}

std::vector<RewriteRule> gauge_rules() {
  const Index mu = st("mu"), nu = st("nu"), rho = st("rho");
  struct Case {
    std::string name;
    Expr lhs;
    Rational weight;
  };
  const std::vector<Case> cases{
      {"covariant d g", partial(mu, metric(nu, rho)), Rational(2)},
      {"covariant d ginv", partial(mu, metric_inv(nu, rho)), Rational(-2)},
      {"covariant d eps", partial(mu, tetrad(up("a"), nu)), Rational(1)},
      {"covariant d epsinv", partial(mu, tetrad_inv(lo("a"), nu)), Rational(-1)},
      {"covariant d phi", partial(mu, scalar_field()), Rational(-1)},
      {"covariant d Psi", partial(mu, psi()), Rational(-3, 2)},
      {"covariant d Psibar", partial(mu, psibar()), Rational(-3, 2)},
      {"A untouched", partial(mu, em_vector(nu)), Rational(0)},
      {"W untouched", partial(mu, ym_vector(gauge("i"), nu)), Rational(0)},
      {"gauged scalar density", scalar_density(), Rational(-4)},
  };
  std::vector<RewriteRule> rules;
  for (const auto& c : cases)
    rules.push_back({"gauge_engine", c.name, c.lhs, gauge_covariantize(c.lhs), RuleCheck::Covariance, c.weight});
  return rules;
}

}  // namespace weylcheck
