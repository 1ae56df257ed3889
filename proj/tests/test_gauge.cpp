#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "weylcheck/builtins.hpp"
#include "weylcheck/clifford.hpp"
#include "weylcheck/dsl.hpp"
#include "weylcheck/gauge.hpp"
#include "weylcheck/scale.hpp"

using namespace weylcheck;
using weylcheck::testing::random_densities;

namespace {

const Index mu = st("mu"), nu = st("nu");

int count_kind(const Term& t, AtomKind kind) {
  int n = 0;
  for (const auto& f : t.factors)
    if (f.kind == kind) n += f.exponent.numerator() > 0 ? static_cast<int>(f.exponent.numerator()) : 0;
  return n;
}

int count_derivatives(const Term& t) {
  int n = 0;
  for (const auto& f : t.factors) n += static_cast<int>(f.derivs.size());
  if (t.fermion) n += static_cast<int>(t.fermion->bar_derivs.size() + t.fermion->psi_derivs.size());
  return n;
}

bool has_trace_step(const VerificationReport& r, const std::string& rule, const std::string& needle) {
  for (const auto& s : r.trace)
    if (s.rule == rule && s.after.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("covariantizing the scalar density gives the gauged scalar") {
  CHECK(equal(gauge_covariantize(scalar_density()), scalar_gauged_density()));
}

TEST_CASE("gauge fields and derivative-free terms are untouched") {
  CHECK(equal(gauge_covariantize(maxwell_density()), maxwell_density()));
  CHECK(equal(gauge_covariantize(yangmills_density()), yangmills_density()));
  const Expr quartic = coupling("lambda") * power(scalar_field(), 4);
  CHECK(equal(gauge_covariantize(quartic), quartic));
}

TEST_CASE("decoupling holds for gauge mesons and the electron only") {
  for (const char* name : {"maxwell", "yangmills", "dirac"}) {
    INFO(name);
    const Expr L = builtin(name).parsed;
    CHECK(equal(simplify(gauge_covariantize(L)), simplify(L)));
  }
  CHECK_FALSE(equal(gauge_covariantize(scalar_density()), scalar_density()));
}

TEST_CASE("fermion decoupling report") {
  const auto r = verify_fermion_decoupling();
  CHECK(r.pass);
  CHECK(r.residual == "0");
  CHECK(r.oracle.maxdev < 1e-9);
  // spin-connection S terms collapse to +3/2 f gamma^b eps_b^nu S_nu
  CHECK(has_trace_step(r, "gamma sigma contraction", "3/2*i*f*epsinv[^a,mu]*S[mu]*Psibar*gamma[_a]*Psi"));
  // and the kinetic term contributes -3/2 f S_mu
  CHECK(has_trace_step(r, "d Psi S terms", "-3/2*i*f*epsinv[^a,mu]*S[mu]*Psibar*gamma[_a]*Psi"));
}

TEST_CASE("spin-connection S terms alone") {
  const Expr spin = dirac_spin_connection();
  const Expr s_terms = simplify(gauge_covariantize(spin) - spin);
  const Expr expected = Rational(3, 2) * (imaginary_unit() * coupling("f") * tetrad_inv(up("b"), nu) *
                                          weyl_vector(nu) * psibar() * gamma(lo("b")) * psi());
  CHECK(equal(s_terms, expected));
}

TEST_CASE("gauge and scalar coupling reports") {
  const auto g = verify_gauge_decoupling();
  CHECK(g.pass);
  CHECK(g.notes.empty());
  const auto s = verify_scalar_coupling();
  CHECK(s.pass);
  CHECK(s.residual == "0");
  CHECK(has_trace_step(s, "f -> 0", ""));
  for (const auto& step : s.trace)
    if (step.rule == "f -> 0") CHECK(step.after == "0");
}

TEST_CASE("expanded gauged scalar minus scalar") {
  const Expr phi = scalar_field();
  const Expr diff = canonicalize(scalar_gauged_density() - scalar_density());
  const Expr expected = -(coupling("f") * metric_inv(mu, nu) * weyl_vector(mu) * phi * partial(nu, phi)) +
                        Rational(1, 2) * coupling("f", Rational(2)) * metric_inv(mu, nu) * weyl_vector(mu) *
                            weyl_vector(nu) * power(phi, 2);
  CHECK(equal(diff, expected));
  CHECK(canonicalize(set_coupling_zero(diff, "f")).is_zero());
}

TEST_CASE("f = 0 makes covariantization the identity") {
  for (const auto& name : builtin_names()) {
    const Expr L = builtin(name).parsed;
    CHECK(equal(set_coupling_zero(gauge_covariantize(L), "f"), set_coupling_zero(L, "f")));
  }
  RandomOptions opts;
  opts.weyl_vector = false;
  int covered = 0;
  for (const auto& e : random_densities(200, 53, opts)) {
    Expr cov;
    try {
      cov = gauge_covariantize(e);
    } catch (const UncoveredDerivative&) {
      continue;
    }
    ++covered;
    INFO(render(e));
    CHECK(equal(set_coupling_zero(cov, "f"), set_coupling_zero(e, "f")));
  }
  CHECK(covered > 50);
}

TEST_CASE("covariantization creates no new derivatives and bounded S powers") {
  for (const auto& name : builtin_names()) {
    INFO(name);
    const Expr L = canonicalize(builtin(name).parsed);
    const Expr once = gauge_covariantize(L);
    int max_derivs = 0;
    for (const auto& t : L.terms()) max_derivs = std::max(max_derivs, count_derivatives(t));
    int base_s = 0;
    for (const auto& t : L.terms()) base_s = std::max(base_s, count_kind(t, AtomKind::WeylVector));
    for (const auto& t : once.terms()) {
      CHECK(count_derivatives(t) <= max_derivs);
      CHECK(count_kind(t, AtomKind::WeylVector) <= base_s + max_derivs);
    }
    if (name != "scalar" && name != "scalar-gauged") CHECK(equal(simplify(gauge_covariantize(once)), simplify(once)));
  }
}

TEST_CASE("every covariantized built-in is locally scale invariant") {
  // scalar-gauged is already the covariant form of scalar
  for (const char* name : {"scalar", "maxwell", "yangmills", "dirac"}) {
    INFO(name);
    const LagrangianDef L = builtin(name);
    const auto r = check_invariance(make_lagrangian(name, gauge_covariantize(L.parsed)), ScaleMode::Local, 5);
    CHECK(r.pass);
  }
}

TEST_CASE("uncovered derivatives are rejected") {
  CHECK_THROWS_AS(gauge_covariantize(metric_inv(mu, nu) * partial(mu, weyl_vector(nu))), UncoveredDerivative);
  CHECK_THROWS_AS(gauge_covariantize(metric_inv(mu, nu) * partial(mu, partial(nu, scalar_field()))),
                  UncoveredDerivative);
}

TEST_CASE("every covariance rule holds numerically") {
  for (const auto& r : gauge_rules()) {
    INFO(r.name);
    CHECK(check_rule(r, 100, 1).pass());
  }
}
