#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "weylcheck/builtins.hpp"
#include "weylcheck/scale.hpp"

#include <cmath>

using namespace weylcheck;
using weylcheck::testing::random_densities;

namespace {

const Index mu = st("mu"), nu = st("nu"), rho = st("rho");

Rational weight(const Expr& e) {
  const auto w = infer_weight(canonicalize(e));
  REQUIRE(w.status == WeightResult::Status::Homogeneous);
  return w.value;
}

// Lambda -> Lambda_1 Lambda_2 and D -> D_1 + D_2 on an expression that was
// scaled once with the untagged parameter.
Expr split_scale(const Expr& e) {
  return canonicalize(map_atoms(e, [](const Factor& f) -> std::optional<Expr> {
    if (f.kind == AtomKind::LambdaPower && f.tag.empty())
      return lambda_power(f.exponent, "1") * lambda_power(f.exponent, "2");
    if (f.kind == AtomKind::LogDerivative && f.tag.empty()) {
      Factor one = f, two = f;
      one.tag = "1";
      two.tag = "2";
      return atom_expr(one) + atom_expr(two);
    }
    return std::nullopt;
  }));
}

}  // namespace

TEST_CASE("atom weights") {
  CHECK(weight(metric(mu, nu)) == Rational(2));
  CHECK(weight(metric_inv(mu, nu)) == Rational(-2));
  CHECK(weight(det_factor()) == Rational(4));
  CHECK(weight(scalar_field()) == Rational(-1));
  CHECK(weight(em_vector(mu)) == Rational(0));
  CHECK(weight(ym_vector(gauge("i"), mu)) == Rational(0));
  CHECK(weight(tetrad(up("a"), mu)) == Rational(1));
  CHECK(weight(tetrad_inv(lo("a"), mu)) == Rational(-1));
  CHECK(weight(psibar() * psi()) == Rational(-3));
  CHECK(default_weights().at(AtomKind::Fermion).value == Rational(-3, 2));
  CHECK_FALSE(default_weights().at(AtomKind::WeylVector).homogeneous);
}

TEST_CASE("built-in densities have weight -4") {
  for (const auto& name : builtin_names()) {
    INFO(name);
    CHECK(weight(builtin(name).parsed) == Rational(-4));
  }
}

TEST_CASE("mixed weights are reported") {
  const auto w = infer_weight(canonicalize(power(scalar_field(), 3) + power(scalar_field(), 4)));
  CHECK(w.status == WeightResult::Status::Mixed);
  CHECK(to_string(w) == "mixed");
  const auto s = infer_weight(canonicalize(weyl_vector(mu) * weyl_vector(nu) * metric_inv(mu, nu)), default_weights(), true);
  CHECK(s.status == WeightResult::Status::Inhomogeneous);
}

TEST_CASE("global scaling of atoms and densities") {
  CHECK(equal(apply_global_scale(metric(mu, nu)), lambda_power(Rational(2)) * metric(mu, nu)));
  CHECK(equal(apply_global_scale(scalar_density()), lambda_power(Rational(-4)) * scalar_density()));
  CHECK(equal(apply_global_scale(coupling("lambda")), coupling("lambda")));
}

TEST_CASE("local scaling of atoms") {
  CHECK(equal(apply_local_scale(weyl_vector(mu)), weyl_vector(mu) - coupling("f", Rational(-1)) * log_derivative(mu)));
  const Expr phi = scalar_field();
  CHECK(equal(apply_local_scale(partial(mu, phi)),
              lambda_power(Rational(-1)) * (partial(mu, phi) - log_derivative(mu) * phi)));
  const Expr g = metric(nu, rho);
  CHECK(equal(apply_local_scale(partial(mu, g)),
              lambda_power(Rational(2)) * (partial(mu, g) + Rational(2) * log_derivative(mu) * g)));
}

TEST_CASE("global scaling multiplies by Lambda^weight") {
  for (const auto& e : random_densities(200, 29)) {
    const Expr c = canonicalize(e);
    const auto w = infer_weight(c);
    if (w.status != WeightResult::Status::Homogeneous) continue;
    INFO(render(c));
    CHECK(equal(apply_global_scale(c), lambda_power(w.value) * c));
  }
}

TEST_CASE("constant Lambda reduces local to global scaling") {
  for (const auto& e : random_densities(200, 31)) {
    INFO(render(e));
    CHECK(equal(drop_log_derivatives(apply_local_scale(e)), apply_global_scale(e)));
  }
}

TEST_CASE("two local transformations compose") {
  std::vector<Expr> inputs{weyl_vector(mu), partial(mu, scalar_field()), partial(mu, partial(nu, scalar_field())),
                           scalar_gauged_density(), dirac_density()};
  for (const auto& e : random_densities(30, 37)) inputs.push_back(e);
  for (const auto& e : inputs) {
    INFO(render(e));
    const Expr twice = apply_local_scale(apply_local_scale(e, "1"), "2");
    CHECK(equal(twice, split_scale(apply_local_scale(e))));
  }
}

TEST_CASE("invariance checks on built-ins") {
  for (const auto& name : builtin_names()) {
    INFO(name);
    const auto global = check_invariance(builtin(name), ScaleMode::Global);
    CHECK(global.pass);
    CHECK(global.residual == "0");
    const auto local = check_invariance(builtin(name), ScaleMode::Local);
    CHECK(local.pass == (name != "scalar"));
    CHECK(local.oracle.maxdev < 1e-9);
  }
}

TEST_CASE("ungauged scalar leaves a residual") {
  const auto r = check_invariance(builtin("scalar"), ScaleMode::Local);
  CHECK_FALSE(r.pass);
  const Expr phi = scalar_field();
  const Expr expected = Rational(1, 2) * metric_inv(mu, nu) * log_derivative(mu) * log_derivative(nu) * power(phi, 2) -
                        metric_inv(mu, nu) * log_derivative(mu) * phi * partial(nu, phi);
  CHECK(r.residual == render(canonicalize(expected)));
  // no coupling survives in the residual
  CHECK(r.residual.find("f") == std::string::npos);
}

TEST_CASE("gauged scalar is invariant numerically") {
  const Expr L = scalar_gauged_density();
  for (int k = 0; k < 20; ++k) {
    auto rng = trial_rng(43, k);
    const Assignment a = sample_assignment(rng);
    const double lam4 = std::pow(lambda_value(a), 4);
    const Components scaled_value = scaled(evaluate(L, rescaled(a, Rescale::Local)), lam4);
    CHECK(deviation(scaled_value, evaluate(L, a)) < 1e-9);
  }
}

TEST_CASE("determinant factor is |det tetrad| and scales by Lambda^4") {
  for (int k = 0; k < 20; ++k) {
    auto rng = trial_rng(47, k);
    const Assignment a = sample_assignment(rng);
    const double det = std::abs(determinant(a.tetrad).v);
    CHECK(std::abs(evaluate(det_factor(), a).data.at(0).real() - det) < 1e-12 * std::max(1.0, det));
    const Assignment b = rescaled(a, Rescale::Global);
    const double lam = lambda_value(a);
    CHECK(std::abs(std::abs(determinant(b.tetrad).v) - std::pow(lam, 4) * det) < 1e-9 * std::max(1.0, det));
    CHECK(std::abs(evaluate(det_factor(), b).data.at(0).real() - std::pow(lam, 4) * det) <
          1e-9 * std::max(1.0, std::pow(lam, 4) * det));
  }
}

TEST_CASE("every scale rule holds numerically") {
  for (const auto& r : scale_rules()) {
    INFO(r.name);
    CHECK(check_rule(r, 100, 1).pass());
  }
}
