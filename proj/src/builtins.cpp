#include "weylcheck/builtins.hpp"

#include "weylcheck/dsl.hpp"
#include "weylcheck/tensor_algebra.hpp"

namespace weylcheck {

namespace {

const Index mu = st("mu"), nu = st("nu"), rho = st("rho"), sg = st("sigma");

Expr field_strength(const Index& m, const Index& n) { return partial(m, em_vector(n)) - partial(n, em_vector(m)); }

Expr ym_strength(const Index& i, const Index& m, const Index& n, const std::string& j, const std::string& k) {
  return partial(m, ym_vector(i, n)) - partial(n, ym_vector(i, m)) -
         coupling("gc") * structure_const(i, gauge(j), gauge(k)) * ym_vector(gauge(j), m) * ym_vector(gauge(k), n);
}

// Psibar i gamma^c eps_c^mu
Expr dirac_prefix() { return psibar() * imaginary_unit() * gamma(up("c")) * tetrad_inv(lo("c"), mu); }

}  // namespace

Expr scalar_density() {
  const Expr phi = scalar_field();
  return Rational(1, 2) * (metric_inv(mu, nu) * partial(mu, phi) * partial(nu, phi)) -
         coupling("lambda") * power(phi, 4);
}

Expr maxwell_density() {
  return Rational(-1, 4) *
         (metric_inv(mu, rho) * metric_inv(nu, sg) * field_strength(mu, nu) * field_strength(rho, sg));
}

Expr yangmills_density() {
  const Index i = gauge("i");
  return Rational(-1, 4) * (metric_inv(mu, rho) * metric_inv(nu, sg) * ym_strength(i, mu, nu, "j", "k") *
                            ym_strength(i, rho, sg, "l", "n"));
}

Expr dirac_kinetic() { return dirac_prefix() * partial(mu, psi()); }

Expr dirac_spin_connection() {
  const Index a = up("a");
  const auto gam = christoffel(st("rho", Variance::Upper), mu, nu);
  const Expr bracket = partial(mu, tetrad(a, nu)) - gam.expansion * tetrad(a, rho);
  return Rational(-1, 2) * (dirac_prefix() * sigma(lo("a"), lo("b")) * tetrad_inv(up("b"), nu) * bracket * psi());
}

Expr dirac_density() {
  const Expr electromagnetic =
      dirac_prefix() * imaginary_unit() * coupling("e") * em_vector(mu) * psi();
  return dirac_kinetic() + electromagnetic + dirac_spin_connection();
}

Expr scalar_gauged_density() {
  const Expr phi = scalar_field();
  auto cov = [&](const Index& m) { return partial(m, phi) - coupling("f") * weyl_vector(m) * phi; };
  return Rational(1, 2) * (metric_inv(mu, nu) * cov(mu) * cov(nu)) - coupling("lambda") * power(phi, 4);
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"scalar", "maxwell", "yangmills", "dirac", "scalar-gauged"};
  return names;
}

LagrangianDef builtin(const std::string& name) {
  Expr e;
  if (name == "scalar") {
    e = scalar_density();
  } else if (name == "maxwell") {
    e = maxwell_density();
  } else if (name == "yangmills") {
    e = yangmills_density();
  } else if (name == "dirac") {
    e = dirac_density();
  } else if (name == "scalar-gauged") {
    e = scalar_gauged_density();
  } else {
    throw Error("unknown built-in '" + name + "'");
  }
  return make_lagrangian(name, canonicalize(e));
}

}  // namespace weylcheck
