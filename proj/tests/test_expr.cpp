#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "weylcheck/builtins.hpp"
#include "weylcheck/expr.hpp"

#include <algorithm>

using namespace weylcheck;
using weylcheck::testing::max_deviation;
using weylcheck::testing::random_densities;

namespace {

const Index mu = st("mu"), nu = st("nu"), alpha = st("alpha"), beta = st("beta");

std::vector<std::string> sorted_free(const Expr& e) {
  std::vector<std::string> out;
  for (const auto& i : free_indices(e)) out.push_back(i.label);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("canonical rendering of the scalar kinetic term") {
  auto e = Rational(1, 2) * metric_inv(mu, nu) * partial(mu, scalar_field()) * partial(nu, scalar_field());
  CHECK(render(canonicalize(e)) == "1/2*ginv[mu,nu]*d[mu](phi)*d[nu](phi)");
}

TEST_CASE("metric symmetry collects terms") {
  CHECK(equal(metric(mu, nu) + metric(nu, mu), Rational(2) * metric(mu, nu)));
  CHECK(render(canonicalize(metric(nu, mu))) == render(canonicalize(metric(mu, nu))));
}

TEST_CASE("sigma antisymmetry at construction") {
  CHECK(equal(sigma(up("b"), up("a")), -sigma(up("a"), up("b"))));
  CHECK(canonicalize(sigma(up("a"), up("a"))).is_zero());
}

TEST_CASE("dummy renaming does not change the canonical form") {
  auto x = metric_inv(mu, nu) * partial(mu, scalar_field()) * partial(nu, scalar_field());
  auto y = metric_inv(alpha, beta) * partial(alpha, scalar_field()) * partial(beta, scalar_field());
  CHECK(render(canonicalize(x)) == render(canonicalize(y)));
  auto renamed = rename_labels(scalar_density(), [](const std::string& l) { return l + "x"; });
  CHECK(equal(scalar_density(), renamed));
}

TEST_CASE("structural equality") {
  CHECK_FALSE(equal(power(scalar_field(), 4), power(scalar_field(), 3)));
  CHECK(equal(power(scalar_field(), 2) * scalar_field(), power(scalar_field(), 3)));
}

TEST_CASE("substitute applies the chain rule") {
  auto scaled = substitute(partial(mu, scalar_field()), [](const Factor& f) -> std::optional<Expr> {
    if (f.kind != AtomKind::Scalar) return std::nullopt;
    return lambda_power(Rational(-1)) * atom_expr(f);
  });
  auto expected = lambda_power(Rational(-1)) * partial(mu, scalar_field()) -
                  lambda_power(Rational(-1)) * log_derivative(mu) * scalar_field();
  CHECK(equal(scaled, expected));
}

TEST_CASE("identity substitution") {
  auto same = substitute(scalar_field(), [](const Factor& f) -> std::optional<Expr> { return atom_expr(f); });
  CHECK(equal(same, scalar_field()));
}

TEST_CASE("substitute with the Weyl-vector shift") {
  auto shifted = substitute(weyl_vector(mu), [](const Factor& f) -> std::optional<Expr> {
    if (f.kind != AtomKind::WeylVector) return std::nullopt;
    return atom_expr(f) - coupling("f", Rational(-1)) * log_derivative(f.indices.at(0));
  });
  CHECK(render(shifted) == "S[mu] - f^(-1)*D[mu]");
}

TEST_CASE("canonicalize is idempotent on generated densities") {
  for (const auto& e : random_densities(200, 11)) {
    const Expr once = canonicalize(e);
    INFO(render(e));
    CHECK(render(canonicalize(once)) == render(once));
  }
}

TEST_CASE("canonicalize preserves numeric value") {
  for (const auto& e : random_densities(20, 12)) {
    INFO(render(e));
    CHECK(max_deviation(e, canonicalize(e), 100) < 1e-9);
  }
}

TEST_CASE("equal is an equivalence relation on generated triples") {
  const auto pool = random_densities(40, 13);
  for (std::size_t k = 0; k + 2 < pool.size(); k += 3) {
    const Expr& a = pool[k];
    const Expr b = rename_labels(a, [](const std::string& l) { return "q" + l; });
    const Expr c = canonicalize(b);
    CHECK(equal(a, a));
    CHECK(equal(a, b) == equal(b, a));
    CHECK(equal(a, b));
    CHECK(equal(b, c));
    CHECK(equal(a, c));
    CHECK(equal(a, pool[k + 1]) == equal(pool[k + 1], a));
  }
}

TEST_CASE("free indices survive canonicalize and substitute") {
  auto e = metric_inv(mu, nu) * partial(mu, scalar_field()) + Rational(3) * weyl_vector(nu) * scalar_field();
  CHECK(sorted_free(canonicalize(e)) == std::vector<std::string>{"nu"});
  auto sub = substitute(e, [](const Factor& f) -> std::optional<Expr> {
    if (f.kind != AtomKind::Scalar) return std::nullopt;
    return lambda_power(Rational(-1)) * atom_expr(f);
  });
  CHECK(sorted_free(sub) == std::vector<std::string>{"nu"});
}

TEST_CASE("malformed dummies are rejected") {
  CHECK_THROWS_AS(canonicalize(metric(mu, nu) * metric(mu, nu)), MalformedIndex);
  CHECK_THROWS_AS(canonicalize(weyl_vector(mu) + weyl_vector(nu)), MalformedIndex);
}

TEST_CASE("f set to zero drops coupled terms") {
  auto e = coupling("f") * weyl_vector(mu) * partial(nu, scalar_field()) * metric_inv(mu, nu) + scalar_field();
  CHECK(equal(set_coupling_zero(e, "f"), scalar_field()));
}
