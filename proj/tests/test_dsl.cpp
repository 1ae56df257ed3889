#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "weylcheck/builtins.hpp"
#include "weylcheck/dsl.hpp"

using namespace weylcheck;
using weylcheck::testing::random_densities;

TEST_CASE("scalar source parses to the built-in") {
  const auto L = parse(
      "indices spacetime mu nu;\n"
      "fields ginv phi;\n"
      "1/2 * ginv[mu,nu] * d[mu](phi) * d[nu](phi) - lambda * phi^4\n");
  CHECK(equal(L.parsed, scalar_density()));
  CHECK(L.is_scalar());
}

TEST_CASE("a lone field") {
  const auto L = parse("phi");
  CHECK(render(L.parsed) == "phi");
}

TEST_CASE("free indices are accepted and recorded") {
  const auto L = parse("indices spacetime mu nu; ginv[mu,nu] * d[mu](phi)");
  CHECK_FALSE(L.is_scalar());
  REQUIRE(L.free.size() == 1);
  CHECK(L.free[0].label == "nu");
}

TEST_CASE("frame, gauge and Clifford syntax") {
  const auto L = parse(
      "indices spacetime mu; indices frame a b;\n"
      "i * epsinv[^a,mu] * Psibar * gamma[_a] * d[mu](Psi) + 1/2 * Psibar * gamma[^a] * sigma[_a,_b] * gamma[^b] * Psi");
  CHECK(L.is_scalar());
  const auto Y = parse(
      "indices spacetime mu nu rho sigma; indices gauge i j k;\n"
      "gc * fabc[i,j,k] * ginv[mu,rho] * ginv[nu,sigma] * W[i,mu] * W[j,nu] * d[rho](W[k,sigma])",
      "ym");
  CHECK(Y.name == "ym");
  CHECK(Y.is_scalar());
}

TEST_CASE("built-ins round trip through their rendered source") {
  for (const auto& name : builtin_names()) {
    INFO(name);
    const LagrangianDef L = builtin(name);
    const LagrangianDef back = parse(L.source);
    CHECK(render(back.parsed) == render(L.parsed));
    CHECK(render_source(back.parsed) == L.source);
  }
}

TEST_CASE("generated densities round trip") {
  for (const auto& e : random_densities(200, 71)) {
    const Expr c = canonicalize(e);
    const std::string src = render_source(c);
    INFO(src);
    CHECK(render(parse(src).parsed) == render(c));
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("phi +\n  * phi");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 3);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("ginv[mu,nu"), ParseError);
  CHECK_THROWS_AS(parse("phi ^ x"), ParseError);
}

TEST_CASE("undeclared fields and arity mismatches") {
  CHECK_THROWS_AS(parse("chi * phi"), UndeclaredField);
  CHECK_THROWS_AS(parse("fields phi; ginv[mu,nu] * d[mu](phi) * d[nu](phi)"), UndeclaredField);
  CHECK_THROWS_AS(parse("ginv[mu] * phi"), IndexArityMismatch);
  CHECK_THROWS_AS(parse("indices frame mu; ginv[mu,nu] * d[mu](phi) * d[nu](phi)"), IndexArityMismatch);
  CHECK_THROWS_AS(parse("delta[mu,nu]"), ParseError);
}

TEST_CASE("malformed contractions are rejected") {
  CHECK_THROWS_AS(parse("ginv[mu,mu] * ginv[mu,nu] * S[nu]"), MalformedIndex);
}
