#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "weylcheck/clifford.hpp"

#include <cmath>
#include <map>
#include <optional>

using namespace weylcheck;

namespace {

const Index a = up("a"), b = up("b"), c = up("c");

double matrix_norm(const Components& x) {
  double m = 0;
  for (const auto& v : x.data) m = std::max(m, std::abs(v));
  return m;
}

Expr random_chain(std::mt19937_64& rng) {
  static const std::vector<std::string> labels{"a", "b", "c", "d", "h"};
  std::uniform_int_distribution<int> len(1, 4), pick(0, 4), kind(0, 2);
  Expr e = identity_spinor();
  std::map<std::string, int> used;
  // first occurrence upper, second lower, never a third
  auto next = [&]() -> std::optional<Index> {
    const std::string x = labels[static_cast<std::size_t>(pick(rng))];
    const int n = used[x]++;
    if (n == 0) return up(x);
    if (n == 1) return lo(x);
    return std::nullopt;
  };
  const int n = len(rng);
  for (int k = 0; k < n; ++k) {
    if (kind(rng) == 0) {
      auto x = next(), y = next();
      if (x && y && x->label != y->label) e = e * sigma(*x, *y);
    } else if (auto x = next()) {
      e = e * gamma(*x);
    }
  }
  return e;
}

}  // namespace

TEST_CASE("Dirac matrices satisfy the anticommutator") {
  const auto& G = dirac_gammas();
  const double eta[4]{1, -1, -1, -1};
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          cplx s = 0;
          for (int k = 0; k < 4; ++k) s += G[p][i][k] * G[q][k][j] + G[q][i][k] * G[p][k][j];
          const double expected = (p == q && i == j) ? 2 * eta[p] : 0.0;
          CHECK(std::abs(s - expected) < 1e-15);
        }
}

TEST_CASE("sigma expands into gammas") {
  CHECK(equal(expand_sigma(sigma(a, b)), Rational(1, 4) * (gamma(a) * gamma(b) - gamma(b) * gamma(a))));
  CHECK(expand_sigma(sigma(a, a)).is_zero());
  CHECK(equal(expand_sigma(gamma(a) * gamma(b)), gamma(a) * gamma(b)));
}

TEST_CASE("gamma trace and anticommutator") {
  CHECK(equal(gamma_canonicalize(gamma(c) * gamma(lo("c"))), Rational(4) * identity_spinor()));
  CHECK(equal(gamma_canonicalize(gamma(a) * gamma(b) + gamma(b) * gamma(a)),
              Rational(2) * eta(a, b) * identity_spinor()));
}

TEST_CASE("gamma sigma contraction") {
  const Expr lhs = gamma(c) * sigma(lo("c"), lo("b"));
  const Expr expected = Rational(3, 2) * gamma(lo("b"));
  CHECK(equal(gamma_canonicalize(expand_sigma(lhs)), expected));
  CHECK(equal(gamma_canonicalize(lhs), expected));
  for (int k = 0; k < 3; ++k) {
    auto rng = trial_rng(2, k);
    const Components diff = evaluate(lhs - expected, sample_assignment(rng));
    CHECK(diff.data.size() == 64);
    CHECK(matrix_norm(diff) < 1e-12);
  }
}

TEST_CASE("gamma sigma coefficient follows (d-1)/2") {
  CHECK(gamma_sigma_coefficient(4) == Rational(3, 2));
  for (int d = 2; d <= 10; ++d) CHECK(gamma_sigma_coefficient(d) == Rational(d - 1, 2));
}

TEST_CASE("gamma_canonicalize is idempotent and faithful on random chains") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const Expr e = random_chain(rng);
    const Expr once = gamma_canonicalize(e);
    INFO(render(e));
    CHECK(equal(gamma_canonicalize(once), once));
    CHECK(weylcheck::testing::max_deviation(e, once, 1) < 1e-12);
  }
}

TEST_CASE("every Clifford rule holds in the Dirac representation") {
  for (const auto& r : clifford_rules()) {
    INFO(r.name);
    const auto o = check_rule(r, 10, 1);
    CHECK(o.tolerance == 1e-12);
    CHECK(o.pass());
  }
}
