#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "weylcheck/tensor_algebra.hpp"

#include <array>
#include <cmath>

using namespace weylcheck;
using weylcheck::testing::max_deviation;
using weylcheck::testing::random_densities;

namespace {

const Index mu = st("mu"), nu = st("nu"), rho = st("rho");

// eps^a_mu(x) = c0 + c1.x + x.c2.x / 2, a degree-two test tetrad.
struct PolyTetrad {
  double c0[4][4]{};
  double c1[4][4][4]{};
  double c2[4][4][4][4]{};

  double at(int a, int m, const std::array<double, 4>& x) const {
    double v = c0[a][m];
    for (int i = 0; i < 4; ++i) {
      v += c1[a][m][i] * x[i];
      for (int j = 0; j < 4; ++j) v += 0.5 * c2[a][m][i][j] * x[i] * x[j];
    }
    return v;
  }
  double metric(int m, int n, const std::array<double, 4>& x) const {
    static constexpr double eta[4]{1, -1, -1, -1};
    double g = 0;
    for (int a = 0; a < 4; ++a) g += eta[a] * at(a, m, x) * at(a, n, x);
    return g;
  }
};

PolyTetrad random_tetrad(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  PolyTetrad p;
  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) {
      p.c0[a][m] = (a == m ? 1.0 : 0.0) + u(rng);
      for (int i = 0; i < 4; ++i) {
        p.c1[a][m][i] = u(rng);
        for (int j = i; j < 4; ++j) p.c2[a][m][i][j] = p.c2[a][m][j][i] = u(rng);
      }
    }
  return p;
}

}  // namespace

TEST_CASE("inverse metric contraction") {
  CHECK(equal(contract_pairs(metric_inv(mu, rho) * metric(rho, nu)), kronecker(st("mu", Variance::Upper), nu)));
}

TEST_CASE("tetrad completeness gives the metric") {
  CHECK(equal(contract_pairs(eta(lo("a"), lo("b")) * tetrad(up("a"), mu) * tetrad(up("b"), nu)), metric(mu, nu)));
}

TEST_CASE("kronecker and metric traces") {
  CHECK(equal(contract_pairs(kronecker(st("mu", Variance::Upper), mu)), Expr::constant(Coeff(4))));
  CHECK(equal(contract_pairs(metric_inv(mu, nu) * metric(mu, nu)), Expr::constant(Coeff(4))));
}

TEST_CASE("christoffel is symmetric in its lower indices") {
  const auto a = christoffel();
  const auto b = christoffel(st("rho", Variance::Upper), nu, mu);
  CHECK(equal(a.expansion, b.expansion));
}

TEST_CASE("christoffel vanishes for a constant flat metric") {
  for (int k = 0; k < 5; ++k) {
    auto rng = trial_rng(3, k);
    const Assignment a = flat_assignment(rng);
    const Components c = evaluate(christoffel().expansion, a);
    REQUIRE(c.data.size() == 64);
    for (const auto& x : c.data) CHECK(std::abs(x) < 1e-15);
  }
}

TEST_CASE("christoffel matches finite differences of a polynomial metric") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const PolyTetrad p = random_tetrad(rng);
    auto arng = trial_rng(5, trial);
    Assignment a = sample_assignment(arng);
    for (int k = 0; k < 4; ++k)
      for (int m = 0; m < 4; ++m) {
        RealJet j(p.c0[k][m]);
        for (int i = 0; i < 4; ++i) {
          j.d[i] = p.c1[k][m][i];
          for (int l = 0; l < 4; ++l) j.h[i][l] = p.c2[k][m][i][l];
        }
        a.tetrad[k][m] = j;
      }
    a.derive();

    // dg[s][m][n] = d_s g_{mn} at the origin, five-point stencil
    const double h = 1e-3;
    double dg[4][4][4];
    for (int s = 0; s < 4; ++s)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          auto g_at = [&](double t) {
            std::array<double, 4> x{};
            x[s] = t;
            return p.metric(m, n, x);
          };
          dg[s][m][n] = (-g_at(2 * h) + 8 * g_at(h) - 8 * g_at(-h) + g_at(-2 * h)) / (12 * h);
        }
    // Components are ordered by label name: mu, nu, rho (last fastest)
    const Components c = evaluate(christoffel().expansion, a);
    REQUIRE(c.labels == std::vector<std::string>{"mu", "nu", "rho"});
    double worst = 0;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        for (int r = 0; r < 4; ++r) {
          double expected = 0;
          for (int s = 0; s < 4; ++s)
            expected += 0.5 * a.ginv[r][s].v * (dg[m][s][n] + dg[n][s][m] - dg[s][m][n]);
          const cplx got = c.data[static_cast<std::size_t>((m * 4 + n) * 4 + r)];
          worst = std::max(worst, std::abs(got - expected) / std::max(1.0, std::abs(expected)));
        }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("contract_pairs reaches a fixpoint and preserves values") {
  const auto pool = random_densities(30, 17);
  for (const auto& e : pool) {
    const Expr once = contract_pairs(e);
    INFO(render(e));
    CHECK(equal(contract_pairs(once), once));
    CHECK(max_deviation(e, once, 100) < 1e-9);
  }
}

TEST_CASE("every tensor rule holds numerically") {
  for (const auto& r : tensor_rules()) {
    INFO(r.name);
    CHECK(check_rule(r, 100, 1).pass());
  }
}
