#include "weylcheck/tensor_algebra.hpp"

#include <optional>

namespace weylcheck {

namespace {

bool underived(const Factor& f) { return f.derivs.empty() && f.exponent == 1; }

Factor indexed(AtomKind kind, std::vector<Index> indices) {
  Factor f;
  f.kind = kind;
  f.indices = std::move(indices);
  return f;
}

// Renames the single occurrence of `label` (outside factor `skip`) to
// `replacement`. Returns false if the label does not occur.
bool relabel_partner(Term& t, std::size_t skip, const std::string& label, const Index& replacement,
                     bool take_variance) {
  Factor held = std::move(t.factors[skip]);
  t.factors[skip] = Factor{};
  bool found = false;
  visit_indices(t, [&](Index& i) {
    if (found || i.label != label) return;
    i.label = replacement.label;
    if (take_variance) i.variance = replacement.variance;
    found = true;
  });
  t.factors[skip] = std::move(held);
  return found;
}

void erase_factor(Term& t, std::size_t k) { t.factors.erase(t.factors.begin() + static_cast<long>(k)); }

// eta and delta: traces and absorption into the contraction partner.
bool contract_metric_like(Term& t) {
  for (std::size_t k = 0; k < t.factors.size(); ++k) {
    const Factor& f = t.factors[k];
    const bool frame = f.kind == AtomKind::MinkowskiMetric;
    if (!frame && f.kind != AtomKind::Kronecker) continue;
    const Index first = f.indices[0];
    const Index second = f.indices[1];
    if (first.label == second.label) {
      t.coeff = t.coeff * Coeff(kDimension);
      erase_factor(t, k);
      return true;
    }
    if (relabel_partner(t, k, first.label, second, frame) ||
        relabel_partner(t, k, second.label, first, frame)) {
      erase_factor(t, k);
      return true;
    }
  }
  return false;
}

std::optional<std::string> shared_label(const Index& x, const Index& y) {
  if (x.label == y.label) return x.label;
  return std::nullopt;
}

// Rewrites the product of two underived factors, if a rule applies.
std::optional<Factor> contract_two(const Factor& x, const Factor& y) {
  using K = AtomKind;
  auto is = [](const Factor& f, K k) { return f.kind == k; };
  // g^{mu rho} g_{rho nu}
  if (is(x, K::InverseMetric) && is(y, K::Metric)) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (shared_label(x.indices[i], y.indices[j]))
          return indexed(K::Kronecker, {x.indices[1 - i], y.indices[1 - j]});
  }
  // g^{mu nu} eps^a_nu -> eps^{a mu};  g_{mu nu} eps_a^nu -> eps_{a mu}
  if ((is(x, K::InverseMetric) && is(y, K::Tetrad)) || (is(x, K::Metric) && is(y, K::InverseTetrad))) {
    for (int i = 0; i < 2; ++i)
      if (shared_label(x.indices[i], y.indices[1])) {
        Index mu = x.indices[1 - i];
        return indexed(is(y, K::Tetrad) ? K::InverseTetrad : K::Tetrad, {y.indices[0], mu});
      }
  }
  if (is(x, K::Tetrad) && is(y, K::InverseTetrad)) {
    // spacetime contraction: eps^a_mu eps_b^mu -> eta^a_b
    if (shared_label(x.indices[1], y.indices[1])) return indexed(K::MinkowskiMetric, {x.indices[0], y.indices[0]});
    // frame contraction: eps^a_mu eps_a^nu -> delta^nu_mu
    if (shared_label(x.indices[0], y.indices[0])) return indexed(K::Kronecker, {y.indices[1], x.indices[1]});
  }
  if (is(x, K::Tetrad) && is(y, K::Tetrad) && shared_label(x.indices[0], y.indices[0]))
    return indexed(K::Metric, {x.indices[1], y.indices[1]});
  if (is(x, K::InverseTetrad) && is(y, K::InverseTetrad) && shared_label(x.indices[0], y.indices[0]))
    return indexed(K::InverseMetric, {x.indices[1], y.indices[1]});
  return std::nullopt;
}

bool contract_pair(Term& t) {
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (!underived(t.factors[i])) continue;
    for (std::size_t j = 0; j < t.factors.size(); ++j) {
      if (i == j || !underived(t.factors[j])) continue;
      auto r = contract_two(t.factors[i], t.factors[j]);
      if (!r) continue;
      t.factors[i] = std::move(*r);
      erase_factor(t, j);
      return true;
    }
  }
  return false;
}

}  // namespace

Expr contract_pairs(const Expr& e) {
  std::vector<Term> out;
  out.reserve(e.terms().size());
  const Expr canonical = canonicalize(e);
  for (Term t : canonical.terms()) {
    while (contract_metric_like(t) || contract_pair(t)) {
    }
    out.push_back(std::move(t));
  }
  return canonicalize(Expr::from_terms(std::move(out)));
}

ChristoffelExpr christoffel(const Index& rho, const Index& mu, const Index& nu) {
  std::string dummy = "lam";
  while (dummy == rho.label || dummy == mu.label || dummy == nu.label) dummy += "1";
  const Index s = st(dummy);
  const Expr bracket = partial(mu, metric(s, nu)) + partial(nu, metric(s, mu)) - partial(s, metric(mu, nu));
  ChristoffelExpr c;
  c.upper = st(rho.label, Variance::Upper);
  c.lower_first = st(mu.label);
  c.lower_second = st(nu.label);
  c.expansion = canonicalize(Rational(1, 2) * (metric_inv(rho, s) * bracket));
  return c;
}

std::vector<RewriteRule> tensor_rules() {
  const Index mu = st("mu"), nu = st("nu"), rho = st("rho"), sg = st("sigma");
  const Index a = up("a"), b = up("b");
  std::vector<std::pair<std::string, Expr>> lhs{
      {"inverse metric", metric_inv(mu, rho) * metric(rho, nu)},
      {"metric trace", metric_inv(mu, nu) * metric(mu, nu)},
      {"kronecker contraction", kronecker(st("mu", Variance::Upper), nu) * metric_inv(nu, rho)},
      {"kronecker trace", kronecker(st("mu", Variance::Upper), mu)},
      {"eta eta", eta(a, lo("c")) * eta(up("c"), lo("b"))},
      {"eta absorption", eta(lo("a"), lo("b")) * tetrad(a, mu)},
      {"tetrad frame contraction", tetrad(a, mu) * tetrad_inv(lo("a"), nu)},
      {"tetrad spacetime contraction", tetrad(a, mu) * tetrad_inv(lo("b"), mu)},
      {"tetrad completeness", eta(lo("a"), lo("b")) * tetrad(a, mu) * tetrad(b, nu)},
      {"inverse tetrad completeness", eta(a, b) * tetrad_inv(lo("a"), mu) * tetrad_inv(lo("b"), nu)},
      {"raise tetrad", metric_inv(mu, nu) * tetrad(a, nu)},
      {"lower inverse tetrad", metric(mu, nu) * tetrad_inv(lo("a"), nu)},
      {"raised tetrad product", metric_inv(nu, sg) * tetrad(b, sg) * tetrad(a, nu)},
  };
  std::vector<RewriteRule> rules;
  for (auto& [name, e] : lhs) rules.push_back({"tensor_algebra", name, e, contract_pairs(e), RuleCheck::Identity, 0});
  const auto g1 = christoffel();
  const auto g2 = christoffel(st("rho", Variance::Upper), nu, mu);
  rules.push_back({"tensor_algebra", "christoffel symmetry", g1.expansion, g2.expansion, RuleCheck::Identity, 0});
  return rules;
}

}  // namespace weylcheck
