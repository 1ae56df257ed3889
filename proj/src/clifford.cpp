#include "weylcheck/clifford.hpp"

#include "weylcheck/tensor_algebra.hpp"

#include <algorithm>
#include <numeric>

namespace weylcheck {

namespace {

// Rebuilds a term with each chain element replaced by a matrix-valued Expr.
template <typename Fn>
Expr rebuild(const Term& t, Fn&& element) {
  Term scalar = t;
  scalar.fermion.reset();
  Expr acc(scalar);
  if (!t.fermion) return acc;
  const auto& fp = *t.fermion;
  if (fp.has_bar) {
    Factor bar;
    bar.kind = AtomKind::FermionBar;
    bar.derivs = fp.bar_derivs;
    acc = acc * atom_expr(bar);
  }
  Expr chain = identity_spinor();
  for (const auto& c : fp.chain) chain = chain * element(c);
  acc = acc * chain;
  if (fp.has_psi) {
    Factor p;
    p.kind = AtomKind::Fermion;
    p.derivs = fp.psi_derivs;
    acc = acc * atom_expr(p);
  }
  return acc;
}

Expr expand_element(const CliffordFactor& c) {
  if (c.kind == CliffordKind::Sigma) {
    const Index& a = c.indices[0];
    const Index& b = c.indices[1];
    return Rational(1, 4) * (gamma(a) * gamma(b) - gamma(b) * gamma(a));
  }
  return chain_expr({c});
}

int permutation_sign(const std::vector<std::size_t>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

// gamma^{[b1..bm]} as (1/m!) sum over permutations of signed gamma products.
std::vector<std::pair<Coeff, std::vector<Index>>> unfold(const CliffordFactor& c) {
  if (c.kind == CliffordKind::Gamma) return {{Coeff(1), c.indices}};
  std::vector<std::size_t> p(c.indices.size());
  std::iota(p.begin(), p.end(), 0);
  std::int64_t fact = 1;
  for (std::size_t k = 2; k <= p.size(); ++k) fact *= static_cast<std::int64_t>(k);
  std::vector<std::pair<Coeff, std::vector<Index>>> out;
  do {
    std::vector<Index> seq;
    for (auto k : p) seq.push_back(c.indices[k]);
    out.push_back({Coeff(Rational(permutation_sign(p), fact)), std::move(seq)});
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

struct Piece {
  Coeff coeff{1};
  std::vector<Index> anti;   // antisymmetrized gamma indices
  std::vector<Factor> etas;  // eta factors produced by anticommutation
};

Factor eta_factor(const Index& a, const Index& b) {
  Factor f;
  f.kind = AtomKind::MinkowskiMetric;
  f.indices = {a, b};
  return f;
}

// gamma^{[a1..ak]} gamma^b = gamma^{[a1..ak b]} + sum_i (-1)^{k-i} eta^{a_i b} gamma^{[..^a_i..]}
void multiply_gamma(std::vector<Piece>& pieces, const Index& b) {
  std::vector<Piece> next;
  for (const auto& p : pieces) {
    const std::size_t k = p.anti.size();
    const bool repeated =
        std::any_of(p.anti.begin(), p.anti.end(), [&](const Index& a) { return a.label == b.label; });
    if (!repeated && k + 1 <= static_cast<std::size_t>(kDimension)) {
      Piece q = p;
      q.anti.push_back(b);
      next.push_back(std::move(q));
    }
    for (std::size_t i = 0; i < k; ++i) {
      Piece q = p;
      if ((k - 1 - i) % 2 == 1) q.coeff = -q.coeff;
      q.etas.push_back(eta_factor(p.anti[i], b));
      q.anti.erase(q.anti.begin() + static_cast<long>(i));
      next.push_back(std::move(q));
    }
  }
  pieces = std::move(next);
}

Expr canonical_chain(const Term& t) {
  const auto& chain = t.fermion->chain;
  std::vector<Piece> pieces{Piece{}};
  for (const auto& c : chain) {
    std::vector<Piece> summed;
    for (const auto& [coeff, seq] : unfold(c)) {
      std::vector<Piece> branch = pieces;
      for (auto& p : branch) p.coeff = p.coeff * coeff;
      for (const auto& b : seq) multiply_gamma(branch, b);
      summed.insert(summed.end(), branch.begin(), branch.end());
    }
    pieces = std::move(summed);
  }
  std::vector<Term> out;
  for (auto& p : pieces) {
    Term r = t;
    r.coeff = t.coeff * p.coeff;
    r.factors.insert(r.factors.end(), p.etas.begin(), p.etas.end());
    r.fermion->chain.clear();
    if (p.anti.size() == 1) {
      r.fermion->chain.push_back({CliffordKind::Gamma, p.anti});
    } else if (p.anti.size() > 1) {
      r.fermion->chain.push_back({CliffordKind::GammaProduct, p.anti});
    }
    out.push_back(std::move(r));
  }
  return Expr::from_terms(std::move(out));
}

}  // namespace

Expr expand_sigma(const Expr& e) {
  Expr out;
  const Expr canonical = canonicalize(e);  // drops sigma^{aa}
  for (const auto& t : canonical.terms()) out += rebuild(t, expand_element);
  return canonicalize(out);
}

Expr gamma_canonicalize(const Expr& e) {
  Expr out;
  const Expr expanded = expand_sigma(e);
  for (const auto& t : expanded.terms()) {
    if (!t.fermion || t.fermion->chain.size() <= 1) {
      out += Expr(t);
      continue;
    }
    out += canonical_chain(t);
  }
  return contract_pairs(out);
}

Expr simplify(const Expr& e) {
  Expr current = canonicalize(e);
  std::string last = render(current);
  for (int round = 0; round < 16; ++round) {
    current = gamma_canonicalize(contract_pairs(current));
    std::string now = render(current);
    if (now == last) break;
    last = std::move(now);
  }
  return current;
}

Rational gamma_sigma_coefficient(int dimension) {
  // gamma^c gamma_c = d;  gamma^c gamma_b gamma_c = -gamma^c gamma_c gamma_b + 2 gamma_b = (2 - d) gamma_b
  const Rational d(dimension);
  const Rational contracted = d;
  const Rational sandwiched = Rational(2) - d;
  return (contracted - sandwiched) / Rational(4);
}

std::vector<RewriteRule> clifford_rules() {
  const Index a = up("a"), b = up("b"), c = up("c"), d = up("d"), h = up("h");
  std::vector<std::pair<std::string, Expr>> lhs{
      {"anticommutator", gamma(a) * gamma(b) + gamma(b) * gamma(a)},
      {"gamma trace", gamma(c) * gamma(lo("c"))},
      {"sigma definition", sigma(a, b)},
      {"gamma sigma contraction", gamma(c) * sigma(lo("c"), lo("b"))},
      {"gamma sandwich", gamma(c) * gamma(b) * gamma(lo("c"))},
      {"sigma antisymmetry", sigma(b, a) + sigma(a, b)},
      {"three gammas", gamma(a) * gamma(b) * gamma(c)},
      {"four gammas", gamma(a) * gamma(lo("b")) * gamma(c) * gamma(d)},
      {"five gammas", gamma(a) * gamma(b) * gamma(c) * gamma(d) * gamma(h)},
      {"sigma product", sigma(a, b) * sigma(c, d)},
      {"antisymmetric times gamma", gamma_product({a, b, c}) * gamma(lo("b"))},
  };
  std::vector<RewriteRule> rules;
  for (auto& [name, e] : lhs)
    rules.push_back({"clifford", name, e, gamma_canonicalize(e), RuleCheck::FieldFreeIdentity, 0});
  return rules;
}

}  // namespace weylcheck
