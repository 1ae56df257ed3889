#include "weylcheck/expr.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace weylcheck {

// ---- rationals ------------------------------------------------------------

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(std::stoll(text));
  return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

std::string to_string(const Coeff& c) {
  if (c.im == 0) return to_string(c.re);
  auto imag = [](const Rational& v) -> std::string {
    if (v == 1) return "i";
    if (v == -1) return "-i";
    return to_string(v) + "*i";
  };
  if (c.re == 0) return imag(c.im);
  const Rational mag = c.im < 0 ? -c.im : c.im;
  return "(" + to_string(c.re) + (c.im < 0 ? " - " : " + ") + imag(mag) + ")";
}

// ---- atom tables ----------------------------------------------------------

namespace {

using A = Alphabet;
using V = Variance;

constexpr std::array<SlotSpec, 2> kLowLow{{{A::Spacetime, V::Lower}, {A::Spacetime, V::Lower}}};
constexpr std::array<SlotSpec, 2> kUpUp{{{A::Spacetime, V::Upper}, {A::Spacetime, V::Upper}}};
constexpr std::array<SlotSpec, 2> kFrameFrame{{{A::Frame, V::Upper}, {A::Frame, V::Upper}}};
constexpr std::array<SlotSpec, 2> kDelta{{{A::Spacetime, V::Upper}, {A::Spacetime, V::Lower}}};
constexpr std::array<SlotSpec, 3> kGauge3{{{A::Gauge, V::Upper}, {A::Gauge, V::Upper}, {A::Gauge, V::Upper}}};
constexpr std::array<SlotSpec, 2> kTetrad{{{A::Frame, V::Upper}, {A::Spacetime, V::Lower}}};
constexpr std::array<SlotSpec, 2> kTetradInv{{{A::Frame, V::Lower}, {A::Spacetime, V::Upper}}};
constexpr std::array<SlotSpec, 1> kVector{{{A::Spacetime, V::Lower}}};
constexpr std::array<SlotSpec, 2> kYM{{{A::Gauge, V::Upper}, {A::Spacetime, V::Lower}}};

}  // namespace

int alphabet_range(Alphabet a) { return a == Alphabet::Gauge ? kGaugeDimension : kDimension; }

std::span<const SlotSpec> slots_of(AtomKind kind) {
  switch (kind) {
    case AtomKind::Metric: return kLowLow;
    case AtomKind::InverseMetric: return kUpUp;
    case AtomKind::MinkowskiMetric: return kFrameFrame;
    case AtomKind::Kronecker: return kDelta;
    case AtomKind::StructureConst: return kGauge3;
    case AtomKind::Tetrad: return kTetrad;
    case AtomKind::InverseTetrad: return kTetradInv;
    case AtomKind::EMVector:
    case AtomKind::WeylVector:
    case AtomKind::LogDerivative: return kVector;
    case AtomKind::YMVector: return kYM;
    default: return {};
  }
}

Symmetry symmetry_of(AtomKind kind) {
  switch (kind) {
    case AtomKind::Metric:
    case AtomKind::InverseMetric:
    case AtomKind::MinkowskiMetric: return Symmetry::Symmetric;
    case AtomKind::StructureConst: return Symmetry::Antisymmetric;
    default: return Symmetry::None;
  }
}

Symmetry symmetry_of(CliffordKind kind) {
  return kind == CliffordKind::Gamma ? Symmetry::None : Symmetry::Antisymmetric;
}

std::string_view name_of(AtomKind kind) {
  switch (kind) {
    case AtomKind::Coupling: return "coupling";
    case AtomKind::LambdaPower: return "Lambda";
    case AtomKind::DetFactor: return "sqrtg";
    case AtomKind::Metric: return "g";
    case AtomKind::InverseMetric: return "ginv";
    case AtomKind::MinkowskiMetric: return "eta";
    case AtomKind::Kronecker: return "delta";
    case AtomKind::StructureConst: return "fabc";
    case AtomKind::Tetrad: return "eps";
    case AtomKind::InverseTetrad: return "epsinv";
    case AtomKind::Scalar: return "phi";
    case AtomKind::EMVector: return "A";
    case AtomKind::YMVector: return "W";
    case AtomKind::WeylVector: return "S";
    case AtomKind::LogDerivative: return "D";
    case AtomKind::Fermion: return "Psi";
    case AtomKind::FermionBar: return "Psibar";
  }
  return "?";
}

bool is_constant(AtomKind kind) {
  switch (kind) {
    case AtomKind::Coupling:
    case AtomKind::MinkowskiMetric:
    case AtomKind::Kronecker:
    case AtomKind::StructureConst: return true;
    default: return false;
  }
}

// ---- Expr arithmetic ------------------------------------------------------

namespace {

std::optional<FermionPart> concat(const std::optional<FermionPart>& a,
                                  const std::optional<FermionPart>& b) {
  if (!a) return b;
  if (!b) return a;
  if (a->has_psi) throw StructureError("nothing may follow Psi in a fermion bilinear");
  if (b->has_bar && (a->has_bar || !a->chain.empty()))
    throw StructureError("Psibar must open a fermion bilinear");
  FermionPart r;
  r.has_bar = a->has_bar || b->has_bar;
  r.bar_derivs = a->has_bar ? a->bar_derivs : b->bar_derivs;
  r.chain = a->chain;
  r.chain.insert(r.chain.end(), b->chain.begin(), b->chain.end());
  r.has_psi = b->has_psi;
  r.psi_derivs = b->psi_derivs;
  return r;
}

Term multiply(const Term& a, const Term& b) {
  Term t;
  t.coeff = a.coeff * b.coeff;
  t.factors = a.factors;
  t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
  t.fermion = concat(a.fermion, b.fermion);
  return t;
}

}  // namespace

Expr::Expr(Term t) { terms_.push_back(std::move(t)); }

Expr Expr::constant(Coeff c) {
  if (c.is_zero()) return {};
  Term t;
  t.coeff = c;
  return Expr(std::move(t));
}

Expr Expr::from_terms(std::vector<Term> terms) {
  Expr e;
  e.terms_ = std::move(terms);
  return e;
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

Expr operator+(const Expr& a, const Expr& b) {
  Expr r = a;
  r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
  return r;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  Expr r;
  r.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) r.terms_.push_back(multiply(x, y));
  return r;
}

Expr operator*(const Coeff& c, const Expr& e) {
  if (c.is_zero()) return {};
  Expr r = e;
  for (auto& t : r.terms_) t.coeff = c * t.coeff;
  return r;
}

// ---- builders -------------------------------------------------------------

namespace {

Factor make_factor(AtomKind kind, std::vector<Index> indices) {
  const auto slots = slots_of(kind);
  if (indices.size() != slots.size())
    throw IndexArityMismatch(std::string(name_of(kind)) + " takes " +
                             std::to_string(slots.size()) + " indices");
  for (std::size_t s = 0; s < slots.size(); ++s) {
    auto& idx = indices[s];
    if (idx.alphabet != slots[s].alphabet)
      throw IndexArityMismatch(std::string(name_of(kind)) + ": index '" + idx.label +
                               "' has the wrong alphabet");
    if (idx.alphabet != Alphabet::Frame) idx.variance = slots[s].native;
  }
  Factor f;
  f.kind = kind;
  f.indices = std::move(indices);
  return f;
}

Expr single(Factor f) {
  Term t;
  t.factors.push_back(std::move(f));
  return Expr(std::move(t));
}

CliffordFactor clifford(CliffordKind kind, std::vector<Index> indices) {
  for (const auto& i : indices)
    if (i.alphabet != Alphabet::Frame)
      throw IndexArityMismatch("Clifford atoms carry frame indices only");
  return {kind, std::move(indices)};
}

}  // namespace

Expr chain_expr(std::vector<CliffordFactor> chain) {
  Term t;
  t.fermion = FermionPart{};
  t.fermion->chain = std::move(chain);
  return Expr(std::move(t));
}

Expr metric(const Index& mu, const Index& nu) { return single(make_factor(AtomKind::Metric, {mu, nu})); }
Expr metric_inv(const Index& mu, const Index& nu) {
  return single(make_factor(AtomKind::InverseMetric, {mu, nu}));
}
Expr det_factor() { return single(make_factor(AtomKind::DetFactor, {})); }
Expr eta(const Index& a, const Index& b) { return single(make_factor(AtomKind::MinkowskiMetric, {a, b})); }
Expr kronecker(const Index& upper, const Index& lower) {
  return single(make_factor(AtomKind::Kronecker, {upper, lower}));
}
Expr structure_const(const Index& i, const Index& j, const Index& k) {
  return single(make_factor(AtomKind::StructureConst, {i, j, k}));
}
Expr tetrad(const Index& a, const Index& mu) { return single(make_factor(AtomKind::Tetrad, {a, mu})); }
Expr tetrad_inv(const Index& a, const Index& mu) {
  return single(make_factor(AtomKind::InverseTetrad, {a, mu}));
}
Expr scalar_field() { return single(make_factor(AtomKind::Scalar, {})); }
Expr em_vector(const Index& mu) { return single(make_factor(AtomKind::EMVector, {mu})); }
Expr ym_vector(const Index& i, const Index& mu) { return single(make_factor(AtomKind::YMVector, {i, mu})); }
Expr weyl_vector(const Index& mu) { return single(make_factor(AtomKind::WeylVector, {mu})); }
Expr log_derivative(const Index& mu, std::string tag) {
  auto f = make_factor(AtomKind::LogDerivative, {mu});
  f.tag = std::move(tag);
  return single(std::move(f));
}
Expr lambda_power(Rational k, std::string tag) {
  if (k == 0) return Expr::constant(1);
  Factor f;
  f.kind = AtomKind::LambdaPower;
  f.tag = std::move(tag);
  f.exponent = k;
  return single(std::move(f));
}
Expr coupling(std::string name, Rational power) {
  if (power == 0) return Expr::constant(1);
  Factor f;
  f.kind = AtomKind::Coupling;
  f.tag = std::move(name);
  f.exponent = power;
  return single(std::move(f));
}
Expr psi() {
  Term t;
  t.fermion = FermionPart{};
  t.fermion->has_psi = true;
  return Expr(std::move(t));
}
Expr psibar() {
  Term t;
  t.fermion = FermionPart{};
  t.fermion->has_bar = true;
  return Expr(std::move(t));
}
Expr gamma(const Index& a) { return chain_expr({clifford(CliffordKind::Gamma, {a})}); }
Expr sigma(const Index& a, const Index& b) { return chain_expr({clifford(CliffordKind::Sigma, {a, b})}); }
Expr gamma_product(std::vector<Index> indices) {
  if (indices.empty()) return identity_spinor();
  if (indices.size() == 1) return gamma(indices.front());
  return chain_expr({clifford(CliffordKind::GammaProduct, std::move(indices))});
}
Expr identity_spinor() { return chain_expr({}); }
Expr imaginary_unit() { return Expr::constant(Coeff::imaginary_unit()); }

Expr atom_expr(const Factor& f) {
  if (f.kind == AtomKind::Fermion || f.kind == AtomKind::FermionBar) {
    Term t;
    t.fermion = FermionPart{};
    if (f.kind == AtomKind::Fermion) {
      t.fermion->has_psi = true;
      t.fermion->psi_derivs = f.derivs;
    } else {
      t.fermion->has_bar = true;
      t.fermion->bar_derivs = f.derivs;
    }
    return Expr(std::move(t));
  }
  return single(f);
}

// ---- derivatives ----------------------------------------------------------

Expr partial(const Index& mu_in, const Expr& e) {
  if (mu_in.alphabet != Alphabet::Spacetime)
    throw MalformedIndex("partial derivative index '" + mu_in.label + "' must be a spacetime index");
  const Index mu{mu_in.label, Alphabet::Spacetime, Variance::Lower};
  std::vector<Term> out;
  for (const auto& t : e.terms()) {
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      const Factor& f = t.factors[i];
      if (is_constant(f.kind)) continue;
      Term d = t;
      if (f.kind == AtomKind::LambdaPower) {
        d.coeff = d.coeff * Coeff(f.exponent);
        Factor dl;
        dl.kind = AtomKind::LogDerivative;
        dl.tag = f.tag;
        dl.indices = {mu};
        d.factors.push_back(std::move(dl));
      } else if (f.exponent != 1) {
        d.coeff = d.coeff * Coeff(f.exponent);
        d.factors[i].exponent -= 1;
        Factor df = f;
        df.exponent = 1;
        df.derivs.push_back(mu);
        if (d.factors[i].exponent == 0) d.factors.erase(d.factors.begin() + static_cast<long>(i));
        d.factors.push_back(std::move(df));
      } else {
        d.factors[i].derivs.push_back(mu);
      }
      out.push_back(std::move(d));
    }
    if (t.fermion && t.fermion->has_bar) {
      Term d = t;
      d.fermion->bar_derivs.push_back(mu);
      out.push_back(std::move(d));
    }
    if (t.fermion && t.fermion->has_psi) {
      Term d = t;
      d.fermion->psi_derivs.push_back(mu);
      out.push_back(std::move(d));
    }
  }
  return Expr::from_terms(std::move(out));
}

// ---- index bookkeeping ----------------------------------------------------

namespace {

template <typename TermT, typename Fn>
void for_each_index(TermT& t, Fn&& fn) {
  for (auto& f : t.factors) {
    for (auto& i : f.indices) fn(i);
    for (auto& i : f.derivs) fn(i);
  }
  if (t.fermion) {
    for (auto& i : t.fermion->bar_derivs) fn(i);
    for (auto& c : t.fermion->chain)
      for (auto& i : c.indices) fn(i);
    for (auto& i : t.fermion->psi_derivs) fn(i);
  }
}

std::map<std::string, int> label_counts(const Term& t) {
  std::map<std::string, int> counts;
  for_each_index(t, [&](const Index& i) { ++counts[i.label]; });
  return counts;
}

std::set<std::string> dummy_labels(const Term& t) {
  std::set<std::string> out;
  for (const auto& [label, n] : label_counts(t))
    if (n >= 2) out.insert(label);
  return out;
}

}  // namespace

void visit_indices(Term& t, const std::function<void(Index&)>& fn) { for_each_index(t, fn); }
void visit_indices(const Term& t, const std::function<void(const Index&)>& fn) { for_each_index(t, fn); }

std::vector<Index> all_indices(const Term& t) {
  std::vector<Index> out;
  for_each_index(t, [&](const Index& i) { out.push_back(i); });
  return out;
}

std::vector<Index> free_indices(const Term& t) {
  const auto counts = label_counts(t);
  std::vector<Index> out;
  for_each_index(t, [&](const Index& i) {
    if (counts.at(i.label) == 1) out.push_back(i);
  });
  return out;
}

std::vector<Index> free_indices(const Expr& e) {
  if (e.terms().empty()) return {};
  return free_indices(e.terms().front());
}

std::set<std::string> labels_of(const Term& t) {
  std::set<std::string> out;
  for_each_index(t, [&](const Index& i) { out.insert(i.label); });
  return out;
}

Term rename_labels(const Term& t, const std::function<std::string(const std::string&)>& fn) {
  Term r = t;
  for_each_index(r, [&](Index& i) { i.label = fn(i.label); });
  return r;
}

Expr rename_labels(const Expr& e, const std::function<std::string(const std::string&)>& fn) {
  std::vector<Term> terms;
  terms.reserve(e.terms().size());
  for (const auto& t : e.terms()) terms.push_back(rename_labels(t, fn));
  return Expr::from_terms(std::move(terms));
}

std::vector<Index> distinct_labels(const Expr& e) {
  std::vector<Index> out;
  std::set<std::string> seen;
  for (const auto& t : e.terms())
    for_each_index(t, [&](const Index& i) {
      if (seen.insert(i.label).second) out.push_back(i);
    });
  return out;
}

namespace {

std::string fresh_label(const std::string& base, std::set<std::string>& used) {
  for (int n = 1;; ++n) {
    std::string candidate = base + std::to_string(n);
    if (used.insert(candidate).second) return candidate;
  }
}

// Renames the dummies of every term of `e` away from `used` (which grows).
Expr freshen_dummies(const Expr& e, std::set<std::string>& used) {
  std::map<std::string, std::string> mapping;
  for (const auto& t : e.terms())
    for (const auto& d : dummy_labels(t))
      if (!mapping.count(d)) mapping[d] = used.count(d) ? fresh_label(d, used) : (used.insert(d), d);
  return rename_labels(e, [&](const std::string& l) {
    auto it = mapping.find(l);
    return it == mapping.end() ? l : it->second;
  });
}

}  // namespace

Expr power(const Expr& e, int n) {
  if (n < 0) throw StructureError("negative powers are only defined for Lambda and couplings");
  Expr r = Expr::constant(1);
  std::set<std::string> used;
  for (const auto& t : e.terms())
    for (const auto& l : free_indices(t)) used.insert(l.label);
  for (int k = 0; k < n; ++k) r = r * freshen_dummies(e, used);
  return r;
}

// ---- rendering ------------------------------------------------------------

namespace {

std::string render_exponent(const Rational& r) {
  if (r == 1) return "";
  if (r.denominator() == 1 && r > 0) return "^" + to_string(r);
  return "^(" + to_string(r) + ")";
}

struct RenderOpts {
  const std::set<std::string>* blind = nullptr;  // frame labels rendered without variance
};

std::string render_index(const Index& i, const RenderOpts& o) {
  if (i.alphabet != Alphabet::Frame) return i.label;
  if (o.blind && o.blind->count(i.label)) return i.label;
  return (i.variance == Variance::Upper ? "^" : "_") + i.label;
}

std::string join_indices(const std::vector<Index>& v, const RenderOpts& o) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ",";
    s += render_index(v[k], o);
  }
  return s;
}

std::string wrap_derivs(const std::string& base, const std::vector<Index>& derivs, const RenderOpts& o) {
  if (derivs.empty()) return base;
  return "d[" + join_indices(derivs, o) + "](" + base + ")";
}

std::string render_factor(const Factor& f, const RenderOpts& o) {
  std::string base;
  switch (f.kind) {
    case AtomKind::Coupling: base = f.tag; break;
    case AtomKind::LambdaPower: base = f.tag.empty() ? "Lambda" : "Lambda_" + f.tag; break;
    case AtomKind::LogDerivative: base = f.tag.empty() ? "D" : "D_" + f.tag; break;
    default: base = std::string(name_of(f.kind)); break;
  }
  if (!f.indices.empty()) base += "[" + join_indices(f.indices, o) + "]";
  base += render_exponent(f.exponent);
  return wrap_derivs(base, f.derivs, o);
}

std::string render_clifford(const CliffordFactor& c, const RenderOpts& o) {
  static constexpr std::array<const char*, 3> kNames{"gamma", "sigma", "gammaA"};
  return std::string(kNames[static_cast<int>(c.kind)]) + "[" + join_indices(c.indices, o) + "]";
}

std::vector<std::string> render_pieces(const Term& t, const RenderOpts& o) {
  std::vector<std::string> pieces;
  for (const auto& f : t.factors) pieces.push_back(render_factor(f, o));
  if (t.fermion) {
    const auto& fp = *t.fermion;
    if (fp.has_bar) pieces.push_back(wrap_derivs("Psibar", fp.bar_derivs, o));
    for (const auto& c : fp.chain) pieces.push_back(render_clifford(c, o));
    if (fp.matrix() && fp.chain.empty()) pieces.emplace_back("id");
    if (fp.has_psi) pieces.push_back(wrap_derivs("Psi", fp.psi_derivs, o));
  }
  return pieces;
}

std::string join_pieces(const std::vector<std::string>& pieces) {
  std::string s;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (k) s += "*";
    s += pieces[k];
  }
  return s;
}

std::string render_term(const Term& t, const RenderOpts& o) {
  const auto pieces = render_pieces(t, o);
  if (pieces.empty()) return to_string(t.coeff);
  const std::string body = join_pieces(pieces);
  if (t.coeff.is_one()) return body;
  if (t.coeff == Coeff(-1)) return "-" + body;
  return to_string(t.coeff) + "*" + body;
}

}  // namespace

std::string render(const Index& i, bool with_variance) {
  if (!with_variance) return i.label;
  return render_index(i, {});
}

std::string render(const Factor& f) { return render_factor(f, {}); }

std::string render(const Term& t) { return render_term(t, {}); }

std::string render(const Expr& e) {
  if (e.terms().empty()) return "0";
  std::string s;
  for (std::size_t k = 0; k < e.terms().size(); ++k) {
    std::string term = render(e.terms()[k]);
    if (k == 0) {
      s = term;
    } else if (term.front() == '-') {
      s += " - " + term.substr(1);
    } else {
      s += " + " + term;
    }
  }
  return s;
}

// ---- canonical form -------------------------------------------------------

namespace {

int factor_rank(const Factor& f) {
  if (!f.derivs.empty()) return 6;
  switch (f.kind) {
    case AtomKind::Coupling: return 0;
    case AtomKind::LambdaPower: return 1;
    case AtomKind::DetFactor: return 2;
    case AtomKind::Metric:
    case AtomKind::InverseMetric:
    case AtomKind::MinkowskiMetric:
    case AtomKind::Kronecker:
    case AtomKind::StructureConst: return 3;
    case AtomKind::Tetrad:
    case AtomKind::InverseTetrad: return 4;
    default: return 5;
  }
}

bool by_label(const Index& a, const Index& b) { return a.label < b.label; }

// Sorts indices by label; returns the permutation parity (+1/-1), or 0 when
// an antisymmetric slot list repeats a label.
int sort_slots(std::vector<Index>& v, Symmetry sym) {
  if (sym == Symmetry::None) return 1;
  int sign = 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    for (std::size_t j = i; j > 0 && by_label(v[j], v[j - 1]); --j) {
      std::swap(v[j], v[j - 1]);
      sign = -sign;
    }
  if (sym == Symmetry::Symmetric) return 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i].label == v[i - 1].label) return 0;
  return sign;
}

// Sorts symmetric slots, derivatives and commuting factors. Returns the sign
// picked up from antisymmetric atoms, 0 if the term vanishes identically.
int normalize(Term& t, const RenderOpts& o, std::vector<std::string>* keys_out = nullptr) {
  int sign = 1;
  for (auto& f : t.factors) {
    sign *= sort_slots(f.indices, symmetry_of(f.kind));
    if (f.kind == AtomKind::LogDerivative && !f.derivs.empty()) {
      // D_mu is a gradient, so d_nu D_mu is symmetric in all its indices
      f.derivs.push_back(f.indices.at(0));
      std::sort(f.derivs.begin(), f.derivs.end(), by_label);
      f.indices.at(0) = f.derivs.front();
      f.derivs.erase(f.derivs.begin());
    }
    std::sort(f.derivs.begin(), f.derivs.end(), by_label);
  }
  if (t.fermion) {
    std::sort(t.fermion->bar_derivs.begin(), t.fermion->bar_derivs.end(), by_label);
    std::sort(t.fermion->psi_derivs.begin(), t.fermion->psi_derivs.end(), by_label);
    for (auto& c : t.fermion->chain) sign *= sort_slots(c.indices, symmetry_of(c.kind));
  }
  std::vector<std::pair<std::pair<int, std::string>, std::size_t>> keyed;
  keyed.reserve(t.factors.size());
  for (std::size_t i = 0; i < t.factors.size(); ++i)
    keyed.push_back({{factor_rank(t.factors[i]), render_factor(t.factors[i], o)}, i});
  std::sort(keyed.begin(), keyed.end());
  std::vector<Factor> sorted;
  sorted.reserve(t.factors.size());
  for (const auto& k : keyed) sorted.push_back(std::move(t.factors[k.second]));
  t.factors = std::move(sorted);
  if (keys_out) {
    keys_out->clear();
    for (const auto& k : keyed) keys_out->push_back(k.first.second);
  }
  return sign;
}

std::vector<std::string> canonical_names(Alphabet a, std::size_t n, const std::set<std::string>& avoid) {
  static const std::vector<std::string> kSpacetime{"mu", "nu", "rho", "sigma", "alpha", "beta", "kappa", "tau"};
  static const std::vector<std::string> kFrame{"a", "b", "c", "d"};
  static const std::vector<std::string> kGauge{"i", "j", "k", "l"};
  const auto& seed = a == Alphabet::Spacetime ? kSpacetime : a == Alphabet::Frame ? kFrame : kGauge;
  const std::string stem = a == Alphabet::Spacetime ? "m" : a == Alphabet::Frame ? "f" : "g";
  std::vector<std::string> out;
  for (const auto& s : seed) {
    if (out.size() == n) return out;
    if (!avoid.count(s)) out.push_back(s);
  }
  for (int k = 1; out.size() < n; ++k) {
    std::string s = stem + std::to_string(k);
    if (!avoid.count(s)) out.push_back(s);
  }
  return out;
}

constexpr std::size_t kMaxRelabelings = 40320;

Alphabet alphabet_of(const Term& t, const std::string& label) {
  Alphabet a = Alphabet::Spacetime;
  for_each_index(t, [&](const Index& i) {
    if (i.label == label) a = i.alphabet;
  });
  return a;
}

void validate(const Term& t) {
  std::map<std::string, std::vector<Index>> occ;
  for_each_index(t, [&](const Index& i) { occ[i.label].push_back(i); });
  for (const auto& [label, v] : occ) {
    if (v.size() > 2)
      throw MalformedIndex("index '" + label + "' appears " + std::to_string(v.size()) + " times in a term");
    if (v.size() == 2) {
      if (v[0].alphabet != v[1].alphabet)
        throw MalformedIndex("dummy index '" + label + "' mixes alphabets");
      if (v[0].alphabet != Alphabet::Gauge && v[0].variance == v[1].variance)
        throw MalformedIndex("dummy index '" + label + "' must appear once upper and once lower");
    }
  }
}

struct Canonical {
  std::string key;  // structure without coefficient
  Term term;
};

bool merge_powers(Term& t) {
  std::vector<Factor> out;
  for (auto& f : t.factors) {
    if (f.exponent == 0) continue;
    if (f.indices.empty() && f.derivs.empty()) {
      auto it = std::find_if(out.begin(), out.end(), [&](const Factor& g) {
        return g.kind == f.kind && g.tag == f.tag && g.indices.empty() && g.derivs.empty();
      });
      if (it != out.end()) {
        it->exponent += f.exponent;
        continue;
      }
    }
    out.push_back(std::move(f));
  }
  std::erase_if(out, [](const Factor& f) { return f.exponent == 0; });
  t.factors = std::move(out);
  return true;
}

std::optional<Canonical> canonical_term(Term t) {
  if (t.coeff.is_zero()) return std::nullopt;
  merge_powers(t);
  if (t.fermion)
    for (const auto& c : t.fermion->chain)
      if (c.kind == CliffordKind::GammaProduct && c.indices.size() > static_cast<std::size_t>(kDimension))
        return std::nullopt;
  {
    // antisymmetric atoms with a repeated label vanish regardless of variance
    Term probe = t;
    if (normalize(probe, {}) == 0) return std::nullopt;
  }
  validate(t);
  for (auto& f : t.factors)
    for (auto& i : f.indices)
      if (i.alphabet == Alphabet::Gauge) i.variance = Variance::Upper;

  const auto counts = label_counts(t);
  std::set<std::string> free_labels;
  std::map<Alphabet, std::vector<std::string>> dummies;
  for_each_index(t, [&](const Index& i) {
    if (counts.at(i.label) == 1) {
      free_labels.insert(i.label);
    } else {
      auto& v = dummies[i.alphabet];
      if (std::find(v.begin(), v.end(), i.label) == v.end()) v.push_back(i.label);
    }
  });

  std::vector<std::string> dummy_labels;
  std::map<Alphabet, std::vector<std::string>> targets;
  std::set<std::string> frame_targets;
  for (auto& [alpha, labels] : dummies) {
    dummy_labels.insert(dummy_labels.end(), labels.begin(), labels.end());
    targets[alpha] = canonical_names(alpha, labels.size(), free_labels);
    if (alpha == Alphabet::Frame) frame_targets.insert(targets[alpha].begin(), targets[alpha].end());
  }
  const RenderOpts blind{&frame_targets};

  std::optional<Canonical> best;
  int best_sign = 0;
  bool vanishes = false;

  auto try_mapping = [&](const std::map<std::string, std::string>& mapping) {
    Term r = rename_labels(t, [&](const std::string& l) {
      auto it = mapping.find(l);
      return it == mapping.end() ? l : it->second;
    });
    const int sign = normalize(r, blind);
    if (sign == 0) {
      vanishes = true;
      return;
    }
    Term structure = r;
    structure.coeff = Coeff(1);
    std::string key = render_term(structure, blind);
    if (!best || key < best->key) {
      best = Canonical{std::move(key), std::move(r)};
      best->term.coeff = Coeff(sign) * t.coeff;
      best_sign = sign;
    } else if (key == best->key && sign != best_sign) {
      vanishes = true;
    }
  };

  // Dummies are coloured by how they sit in the term (colour refinement);
  // only relabelings that respect the ordered colour classes are tried, and
  // when those are still too many one class member is singled out in turn.
  // Everything here depends only on the term's structure, so isomorphic terms
  // end up with the same minimal key.
  using Colors = std::map<std::string, int>;
  std::set<std::string> markers{"*"};
  for (std::size_t k = 0; k < dummy_labels.size(); ++k) markers.insert("#" + std::to_string(k));
  const RenderOpts marked{&markers};

  auto rerank = [](Colors& colors, const std::map<std::string, std::pair<int, std::string>>& keys) {
    std::set<std::pair<int, std::string>> distinct;
    for (const auto& [l, k] : keys) distinct.insert(k);
    for (const auto& [l, k] : keys)
      colors[l] = static_cast<int>(std::distance(distinct.begin(), distinct.find(k)));
    return distinct.size();
  };
  auto refine = [&](Colors& colors) {
    std::size_t classes = 0;
    while (true) {
      std::map<std::string, std::pair<int, std::string>> keys;
      for (const auto& label : dummy_labels) {
        Term r = rename_labels(t, [&](const std::string& l) {
          if (l == label) return std::string("*");
          auto it = colors.find(l);
          return it == colors.end() ? l : "#" + std::to_string(it->second);
        });
        r.coeff = Coeff(1);
        normalize(r, marked);
        keys[label] = {colors.at(label), render_term(r, marked)};
      }
      const std::size_t n = rerank(colors, keys);
      if (n == classes) return;
      classes = n;
    }
  };
  auto enumerate = [&](const Colors& colors) {
    std::map<int, std::vector<std::string>> classes;
    for (const auto& l : dummy_labels) classes[colors.at(l)].push_back(l);
    std::vector<std::vector<std::string>> perms;
    for (auto& [c, labels] : classes) {
      std::sort(labels.begin(), labels.end());
      perms.push_back(labels);
    }
    while (true) {
      std::map<std::string, std::string> mapping;
      std::map<Alphabet, std::size_t> used;
      for (const auto& cls : perms)
        for (const auto& l : cls) {
          const Alphabet a = alphabet_of(t, l);
          mapping[l] = targets[a][used[a]++];
        }
      try_mapping(mapping);
      if (vanishes) return;
      std::size_t g = 0;
      for (; g < perms.size(); ++g)
        if (std::next_permutation(perms[g].begin(), perms[g].end())) break;
      if (g == perms.size()) return;
    }
  };
  std::function<void(Colors)> search = [&](Colors colors) {
    refine(colors);
    std::map<int, std::vector<std::string>> classes;
    for (const auto& l : dummy_labels) classes[colors.at(l)].push_back(l);
    std::size_t combos = 1;
    const std::vector<std::string>* split = nullptr;
    for (const auto& [c, labels] : classes) {
      for (std::size_t k = 2; k <= labels.size() && combos <= kMaxRelabelings; ++k) combos *= k;
      if (!split && labels.size() > 1) split = &labels;
    }
    if (combos <= kMaxRelabelings) {
      enumerate(colors);
      return;
    }
    for (const auto& x : *split) {
      std::map<std::string, std::pair<int, std::string>> keys;
      for (const auto& [l, c] : colors) keys[l] = {2 * c + (l == x ? 0 : 1), ""};
      Colors next = colors;
      rerank(next, keys);
      search(next);
      if (vanishes) return;
    }
  };
  Colors initial;
  for (const auto& l : dummy_labels) initial[l] = 0;
  {
    std::map<std::string, std::pair<int, std::string>> keys;
    for (auto& [alpha, labels] : dummies)
      for (const auto& l : labels) keys[l] = {static_cast<int>(alpha), ""};
    rerank(initial, keys);
  }
  search(initial);
  if (vanishes || !best) return std::nullopt;

  // frame dummies: first occurrence upper, second lower
  std::set<std::string> seen;
  for_each_index(best->term, [&](Index& i) {
    if (i.alphabet != Alphabet::Frame || !frame_targets.count(i.label)) return;
    i.variance = seen.insert(i.label).second ? Variance::Upper : Variance::Lower;
  });
  return best;
}

int fermion_shape(const Term& t) {
  if (!t.fermion) return 0;
  return 1 + (t.fermion->has_bar ? 1 : 0) + (t.fermion->has_psi ? 2 : 0);
}

std::vector<std::string> free_signature(const Term& t) {
  std::vector<std::string> sig;
  for (const auto& i : free_indices(t))
    sig.push_back(std::to_string(static_cast<int>(i.alphabet)) + render_index(i, {}));
  std::sort(sig.begin(), sig.end());
  return sig;
}

}  // namespace

Expr canonicalize(const Expr& e) {
  std::map<std::string, Term> collected;
  std::optional<std::vector<std::string>> signature;
  std::optional<int> shape;
  for (const auto& t : e.terms()) {
    auto c = canonical_term(t);
    if (!c) continue;
    auto sig = free_signature(c->term);
    if (!signature) {
      signature = sig;
    } else if (*signature != sig) {
      throw MalformedIndex("terms of a sum carry different free indices: " + render(c->term));
    }
    const int sh = fermion_shape(c->term);
    if (!shape) {
      shape = sh;
    } else if (*shape != sh) {
      throw StructureError("terms of a sum have different spinor structure: " + render(c->term));
    }
    auto [it, inserted] = collected.try_emplace(c->key, c->term);
    if (!inserted) it->second.coeff += c->term.coeff;
  }
  std::vector<Term> out;
  for (auto& [key, term] : collected)
    if (!term.coeff.is_zero()) out.push_back(std::move(term));
  return Expr::from_terms(std::move(out));
}

bool equal(const Expr& a, const Expr& b) { return render(canonicalize(a)) == render(canonicalize(b)); }

// ---- substitution ---------------------------------------------------------

namespace {

std::multiset<std::string> label_set(const std::vector<Index>& v) {
  std::multiset<std::string> s;
  for (const auto& i : v) s.insert(i.label);
  return s;
}

void check_replacement(const Expr& rep, const Factor& atom) {
  std::vector<Index> slots = atom.indices;
  slots.insert(slots.end(), atom.derivs.begin(), atom.derivs.end());
  std::multiset<std::string> want = label_set(slots);
  for (const auto& i : slots)  // contracted within the atom itself
    if (want.count(i.label) > 1) want.erase(i.label);
  for (const auto& t : rep.terms())
    if (label_set(free_indices(t)) != want)
      throw IndexClash("replacement for " + render(atom) + " has free indices differing from the atom: " +
                       render(t));
}

}  // namespace

Expr map_atoms(const Expr& e, const AtomMap& fn) {
  Expr result;
  for (const auto& t : e.terms()) {
    std::set<std::string> used = labels_of(t);
    auto replace = [&](const Factor& f) {
      auto r = fn(f);
      if (!r) return atom_expr(f);
      check_replacement(*r, f);
      return freshen_dummies(*r, used);
    };
    Expr acc = Expr::constant(t.coeff);
    for (const auto& f : t.factors) acc = acc * replace(f);
    if (t.fermion) {
      const auto& fp = *t.fermion;
      if (fp.has_bar) {
        Factor bar;
        bar.kind = AtomKind::FermionBar;
        bar.derivs = fp.bar_derivs;
        acc = acc * replace(bar);
      }
      acc = acc * chain_expr(fp.chain);
      if (fp.has_psi) {
        Factor p;
        p.kind = AtomKind::Fermion;
        p.derivs = fp.psi_derivs;
        acc = acc * replace(p);
      }
    }
    result += acc;
  }
  return result;
}

Expr substitute(const Expr& e, const AtomMap& rule) {
  auto lifted = [&](const Factor& f) -> std::optional<Expr> {
    if (f.kind == AtomKind::Coupling || f.kind == AtomKind::LambdaPower) return rule(f);
    Factor base = f;
    base.derivs.clear();
    base.exponent = 1;
    auto r = rule(base);
    if (!r) return std::nullopt;
    check_replacement(*r, base);
    std::set<std::string> used;
    for (const auto& i : f.indices) used.insert(i.label);
    for (const auto& i : f.derivs) used.insert(i.label);
    Expr rep = freshen_dummies(*r, used);
    if (f.exponent != 1) {
      if (f.exponent.denominator() != 1 || f.exponent < 0)
        throw StructureError("cannot substitute into a non-integer power of " + render(base));
      rep = power(rep, static_cast<int>(f.exponent.numerator()));
    }
    for (auto it = f.derivs.rbegin(); it != f.derivs.rend(); ++it) rep = partial(*it, rep);
    return rep;
  };
  return canonicalize(map_atoms(e, lifted));
}

Expr set_coupling_zero(const Expr& e, std::string_view name) {
  std::vector<Term> out;
  for (const auto& t : e.terms()) {
    Rational power{0};
    for (const auto& f : t.factors)
      if (f.kind == AtomKind::Coupling && f.tag == name) power += f.exponent;
    if (power < 0) throw Error("coupling " + std::string(name) + " appears with a negative power");
    if (power == 0) out.push_back(t);
  }
  return Expr::from_terms(std::move(out));
}

}  // namespace weylcheck
