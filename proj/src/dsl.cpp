#include "weylcheck/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace weylcheck {

namespace {

struct Token {
  enum Kind { Ident, Number, Symbol, End } kind = End;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t p = 0;
  auto advance = [&] {
    if (src[p] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++p;
  };
  while (p < src.size()) {
    const char c = src[p];
    if (c == '#') {
      while (p < src.size() && src[p] != '\n') advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      t.kind = Token::Ident;
      while (p < src.size() && (std::isalnum(static_cast<unsigned char>(src[p])) || src[p] == '_')) {
        t.text += src[p];
        advance();
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Token::Number;
      while (p < src.size() && std::isdigit(static_cast<unsigned char>(src[p]))) {
        t.text += src[p];
        advance();
      }
    } else if (std::string_view("+-*/^_()[],;").find(c) != std::string_view::npos) {
      t.kind = Token::Symbol;
      t.text = c;
      advance();
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

struct AtomInfo {
  AtomKind kind;
  bool field = true;  // may appear in a `fields` line
};

const std::map<std::string, AtomInfo>& atom_table() {
  static const std::map<std::string, AtomInfo> t{
      {"g", {AtomKind::Metric}},          {"ginv", {AtomKind::InverseMetric}},
      {"sqrtg", {AtomKind::DetFactor}},   {"eta", {AtomKind::MinkowskiMetric}},
      {"fabc", {AtomKind::StructureConst}}, {"eps", {AtomKind::Tetrad}},
      {"epsinv", {AtomKind::InverseTetrad}}, {"phi", {AtomKind::Scalar}},
      {"A", {AtomKind::EMVector}},        {"W", {AtomKind::YMVector}},
      {"S", {AtomKind::WeylVector}},      {"D", {AtomKind::LogDerivative}},
      {"Lambda", {AtomKind::LambdaPower}}, {"Psi", {AtomKind::Fermion}},
      {"Psibar", {AtomKind::FermionBar}},
  };
  return t;
}

const std::set<std::string> kCouplings{"lambda", "f", "e", "gc"};

struct RawIndex {
  std::optional<Variance> marker;
  std::string label;
  Token at;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  LagrangianDef run(const std::string& name) {
    while (peek_ident("indices") || peek_ident("fields")) declaration();
    if (peek().kind == Token::End) fail("empty density");
    Expr e = expression();
    if (peek().kind == Token::Symbol && peek().text == ";") next();
    if (peek().kind != Token::End) fail("unexpected '" + peek().text + "'");
    LagrangianDef def = make_lagrangian(name, canonicalize(e));
    return def;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Alphabet> declared_;
  std::optional<std::set<AtomKind>> fields_;

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  bool peek_ident(const char* w) const { return peek().kind == Token::Ident && peek().text == w; }
  bool peek_symbol(char c) const { return peek().kind == Token::Symbol && peek().text[0] == c; }
  [[noreturn]] void fail(const std::string& what, const Token* at = nullptr) const {
    const Token& t = at ? *at : peek();
    throw ParseError(what, t.line, t.column);
  }
  void expect(char c) {
    if (!peek_symbol(c)) fail(std::string("expected '") + c + "'");
    next();
  }

  void declaration() {
    const Token kw = next();
    if (kw.text == "indices") {
      if (peek().kind != Token::Ident) fail("expected an alphabet name");
      const Token alpha = next();
      Alphabet a;
      if (alpha.text == "spacetime") {
        a = Alphabet::Spacetime;
      } else if (alpha.text == "frame") {
        a = Alphabet::Frame;
      } else if (alpha.text == "gauge") {
        a = Alphabet::Gauge;
      } else {
        fail("unknown alphabet '" + alpha.text + "'", &alpha);
      }
      while (peek().kind == Token::Ident) declared_[next().text] = a;
    } else {
      if (!fields_) fields_.emplace();
      while (peek().kind == Token::Ident) {
        const Token f = next();
        auto it = atom_table().find(f.text);
        if (it == atom_table().end()) fail("unknown field '" + f.text + "'", &f);
        fields_->insert(it->second.kind);
      }
    }
    expect(';');
  }

  void require_declared(AtomKind k, const Token& at) const {
    if (fields_ && !fields_->count(k))
      throw UndeclaredField(std::to_string(at.line) + ":" + std::to_string(at.column) + ": field '" + at.text +
                            "' is not declared");
  }

  Expr expression() {
    bool negate = false;
    if (peek_symbol('+') || peek_symbol('-')) negate = next().text == "-";
    Expr acc = term();
    if (negate) acc = -acc;
    while (peek_symbol('+') || peek_symbol('-')) {
      const bool minus = next().text == "-";
      Expr t = term();
      acc = minus ? acc - t : acc + t;
    }
    return acc;
  }

  Expr term() {
    Expr acc = factor();
    while (peek_symbol('*') || peek_symbol('/')) {
      if (next().text == "/") {
        acc = Coeff(Rational(1) / number_literal()) * acc;
      } else {
        acc = acc * factor();
      }
    }
    return acc;
  }

  Rational number_literal() {
    if (peek().kind != Token::Number) fail("expected a number");
    const Token n = next();
    try {
      return Rational(std::stoll(n.text));
    } catch (const std::exception&) {
      fail("number out of range", &n);
    }
  }

  Rational exponent() {
    if (peek().kind == Token::Number) return number_literal();
    expect('(');
    bool neg = false;
    if (peek_symbol('-')) {
      next();
      neg = true;
    }
    Rational r = number_literal();
    if (peek_symbol('/')) {
      next();
      r = r / number_literal();
    }
    expect(')');
    return neg ? -r : r;
  }

  Expr factor() {
    const Token at = peek();
    Expr base = primary();
    if (!peek_symbol('^')) return base;
    next();
    const Rational k = exponent();
    if (base.terms().size() == 1 && base.terms()[0].factors.size() == 1 && !base.terms()[0].fermion &&
        base.terms()[0].coeff.is_one()) {
      Factor f = base.terms()[0].factors[0];
      if (f.indices.empty() && f.derivs.empty()) {
        f.exponent = f.exponent * k;
        return atom_expr(f);
      }
    }
    if (k.denominator() != 1 || k < 1) fail("only index-free atoms take non-integer or negative powers", &at);
    return power(base, static_cast<int>(k.numerator()));
  }

  std::vector<RawIndex> index_list() {
    expect('[');
    std::vector<RawIndex> out;
    while (true) {
      RawIndex r;
      if (peek_symbol('^') || peek_symbol('_')) r.marker = next().text == "^" ? Variance::Upper : Variance::Lower;
      if (peek().kind != Token::Ident) fail("expected an index label");
      r.at = peek();
      r.label = next().text;
      out.push_back(std::move(r));
      if (peek_symbol(']')) break;
      expect(',');
    }
    expect(']');
    return out;
  }

  Index resolve(const RawIndex& r, Alphabet slot, Variance native) const {
    auto it = declared_.find(r.label);
    if (it != declared_.end() && it->second != slot)
      throw IndexArityMismatch(std::to_string(r.at.line) + ":" + std::to_string(r.at.column) + ": index '" +
                               r.label + "' is declared in another alphabet than its slot");
    Index i{r.label, slot, native};
    if (r.marker) {
      if (slot == Alphabet::Frame) {
        i.variance = *r.marker;
      } else if (*r.marker != native) {
        throw IndexArityMismatch(std::to_string(r.at.line) + ":" + std::to_string(r.at.column) +
                                 ": the variance of index '" + r.label + "' is fixed by its slot");
      }
    }
    return i;
  }

  std::vector<Index> resolve_all(const std::vector<RawIndex>& raw, std::span<const SlotSpec> slots,
                                 const Token& at) const {
    if (raw.size() != slots.size())
      throw IndexArityMismatch(std::to_string(at.line) + ":" + std::to_string(at.column) + ": '" + at.text +
                               "' takes " + std::to_string(slots.size()) + " indices");
    std::vector<Index> out;
    for (std::size_t k = 0; k < raw.size(); ++k) out.push_back(resolve(raw[k], slots[k].alphabet, slots[k].native));
    return out;
  }

  Expr primary() {
    const Token t = peek();
    if (t.kind == Token::Number) {
      Rational r = number_literal();
      if (peek_symbol('/') && toks_[pos_ + 1].kind == Token::Number) {
        next();
        r = r / number_literal();
      }
      return Expr::constant(r);
    }
    if (peek_symbol('(')) {
      next();
      Expr e = expression();
      expect(')');
      return e;
    }
    if (t.kind != Token::Ident) fail("expected a factor");
    next();
    const std::string& w = t.text;
    if (w == "i") return imaginary_unit();
    if (w == "id") return identity_spinor();
    if (w == "d" && peek_symbol('[')) {
      const auto raw = index_list();
      expect('(');
      Expr e = expression();
      expect(')');
      for (const auto& r : raw) e = partial(resolve(r, Alphabet::Spacetime, Variance::Lower), e);
      return e;
    }
    if (kCouplings.count(w)) return coupling(w);
    if (w == "gamma" || w == "sigma" || w == "gammaA") {
      const auto raw = index_list();
      std::vector<Index> idx;
      for (const auto& r : raw) idx.push_back(resolve(r, Alphabet::Frame, Variance::Upper));
      if (w == "gamma" && idx.size() == 1) return gamma(idx[0]);
      if (w == "sigma" && idx.size() == 2) return sigma(idx[0], idx[1]);
      if (w == "gammaA" && idx.size() >= 2) return gamma_product(idx);
      throw IndexArityMismatch(std::to_string(t.line) + ":" + std::to_string(t.column) + ": wrong number of indices for '" + w + "'");
    }
    if (w == "delta") fail("delta is produced by contraction and cannot be written", &t);

    std::string base = w, tag;
    if (w.rfind("Lambda_", 0) == 0) {
      base = "Lambda";
      tag = w.substr(7);
    } else if (w.rfind("D_", 0) == 0) {
      base = "D";
      tag = w.substr(2);
    }
    auto it = atom_table().find(base);
    if (it == atom_table().end())
      throw UndeclaredField(std::to_string(t.line) + ":" + std::to_string(t.column) + ": unknown name '" + w + "'");
    const AtomKind kind = it->second.kind;
    require_declared(kind, t);
    if (kind == AtomKind::Fermion) return psi();
    if (kind == AtomKind::FermionBar) return psibar();
    if (kind == AtomKind::LambdaPower) return lambda_power(Rational(1), tag);
    std::vector<RawIndex> raw;
    if (peek_symbol('[')) raw = index_list();
    Factor f;
    f.kind = kind;
    f.tag = tag;
    f.indices = resolve_all(raw, slots_of(kind), t);
    return atom_expr(f);
  }
};

std::string alphabet_name(Alphabet a) {
  switch (a) {
    case Alphabet::Spacetime: return "spacetime";
    case Alphabet::Frame: return "frame";
    case Alphabet::Gauge: return "gauge";
  }
  return "";
}

std::vector<AtomKind> kinds_in(const Expr& e) {
  std::set<AtomKind> s;
  for (const auto& t : e.terms()) {
    for (const auto& f : t.factors)
      if (f.kind != AtomKind::Coupling && f.kind != AtomKind::Kronecker) s.insert(f.kind);
    if (t.fermion && t.fermion->has_bar) s.insert(AtomKind::FermionBar);
    if (t.fermion && t.fermion->has_psi) s.insert(AtomKind::Fermion);
  }
  return {s.begin(), s.end()};
}

}  // namespace

LagrangianDef parse(const std::string& src, const std::string& name) {
  LagrangianDef def = Parser(tokenize(src)).run(name);
  def.source = src;
  return def;
}

std::string render_source(const Expr& e) {
  std::string out;
  std::map<Alphabet, std::vector<std::string>> by_alpha;
  for (const auto& i : distinct_labels(e)) by_alpha[i.alphabet].push_back(i.label);
  for (const auto& [a, labels] : by_alpha) {
    out += "indices " + alphabet_name(a);
    for (const auto& l : labels) out += " " + l;
    out += ";\n";
  }
  const auto kinds = kinds_in(e);
  if (!kinds.empty()) {
    out += "fields";
    for (auto k : kinds) out += " " + std::string(name_of(k));
    out += ";\n";
  }
  return out + render(e) + "\n";
}

LagrangianDef make_lagrangian(const std::string& name, const Expr& e) {
  LagrangianDef def;
  def.name = name;
  def.parsed = e;
  def.source = render_source(e);
  def.declared_fields = kinds_in(e);
  if (!e.terms().empty()) def.free = free_indices(e.terms().front());
  return def;
}

}  // namespace weylcheck
