#include "weylcheck/numeric.hpp"

#include "weylcheck/clifford.hpp"
#include "weylcheck/gauge.hpp"
#include "weylcheck/scale.hpp"
#include "weylcheck/tensor_algebra.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace weylcheck {

namespace {

constexpr std::array<double, 4> kEta{1.0, -1.0, -1.0, -1.0};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

RealJet random_jet(std::mt19937_64& rng) {
  RealJet j(uniform(rng, -1, 1));
  for (int i = 0; i < 4; ++i) j.d[i] = uniform(rng, -1, 1);
  for (int i = 0; i < 4; ++i)
    for (int k = i; k < 4; ++k) j.h[i][k] = j.h[k][i] = uniform(rng, -1, 1);
  return j;
}

ComplexJet complexify(const RealJet& r, const RealJet& i = RealJet{}) {
  ComplexJet c({r.v, i.v});
  for (int a = 0; a < 4; ++a) {
    c.d[a] = {r.d[a], i.d[a]};
    for (int b = 0; b < 4; ++b) c.h[a][b] = {r.h[a][b], i.h[a][b]};
  }
  return c;
}

ComplexJet random_spinor_component(std::mt19937_64& rng) {
  const RealJet re = random_jet(rng);
  const RealJet im = random_jet(rng);
  return complexify(re, im);
}

void sample_fields(Assignment& a, std::mt19937_64& rng) {
  a.phi = random_jet(rng);
  for (auto& x : a.A) x = random_jet(rng);
  for (auto& x : a.S) x = random_jet(rng);
  for (auto& row : a.W)
    for (auto& x : row) x = random_jet(rng);
  for (const char* tag : {"", "1", "2"}) a.ell[tag] = random_jet(rng);
  for (const char* c : {"lambda", "f", "e", "gc"}) a.couplings[c] = uniform(rng, 0.5, 1.5);
  for (auto& x : a.psi) x = random_spinor_component(rng);
  for (auto& x : a.psibar) x = random_spinor_component(rng);
}

using Mat = std::array<std::array<cplx, 4>, 4>;

Mat matmul(const Mat& x, const Mat& y) {
  Mat r{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) r[i][j] += x[i][k] * y[k][j];
  return r;
}

Mat identity_matrix() {
  Mat m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

int permutation_parity(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

// Clifford element with concrete upper-index values.
Mat clifford_matrix(CliffordKind kind, const std::vector<int>& v) {
  const auto& G = dirac_gammas();
  switch (kind) {
    case CliffordKind::Gamma: return G[v[0]];
    case CliffordKind::Sigma: {
      Mat ab = matmul(G[v[0]], G[v[1]]);
      Mat ba = matmul(G[v[1]], G[v[0]]);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ab[i][j] = (ab[i][j] - ba[i][j]) / 4.0;
      return ab;
    }
    case CliffordKind::GammaProduct: {
      std::vector<int> p(v.size());
      std::iota(p.begin(), p.end(), 0);
      Mat sum{};
      double count = 0;
      do {
        Mat m = identity_matrix();
        for (int k : p) m = matmul(m, G[v[k]]);
        const double s = permutation_parity(p);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) sum[i][j] += s * m[i][j];
        count += 1;
      } while (std::next_permutation(p.begin(), p.end()));
      for (auto& row : sum)
        for (auto& x : row) x /= count;
      return sum;
    }
  }
  return identity_matrix();
}

// ---- dense tables and contraction -----------------------------------------

struct Table {
  std::vector<std::string> labels;
  std::vector<cplx> data;  // row-major, last label fastest
};

using DimMap = std::map<std::string, int>;

int dim_of(Alphabet a) { return alphabet_range(a); }

// Fills a table over the distinct labels of `slots`; `fn` receives the value
// of every slot in order.
template <typename Fn>
Table build(const std::vector<std::string>& slots, DimMap& dims, Fn&& fn) {
  Table t;
  std::vector<int> pos(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    auto it = std::find(t.labels.begin(), t.labels.end(), slots[s]);
    pos[s] = static_cast<int>(it - t.labels.begin());
    if (it == t.labels.end()) t.labels.push_back(slots[s]);
  }
  std::vector<int> val(t.labels.size(), 0);
  std::vector<int> slot_val(slots.size());
  std::size_t total = 1;
  for (const auto& l : t.labels) total *= static_cast<std::size_t>(dims.at(l));
  t.data.reserve(total);
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t s = 0; s < slots.size(); ++s) slot_val[s] = val[pos[s]];
    t.data.push_back(fn(slot_val));
    for (int k = static_cast<int>(val.size()) - 1; k >= 0; --k) {
      if (++val[k] < dims.at(t.labels[k])) break;
      val[k] = 0;
    }
  }
  return t;
}

// Sum over every label not in `out` of the product of `tables`, as a table
// over `out` in the given order.
Table combine(const std::vector<const Table*>& tables, const std::vector<std::string>& out, const DimMap& dims) {
  std::vector<std::string> all = out;
  for (const auto* t : tables)
    for (const auto& l : t->labels)
      if (std::find(all.begin(), all.end(), l) == all.end()) all.push_back(l);
  auto strides_for = [&](const std::vector<std::string>& labels) {
    std::vector<std::size_t> stride(all.size(), 0);
    std::size_t s = 1;
    for (int k = static_cast<int>(labels.size()) - 1; k >= 0; --k) {
      const auto p = static_cast<std::size_t>(std::find(all.begin(), all.end(), labels[k]) - all.begin());
      stride[p] = s;
      s *= static_cast<std::size_t>(dims.at(labels[k]));
    }
    return std::pair{stride, s};
  };
  std::vector<std::vector<std::size_t>> strides;
  for (const auto* t : tables) strides.push_back(strides_for(t->labels).first);
  auto [out_stride, out_size] = strides_for(out);
  Table r;
  r.labels = out;
  r.data.assign(out_size, 0.0);
  std::size_t total = 1;
  for (const auto& l : all) total *= static_cast<std::size_t>(dims.at(l));
  std::vector<int> val(all.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    cplx prod = 1.0;
    for (std::size_t t = 0; t < tables.size() && prod != 0.0; ++t) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < all.size(); ++k) off += strides[t][k] * static_cast<std::size_t>(val[k]);
      prod *= tables[t]->data[off];
    }
    if (prod != 0.0) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < all.size(); ++k) off += out_stride[k] * static_cast<std::size_t>(val[k]);
      r.data[off] += prod;
    }
    for (int k = static_cast<int>(val.size()) - 1; k >= 0; --k) {
      if (++val[k] < dims.at(all[k])) break;
      val[k] = 0;
    }
  }
  return r;
}

// Variable elimination: repeatedly sum out the internal label whose merged
// table is smallest.
Table contract(std::vector<Table> tables, const std::vector<std::string>& keep, const DimMap& dims) {
  const std::set<std::string> kept(keep.begin(), keep.end());
  while (true) {
    std::set<std::string> internal;
    for (const auto& t : tables)
      for (const auto& l : t.labels)
        if (!kept.count(l)) internal.insert(l);
    if (internal.empty()) break;
    std::string best;
    double best_cost = 0;
    for (const auto& l : internal) {
      std::set<std::string> uni;
      for (const auto& t : tables)
        if (std::find(t.labels.begin(), t.labels.end(), l) != t.labels.end())
          uni.insert(t.labels.begin(), t.labels.end());
      double cost = 1;
      for (const auto& u : uni) cost *= dims.at(u);
      if (best.empty() || cost < best_cost) {
        best = l;
        best_cost = cost;
      }
    }
    std::vector<const Table*> with;
    std::vector<Table> rest;
    std::vector<std::string> out;
    for (const auto& t : tables) {
      if (std::find(t.labels.begin(), t.labels.end(), best) != t.labels.end()) {
        with.push_back(&t);
        for (const auto& l : t.labels)
          if (l != best && std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
      }
    }
    Table merged = combine(with, out, dims);
    for (const auto& t : tables)
      if (std::find(t.labels.begin(), t.labels.end(), best) == t.labels.end()) rest.push_back(t);
    rest.push_back(std::move(merged));
    tables = std::move(rest);
  }
  std::vector<const Table*> ptrs;
  for (const auto& t : tables) ptrs.push_back(&t);
  return combine(ptrs, keep, dims);
}

// ---- per-atom values ------------------------------------------------------

RealJet field_jet(const Factor& f, const std::vector<int>& v, const Assignment& a) {
  switch (f.kind) {
    case AtomKind::LambdaPower: {
      auto it = a.ell.find(f.tag);
      if (it == a.ell.end()) throw UnboundIndex("no sampled scale parameter '" + f.tag + "'");
      return exp(f.exponent.to_double() * it->second);
    }
    case AtomKind::DetFactor: return a.sqrtg;
    case AtomKind::Metric: return a.g[v[0]][v[1]];
    case AtomKind::InverseMetric: return a.ginv[v[0]][v[1]];
    case AtomKind::MinkowskiMetric: return RealJet(v[0] == v[1] ? kEta[v[0]] : 0.0);
    case AtomKind::Kronecker: return RealJet(v[0] == v[1] ? 1.0 : 0.0);
    case AtomKind::StructureConst: {
      const int i = v[0], j = v[1], k = v[2];
      if (i == j || j == k || i == k) return RealJet(0.0);
      return RealJet(((j - i + 3) % 3 == 1) ? 1.0 : -1.0);
    }
    case AtomKind::Tetrad: return a.tetrad[v[0]][v[1]];
    case AtomKind::InverseTetrad: return a.tetrad_inv[v[0]][v[1]];
    case AtomKind::Scalar: return a.phi;
    case AtomKind::EMVector: return a.A[v[0]];
    case AtomKind::YMVector: return a.W[v[0]][v[1]];
    case AtomKind::WeylVector: return a.S[v[0]];
    case AtomKind::LogDerivative: {
      auto it = a.ell.find(f.tag);
      if (it == a.ell.end()) throw UnboundIndex("no sampled scale parameter '" + f.tag + "'");
      return it->second.derivative(v[0]);
    }
    default: break;
  }
  throw UnboundIndex("no numeric value for " + render(f));
}

template <typename T>
T component(const Jet<T>& j, const std::vector<int>& dirs) {
  if (dirs.size() > 2) throw UnboundIndex("derivative order above two is not sampled");
  return j.component(static_cast<int>(dirs.size()), dirs.data());
}

double frame_sign(std::span<const SlotSpec> spec, const std::vector<Index>& idx, const std::vector<int>& v) {
  double s = 1.0;
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (spec[k].alphabet == Alphabet::Frame && idx[k].variance != spec[k].native) s *= kEta[v[k]];
  return s;
}

Table factor_table(const Factor& f, const Assignment& a, DimMap& dims) {
  std::vector<std::string> slots;
  for (const auto& i : f.indices) {
    slots.push_back(i.label);
    dims[i.label] = dim_of(i.alphabet);
  }
  for (const auto& i : f.derivs) {
    slots.push_back(i.label);
    dims[i.label] = 4;
  }
  const std::size_t k = f.indices.size();
  const auto spec = slots_of(f.kind);
  return build(slots, dims, [&](const std::vector<int>& val) -> cplx {
    const std::vector<int> v(val.begin(), val.begin() + static_cast<long>(k));
    const std::vector<int> dirs(val.begin() + static_cast<long>(k), val.end());
    if (f.kind == AtomKind::Coupling) {
      auto it = a.couplings.find(f.tag);
      if (it == a.couplings.end()) throw UnboundIndex("no sampled value for coupling '" + f.tag + "'");
      if (!dirs.empty()) return 0.0;
      return std::pow(it->second, f.exponent.to_double());
    }
    RealJet j = field_jet(f, v, a);
    if (f.exponent != 1 && f.kind != AtomKind::LambdaPower) j = pow(j, f.exponent.to_double());
    return component(j, dirs) * frame_sign(spec, f.indices, v);
  });
}

Table clifford_table(const CliffordFactor& c, const std::string& in, const std::string& out, DimMap& dims) {
  std::vector<std::string> slots;
  for (const auto& i : c.indices) {
    slots.push_back(i.label);
    dims[i.label] = 4;
  }
  slots.push_back(in);
  slots.push_back(out);
  const std::size_t k = c.indices.size();
  std::vector<int> cached_key;
  Mat cached{};
  return build(slots, dims, [&](const std::vector<int>& val) -> cplx {
    const std::vector<int> v(val.begin(), val.begin() + static_cast<long>(k));
    if (v != cached_key || cached_key.empty()) {
      cached_key = v;
      cached = clifford_matrix(c.kind, v);
      double s = 1.0;
      for (std::size_t n = 0; n < k; ++n)
        if (c.indices[n].variance == Variance::Lower) s *= kEta[v[n]];
      for (auto& row : cached)
        for (auto& x : row) x *= s;
    }
    return cached[val[k]][val[k + 1]];
  });
}

Table spinor_table(const std::array<ComplexJet, 4>& comps, const std::vector<Index>& derivs,
                   const std::string& label, DimMap& dims) {
  std::vector<std::string> slots;
  for (const auto& i : derivs) {
    slots.push_back(i.label);
    dims[i.label] = 4;
  }
  slots.push_back(label);
  return build(slots, dims, [&](const std::vector<int>& val) -> cplx {
    const std::vector<int> dirs(val.begin(), val.end() - 1);
    return component(comps[val.back()], dirs);
  });
}

}  // namespace

// ---- assignments ----------------------------------------------------------

void Assignment::derive() {
  if (determinant(tetrad).v == 0.0) throw SingularAssignment("singular tetrad");
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      RealJet s;
      for (int a = 0; a < 4; ++a) s += kEta[a] * (tetrad[a][m] * tetrad[a][n]);
      g[m][n] = s;
    }
  ginv = inverse(g);
  const auto einv = inverse(tetrad);  // [mu][a]
  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) tetrad_inv[a][m] = einv[m][a];
  sqrtg = sqrt(-determinant(g));
}

Assignment sample_assignment(std::mt19937_64& rng) {
  Assignment a;
  while (true) {
    for (auto& row : a.tetrad)
      for (auto& x : row) x = random_jet(rng);
    if (std::abs(determinant(a.tetrad).v) < 0.1) continue;
    a.derive();
    break;
  }
  sample_fields(a, rng);
  return a;
}

Assignment flat_assignment(std::mt19937_64& rng) {
  Assignment a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a.tetrad[i][j] = RealJet(i == j ? 1.0 : 0.0);
  a.derive();
  sample_fields(a, rng);
  return a;
}

double lambda_value(const Assignment& a, const std::string& tag) {
  auto it = a.ell.find(tag);
  if (it == a.ell.end()) throw UnboundIndex("no sampled scale parameter '" + tag + "'");
  return std::exp(it->second.v);
}

Assignment rescaled(const Assignment& a, Rescale mode, const std::string& tag) {
  auto it = a.ell.find(tag);
  if (it == a.ell.end()) throw UnboundIndex("no sampled scale parameter '" + tag + "'");
  const RealJet l = mode == Rescale::Global ? RealJet(it->second.v) : it->second;
  const RealJet lam = exp(l);
  const RealJet inv = exp(-l);
  const ComplexJet spin = complexify(exp(-1.5 * l));
  Assignment r = a;
  for (int i = 0; i < 4; ++i)
    for (int m = 0; m < 4; ++m) r.tetrad[i][m] = lam * a.tetrad[i][m];
  r.phi = inv * a.phi;
  const double f = a.couplings.at("f");
  for (int m = 0; m < 4; ++m) r.S[m] = a.S[m] - (1.0 / f) * l.derivative(m);
  for (int s = 0; s < 4; ++s) {
    r.psi[s] = spin * a.psi[s];
    r.psibar[s] = spin * a.psibar[s];
  }
  r.derive();
  return r;
}

const std::array<Mat, 4>& dirac_gammas() {
  static const std::array<Mat, 4> g = [] {
    const cplx I(0, 1);
    const std::array<std::array<std::array<cplx, 2>, 2>, 3> pauli{{
        {{{0, 1}, {1, 0}}},
        {{{0, -I}, {I, 0}}},
        {{{1, 0}, {0, -1}}},
    }};
    std::array<Mat, 4> r{};
    r[0][0][0] = r[0][1][1] = 1.0;
    r[0][2][2] = r[0][3][3] = -1.0;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          r[k + 1][i][j + 2] = pauli[k][i][j];
          r[k + 1][i + 2][j] = -pauli[k][i][j];
        }
    return r;
  }();
  return g;
}

// ---- evaluation -----------------------------------------------------------

Components evaluate(const Term& t, const Assignment& a) {
  DimMap dims;
  std::vector<Table> tables;
  for (const auto& f : t.factors) tables.push_back(factor_table(f, a, dims));

  std::map<std::string, int> counts;
  for (const auto& i : all_indices(t)) ++counts[i.label];
  std::vector<std::string> keep;
  for (const auto& [l, n] : counts)
    if (n == 1) keep.push_back(l);

  if (t.fermion) {
    const auto& fp = *t.fermion;
    std::vector<CliffordFactor> chain = fp.chain;
    const bool identity = chain.empty() && fp.matrix();
    const std::size_t n = identity ? 1 : chain.size();
    std::vector<std::string> spin(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      spin[k] = "$" + std::to_string(k);
      dims[spin[k]] = 4;
    }
    if (n == 0) {
      if (!fp.closed()) spin[0] = "~spin";
    } else {
      if (!fp.has_bar) spin[0] = fp.has_psi ? "~spin" : "~row";
      if (!fp.has_psi) spin[n] = fp.has_bar ? "~spin" : "~col";
    }
    for (const auto& s : spin) dims[s] = 4;
    if (fp.has_bar) tables.push_back(spinor_table(a.psibar, fp.bar_derivs, spin[0], dims));
    if (identity) {
      tables.push_back(build({spin[0], spin[1]}, dims,
                             [](const std::vector<int>& v) -> cplx { return v[0] == v[1] ? 1.0 : 0.0; }));
    }
    for (std::size_t k = 0; k < chain.size(); ++k)
      tables.push_back(clifford_table(chain[k], spin[k], spin[k + 1], dims));
    if (fp.has_psi) tables.push_back(spinor_table(a.psi, fp.psi_derivs, spin[n], dims));
    for (const auto& s : spin)
      if (s.front() == '~') keep.push_back(s);
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  Table r = contract(std::move(tables), keep, dims);
  Components c;
  c.labels = r.labels;
  for (const auto& l : c.labels) c.dims.push_back(dims.at(l));
  const cplx coeff = t.coeff.to_complex();
  for (auto& x : r.data) x *= coeff;
  c.data = std::move(r.data);
  return c;
}

Components evaluate(const Expr& e, const Assignment& a) {
  Components sum;
  sum.data = {0.0};
  bool first = true;
  for (const auto& t : e.terms()) {
    Components c = evaluate(t, a);
    if (first) {
      sum = std::move(c);
      first = false;
      continue;
    }
    if (c.labels != sum.labels) throw MalformedIndex("terms evaluate to arrays over different labels");
    for (std::size_t k = 0; k < c.data.size(); ++k) sum.data[k] += c.data[k];
  }
  return sum;
}

double deviation(const Components& x, const Components& y) {
  auto rel = [](cplx p, cplx q) { return std::abs(p - q) / std::max({1.0, std::abs(p), std::abs(q)}); };
  auto all_zero = [](const Components& c) {
    return c.labels.empty() && std::all_of(c.data.begin(), c.data.end(), [](cplx v) { return v == 0.0; });
  };
  double m = 0;
  if (x.labels != y.labels) {
    const Components* other = nullptr;
    if (all_zero(x)) other = &y;
    if (all_zero(y)) other = &x;
    if (!other) throw MalformedIndex("cannot compare arrays over different labels");
    for (auto v : other->data) m = std::max(m, rel(v, 0.0));
    return m;
  }
  for (std::size_t k = 0; k < x.data.size(); ++k) m = std::max(m, rel(x.data[k], y.data[k]));
  return m;
}

Components scaled(Components c, cplx factor) {
  for (auto& x : c.data) x *= factor;
  return c;
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

double tolerance_for(RuleCheck check) { return check == RuleCheck::FieldFreeIdentity ? 1e-12 : 1e-9; }

OracleOutcome check_rule(const RewriteRule& rule, int trials, std::uint64_t seed) {
  OracleOutcome out;
  out.trials = trials;
  out.tolerance = tolerance_for(rule.check);
  for (int k = 0; k < trials; ++k) {
    auto rng = trial_rng(seed, k);
    const Assignment a = sample_assignment(rng);
    double dev = 0;
    switch (rule.check) {
      case RuleCheck::Identity:
      case RuleCheck::FieldFreeIdentity: dev = deviation(evaluate(rule.lhs, a), evaluate(rule.rhs, a)); break;
      case RuleCheck::LocalTransform:
      case RuleCheck::GlobalTransform: {
        const auto mode = rule.check == RuleCheck::LocalTransform ? Rescale::Local : Rescale::Global;
        dev = deviation(evaluate(rule.lhs, rescaled(a, mode)), evaluate(rule.rhs, a));
        break;
      }
      case RuleCheck::Covariance: {
        const double lam = std::pow(lambda_value(a), rule.weight.to_double());
        dev = deviation(evaluate(rule.rhs, rescaled(a, Rescale::Local)), scaled(evaluate(rule.rhs, a), lam));
        break;
      }
    }
    out.maxdev = std::max(out.maxdev, dev);
  }
  return out;
}

std::vector<RewriteRule> all_rules() {
  std::vector<RewriteRule> all;
  for (auto&& group : {tensor_rules(), clifford_rules(), scale_rules(), gauge_rules()})
    all.insert(all.end(), group.begin(), group.end());
  return all;
}

// ---- random densities -----------------------------------------------------

namespace {

struct Draft {
  std::vector<Factor> factors;
  bool fermion = false;
  std::vector<CliffordFactor> chain;
  std::vector<Index> psi_derivs;
};

Factor draft_factor(AtomKind kind, std::string tag = "") {
  Factor f;
  f.kind = kind;
  f.tag = std::move(tag);
  for (const auto& s : slots_of(kind)) f.indices.push_back({"?", s.alphabet, s.native});
  return f;
}

int pick(std::mt19937_64& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Term random_term(std::mt19937_64& rng, const RandomOptions& o, bool fermion) {
  static const std::vector<AtomKind> pool{
      AtomKind::Scalar,        AtomKind::Scalar,         AtomKind::EMVector, AtomKind::WeylVector,
      AtomKind::YMVector,      AtomKind::Tetrad,         AtomKind::InverseTetrad, AtomKind::Metric,
      AtomKind::InverseMetric, AtomKind::DetFactor,      AtomKind::Coupling, AtomKind::StructureConst};
  static const std::vector<std::string> couplings{"lambda", "f", "e", "gc"};
  Draft d;
  const int n = 1 + pick(rng, o.max_factors);
  for (int k = 0; k < n; ++k) {
    AtomKind kind = pool[static_cast<std::size_t>(pick(rng, static_cast<int>(pool.size())))];
    if (kind == AtomKind::WeylVector && !o.weyl_vector) kind = AtomKind::Scalar;
    Factor f = draft_factor(kind, kind == AtomKind::Coupling ? couplings[static_cast<std::size_t>(pick(rng, 4))] : "");
    if (!is_constant(kind)) {
      const int nd = coin(rng, 0.35) ? 1 + (coin(rng, 0.25) ? 1 : 0) : 0;
      for (int j = 0; j < nd; ++j) f.derivs.push_back(st("?"));
    }
    d.factors.push_back(std::move(f));
  }
  if (fermion) {
    d.fermion = true;
    const int len = pick(rng, 3);
    for (int k = 0; k < len; ++k) {
      if (coin(rng, 0.6)) {
        d.chain.push_back({CliffordKind::Gamma, {up("?")}});
      } else {
        d.chain.push_back({CliffordKind::Sigma, {up("?"), up("?")}});
      }
    }
    if (coin(rng, 0.4)) d.psi_derivs.push_back(st("?"));
  }

  // balance gauge, then frame, then spacetime slots
  auto collect = [&](Alphabet alpha) {
    std::vector<Index*> v;
    for (auto& f : d.factors) {
      for (auto& i : f.indices)
        if (i.alphabet == alpha) v.push_back(&i);
      for (auto& i : f.derivs)
        if (i.alphabet == alpha) v.push_back(&i);
    }
    for (auto& c : d.chain)
      for (auto& i : c.indices)
        if (i.alphabet == alpha) v.push_back(&i);
    for (auto& i : d.psi_derivs)
      if (i.alphabet == alpha) v.push_back(&i);
    return v;
  };
  if (collect(Alphabet::Gauge).size() % 2) d.factors.push_back(draft_factor(AtomKind::YMVector));
  if (collect(Alphabet::Frame).size() % 2) d.factors.push_back(draft_factor(AtomKind::Tetrad));
  {
    auto s = collect(Alphabet::Spacetime);
    if (s.size() % 2) d.factors.push_back(draft_factor(AtomKind::EMVector));
    int lower = 0, upper = 0;
    for (auto* i : collect(Alphabet::Spacetime)) (i->variance == Variance::Lower ? lower : upper)++;
    for (; lower > upper; upper += 2) d.factors.push_back(draft_factor(AtomKind::InverseMetric));
    for (; upper > lower; lower += 2) d.factors.push_back(draft_factor(AtomKind::Metric));
  }

  int counter = 0;
  auto label = [&](const char* base) { return std::string(base) + std::to_string(++counter); };
  {
    std::vector<Index*> lows, ups;
    for (auto* i : collect(Alphabet::Spacetime)) (i->variance == Variance::Lower ? lows : ups).push_back(i);
    std::shuffle(lows.begin(), lows.end(), rng);
    std::shuffle(ups.begin(), ups.end(), rng);
    for (std::size_t k = 0; k < lows.size(); ++k) lows[k]->label = ups[k]->label = label("m");
  }
  {
    auto v = collect(Alphabet::Frame);
    std::shuffle(v.begin(), v.end(), rng);
    for (std::size_t k = 0; k + 1 < v.size(); k += 2) {
      v[k]->label = v[k + 1]->label = label("a");
      v[k]->variance = Variance::Upper;
      v[k + 1]->variance = Variance::Lower;
    }
  }
  {
    auto v = collect(Alphabet::Gauge);
    std::shuffle(v.begin(), v.end(), rng);
    for (std::size_t k = 0; k + 1 < v.size(); k += 2) v[k]->label = v[k + 1]->label = label("i");
  }

  Term t;
  const std::int64_t num = 1 + pick(rng, 3);
  const std::int64_t den = 1 + pick(rng, 3);
  t.coeff = Coeff(Rational(coin(rng, 0.5) ? num : -num, den));
  if (coin(rng, 0.15)) t.coeff = t.coeff * Coeff::imaginary_unit();
  t.factors = std::move(d.factors);
  if (d.fermion) {
    FermionPart fp;
    fp.has_bar = fp.has_psi = true;
    fp.chain = std::move(d.chain);
    fp.psi_derivs = std::move(d.psi_derivs);
    t.fermion = std::move(fp);
  }
  return t;
}

}  // namespace

Expr random_density(std::mt19937_64& rng, const RandomOptions& opts) {
  while (true) {
    const bool fermion = opts.fermions && coin(rng, 0.3);
    std::vector<Term> terms;
    const int n = 1 + pick(rng, opts.max_terms);
    for (int k = 0; k < n; ++k) terms.push_back(random_term(rng, opts, fermion));
    Expr e = Expr::from_terms(std::move(terms));
    if (!canonicalize(e).is_zero()) return e;
  }
}

}  // namespace weylcheck
