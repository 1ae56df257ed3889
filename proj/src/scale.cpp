#include "weylcheck/scale.hpp"

#include "weylcheck/builtins.hpp"
#include "weylcheck/clifford.hpp"
#include "weylcheck/numeric.hpp"
#include "weylcheck/tensor_algebra.hpp"

#include <algorithm>

namespace weylcheck {

const WeightTable& default_weights() {
  static const WeightTable t{
      {AtomKind::Metric, {Rational(2), true}},
      {AtomKind::InverseMetric, {Rational(-2), true}},
      {AtomKind::DetFactor, {Rational(4), true}},
      {AtomKind::Scalar, {Rational(-1), true}},
      {AtomKind::EMVector, {Rational(0), true}},
      {AtomKind::YMVector, {Rational(0), true}},
      {AtomKind::Tetrad, {Rational(1), true}},
      {AtomKind::InverseTetrad, {Rational(-1), true}},
      {AtomKind::Fermion, {Rational(-3, 2), true}},
      {AtomKind::FermionBar, {Rational(-3, 2), true}},
      {AtomKind::WeylVector, {Rational(0), false}},
      {AtomKind::MinkowskiMetric, {Rational(0), true}},
      {AtomKind::StructureConst, {Rational(0), true}},
      {AtomKind::Coupling, {Rational(0), true}},
  };
  return t;
}

namespace {

WeylWeight weight_of(AtomKind kind, const WeightTable& table) {
  auto it = table.find(kind);
  return it == table.end() ? WeylWeight{} : it->second;
}

// s * x - y componentwise.
Components scaled_difference(Components x, double s, const Components& y) {
  if (x.labels != y.labels) throw MalformedIndex("cannot subtract arrays over different labels");
  for (std::size_t k = 0; k < x.data.size(); ++k) x.data[k] = s * x.data[k] - y.data[k];
  return x;
}

}  // namespace

WeightResult infer_weight(const Expr& e, const WeightTable& table, bool strict) {
  WeightResult out;
  bool first = true;
  bool inhomogeneous = false;
  for (const auto& t : e.terms()) {
    Rational w{0};
    for (const auto& f : t.factors) {
      const WeylWeight fw = weight_of(f.kind, table);
      w += fw.value * f.exponent;
      inhomogeneous = inhomogeneous || !fw.homogeneous;
    }
    if (t.fermion && t.fermion->has_bar) w += weight_of(AtomKind::FermionBar, table).value;
    if (t.fermion && t.fermion->has_psi) w += weight_of(AtomKind::Fermion, table).value;
    if (first) {
      out.value = w;
      first = false;
    } else if (w != out.value) {
      out.status = WeightResult::Status::Mixed;
      return out;
    }
  }
  if (strict && inhomogeneous) out.status = WeightResult::Status::Inhomogeneous;
  return out;
}

std::string to_string(const WeightResult& w) {
  switch (w.status) {
    case WeightResult::Status::Mixed: return "mixed";
    case WeightResult::Status::Inhomogeneous: return "inhomogeneous";
    case WeightResult::Status::Homogeneous: break;
  }
  return to_string(w.value);
}

Expr apply_global_scale(const Expr& e, const WeightTable& table) {
  return canonicalize(map_atoms(e, [&](const Factor& f) -> std::optional<Expr> {
    const WeylWeight w = weight_of(f.kind, table);
    if (w.value == 0) return std::nullopt;
    return lambda_power(w.value * f.exponent) * atom_expr(f);
  }));
}

Expr apply_local_scale(const Expr& e, const std::string& tag, const WeightTable& table) {
  return substitute(e, [&](const Factor& f) -> std::optional<Expr> {
    if (f.kind == AtomKind::Coupling || f.kind == AtomKind::LambdaPower) return std::nullopt;
    const WeylWeight w = weight_of(f.kind, table);
    if (!w.homogeneous) {
      // S_mu -> S_mu - D_mu / f
      const Index& mu = f.indices.at(0);
      return atom_expr(f) - coupling("f", Rational(-1)) * log_derivative(mu, tag);
    }
    if (w.value == 0) return std::nullopt;
    return lambda_power(w.value, tag) * atom_expr(f);
  });
}

Expr drop_log_derivatives(const Expr& e, const std::string& tag) {
  return canonicalize(map_atoms(e, [&](const Factor& f) -> std::optional<Expr> {
    if (f.kind == AtomKind::LogDerivative && f.tag == tag) return Expr{};
    return std::nullopt;
  }));
}

VerificationReport check_invariance(const LagrangianDef& L, ScaleMode mode, int trials, std::uint64_t seed) {
  VerificationReport r;
  const bool local = mode == ScaleMode::Local;
  r.claim = L.name;
  r.mode = local ? "local" : "global";
  const Expr density = canonicalize(L.parsed);
  const Expr scaled = local ? apply_local_scale(density) : apply_global_scale(density);
  const Expr raw = lambda_power(Rational(4)) * scaled - density;
  const Expr residual = simplify(raw);
  for (const auto& t : density.terms()) {
    const Expr term(t);
    const Expr x = local ? apply_local_scale(term) : apply_global_scale(term);
    r.trace.push_back({local ? "apply_local_scale" : "apply_global_scale", render(term),
                       render(simplify(lambda_power(Rational(4)) * x))});
  }
  r.trace.push_back({"Lambda^4 L' - L", render(density), render(residual)});
  r.residual = render(residual);
  if (!L.is_scalar()) r.notes.push_back("density has free indices");
  const auto w = infer_weight(density);
  r.notes.push_back("weight " + to_string(w));

  r.oracle.trials = trials;
  r.oracle.seed = seed;
  const auto rescale = local ? Rescale::Local : Rescale::Global;
  for (int k = 0; k < trials; ++k) {
    auto rng = trial_rng(seed, k);
    const Assignment a = sample_assignment(rng);
    const double lam4 = std::pow(lambda_value(a), 4);
    Components direct = scaled_difference(evaluate(density, rescaled(a, rescale)), lam4, evaluate(density, a));
    r.oracle.maxdev = std::max(r.oracle.maxdev, deviation(direct, evaluate(residual, a)));
  }
  r.settle();
  return r;
}

std::vector<RewriteRule> scale_rules() {
  const Index mu = st("mu"), nu = st("nu"), rho = st("rho");
  std::vector<RewriteRule> rules;
  auto global = [&](const std::string& name, const Expr& lhs) {
    rules.push_back({"scale_engine", name, lhs, apply_global_scale(lhs), RuleCheck::GlobalTransform, 0});
  };
  auto local = [&](const std::string& name, const Expr& lhs) {
    rules.push_back({"scale_engine", name, lhs, apply_local_scale(lhs), RuleCheck::LocalTransform, 0});
  };
  global("global g", metric(mu, nu));
  global("global ginv", metric_inv(mu, nu));
  global("global sqrtg", det_factor());
  global("global phi", scalar_field());
  global("global A", em_vector(mu));
  global("global W", ym_vector(gauge("i"), mu));
  global("global eps", tetrad(up("a"), mu));
  global("global epsinv", tetrad_inv(lo("a"), mu));
  global("global Psi", psi());
  global("global Psibar", psibar());
  global("global S", weyl_vector(mu));
  global("global lambda", coupling("lambda"));
  global("global scalar density", scalar_density());
  local("local S", weyl_vector(mu));
  local("local d phi", partial(mu, scalar_field()));
  local("local d g", partial(mu, metric(nu, rho)));
  local("local d eps", partial(mu, tetrad(up("a"), nu)));
  local("local d epsinv", partial(mu, tetrad_inv(lo("a"), nu)));
  local("local d Psi", partial(mu, psi()));
  local("local dd phi", partial(mu, partial(nu, scalar_field())));
  local("local christoffel", christoffel().expansion);
  local("local sqrtg", det_factor());
  local("local gauged scalar density", scalar_gauged_density());
  return rules;
}

}  // namespace weylcheck
