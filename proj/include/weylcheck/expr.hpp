#pragma once

// Symbolic expression core: indices, atoms, terms and the canonical form.
//
// An Expr is kept fully expanded as a sum of terms. Each term is a Gaussian
// rational coefficient, a list of commuting factors and at most one fermion
// part (Psibar . Clifford chain . Psi, or a bare Clifford chain for
// matrix-valued expressions). Partial derivatives are distributed with the
// Leibniz rule as soon as they are applied, so a derivative only ever sits on
// a single atom.

#include "weylcheck/errors.hpp"
#include "weylcheck/rational.hpp"

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace weylcheck {

/// Spacetime dimension, also the size of the local frame.
inline constexpr int kDimension = 4;
/// Adjoint dimension of the gauge group used for numeric evaluation (SU(2)).
inline constexpr int kGaugeDimension = 3;

enum class Alphabet { Spacetime, Frame, Gauge };
enum class Variance { Upper, Lower };

struct Index {
  std::string label;
  Alphabet alphabet = Alphabet::Spacetime;
  Variance variance = Variance::Lower;

  friend bool operator==(const Index&, const Index&) = default;
};

inline Index st(std::string label, Variance v = Variance::Lower) {
  return {std::move(label), Alphabet::Spacetime, v};
}
inline Index up(std::string label) { return {std::move(label), Alphabet::Frame, Variance::Upper}; }
inline Index lo(std::string label) { return {std::move(label), Alphabet::Frame, Variance::Lower}; }
inline Index gauge(std::string label) { return {std::move(label), Alphabet::Gauge, Variance::Upper}; }

int alphabet_range(Alphabet a);

enum class AtomKind {
  Coupling,         // lambda, f, e, gc (tagged)
  LambdaPower,      // Lambda^k, rational k
  DetFactor,        // |g|^{1/2}
  Metric,           // g_{mu nu}
  InverseMetric,    // g^{mu nu}
  MinkowskiMetric,  // eta on frame indices, any variance (also the frame delta)
  Kronecker,        // delta^mu_nu, produced by contraction only
  StructureConst,   // f^{ijk}
  Tetrad,           // eps^a_mu
  InverseTetrad,    // eps_a^mu
  Scalar,           // phi
  EMVector,         // A_mu
  YMVector,         // W^i_mu
  WeylVector,       // S_mu
  LogDerivative,    // D_mu = d_mu ln Lambda (tagged)
  Fermion,          // Psi, only inside a fermion part
  FermionBar,       // Psibar, only inside a fermion part
};

enum class CliffordKind {
  Gamma,         // gamma^a
  Sigma,         // sigma^{ab} = (gamma^a gamma^b - gamma^b gamma^a)/4
  GammaProduct,  // totally antisymmetrized gamma^{[a1...ak]}, k >= 2
};

enum class Symmetry { None, Symmetric, Antisymmetric };

struct SlotSpec {
  Alphabet alphabet;
  Variance native;
};

std::span<const SlotSpec> slots_of(AtomKind kind);
Symmetry symmetry_of(AtomKind kind);
Symmetry symmetry_of(CliffordKind kind);
std::string_view name_of(AtomKind kind);
/// Constants have vanishing partial derivatives.
bool is_constant(AtomKind kind);

struct Factor {
  AtomKind kind = AtomKind::Scalar;
  std::string tag;  // coupling name, or scale-parameter label for Lambda and D
  Rational exponent{1};
  std::vector<Index> indices;
  std::vector<Index> derivs;  // partial derivatives acting on this atom

  friend bool operator==(const Factor&, const Factor&) = default;
};

struct CliffordFactor {
  CliffordKind kind = CliffordKind::Gamma;
  std::vector<Index> indices;

  friend bool operator==(const CliffordFactor&, const CliffordFactor&) = default;
};

/// Noncommutative part of a term. With neither spinor present the chain is a
/// 4x4 matrix (an empty chain is the identity spinor matrix).
struct FermionPart {
  bool has_bar = false;
  std::vector<Index> bar_derivs;
  std::vector<CliffordFactor> chain;
  bool has_psi = false;
  std::vector<Index> psi_derivs;

  bool closed() const { return has_bar && has_psi; }
  bool matrix() const { return !has_bar && !has_psi; }

  friend bool operator==(const FermionPart&, const FermionPart&) = default;
};

struct Term {
  Coeff coeff{1};
  std::vector<Factor> factors;
  std::optional<FermionPart> fermion;
};

class Expr {
 public:
  Expr() = default;  // zero
  explicit Expr(Term t);
  static Expr constant(Coeff c);
  static Expr from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  /// Structurally empty; canonicalize first to decide mathematical zero.
  bool is_zero() const { return terms_.empty(); }

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(const Coeff& c, const Expr& e);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }

 private:
  std::vector<Term> terms_;
};

// ---- builders -------------------------------------------------------------
// Spacetime slot variances are fixed by the atom; the variance carried by the
// Index argument is overwritten. Frame indices keep the variance given.

Expr metric(const Index& mu, const Index& nu);
Expr metric_inv(const Index& mu, const Index& nu);
Expr det_factor();
Expr eta(const Index& a, const Index& b);
Expr kronecker(const Index& upper, const Index& lower);
Expr structure_const(const Index& i, const Index& j, const Index& k);
Expr tetrad(const Index& a, const Index& mu);
Expr tetrad_inv(const Index& a, const Index& mu);
Expr scalar_field();
Expr em_vector(const Index& mu);
Expr ym_vector(const Index& i, const Index& mu);
Expr weyl_vector(const Index& mu);
Expr log_derivative(const Index& mu, std::string tag = "");
Expr lambda_power(Rational k, std::string tag = "");
Expr coupling(std::string name, Rational power = Rational(1));
Expr psi();
Expr psibar();
Expr gamma(const Index& a);
Expr sigma(const Index& a, const Index& b);
Expr gamma_product(std::vector<Index> indices);
Expr identity_spinor();
Expr imaginary_unit();

Expr partial(const Index& mu, const Expr& e);
Expr power(const Expr& e, int n);

/// Single-factor term holding the given atom (with its derivatives).
Expr atom_expr(const Factor& f);
/// Matrix-valued expression holding the given chain (empty: identity).
Expr chain_expr(std::vector<CliffordFactor> chain);

// ---- index bookkeeping ----------------------------------------------------

/// Visits every index slot: factor indices then derivatives, then the fermion
/// part (Psibar derivatives, chain, Psi derivatives).
void visit_indices(Term& t, const std::function<void(Index&)>& fn);
void visit_indices(const Term& t, const std::function<void(const Index&)>& fn);

/// Every index slot of a term in visit order.
std::vector<Index> all_indices(const Term& t);
/// Indices occurring once, in traversal order.
std::vector<Index> free_indices(const Term& t);
/// Free indices of the (first term of the) expression; empty for zero.
std::vector<Index> free_indices(const Expr& e);
std::set<std::string> labels_of(const Term& t);

Term rename_labels(const Term& t, const std::function<std::string(const std::string&)>& fn);
Expr rename_labels(const Expr& e, const std::function<std::string(const std::string&)>& fn);

// ---- canonical form -------------------------------------------------------

/// Expanded, collected and sorted form with dummies renamed to a canonical
/// sequence; idempotent. Throws MalformedIndex or StructureError.
Expr canonicalize(const Expr& e);
bool equal(const Expr& a, const Expr& b);

/// Per-atom rewrite. The callback sees each commuting factor (with its
/// derivatives and exponent) and each fermion end as a Factor of kind Fermion
/// or FermionBar; returning nullopt keeps the atom. Dummy labels inside a
/// replacement are renamed away from the labels of the host term. Throws
/// IndexClash when a replacement's free indices differ from the atom's.
using AtomMap = std::function<std::optional<Expr>(const Factor&)>;
Expr map_atoms(const Expr& e, const AtomMap& fn);

/// Replaces underived atoms: `rule` is called with the atom stripped of its
/// derivatives (exponent 1) and the derivatives are re-applied to the
/// replacement with the Leibniz rule. The result is canonical.
Expr substitute(const Expr& e, const AtomMap& rule);

/// Drops every term containing a positive power of the coupling; throws on
/// negative powers.
Expr set_coupling_zero(const Expr& e, std::string_view name);

// ---- rendering ------------------------------------------------------------

std::string render(const Index& i, bool with_variance = true);
std::string render(const Factor& f);
std::string render(const Term& t);
std::string render(const Expr& e);

/// Every distinct label with its alphabet, for declaration blocks.
std::vector<Index> distinct_labels(const Expr& e);

}  // namespace weylcheck
