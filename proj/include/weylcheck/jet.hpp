#pragma once

// Second-order jets: value, gradient and Hessian of a function of the four
// coordinates at one point. Arithmetic follows the product and chain rules,
// so derivatives of composite quantities (g from the tetrad, its inverse,
// sqrt(-det g), Lambda^k = exp(k l)) are exact up to rounding.

#include <array>
#include <cmath>
#include <complex>

namespace weylcheck {

template <typename T>
struct Jet {
  static constexpr int N = 4;
  T v{};
  std::array<T, N> d{};
  std::array<std::array<T, N>, N> h{};

  Jet() = default;
  Jet(T value) : v(value) {}  // NOLINT(google-explicit-constructor)

  /// Component for 0, 1 or 2 derivative directions.
  T component(int n, const int* dirs) const {
    if (n == 0) return v;
    if (n == 1) return d[dirs[0]];
    return h[dirs[0]][dirs[1]];
  }

  /// f(v) given f, f' and f'' at v.
  Jet apply(T f0, T f1, T f2) const {
    Jet r(f0);
    for (int i = 0; i < N; ++i) {
      r.d[i] = f1 * d[i];
      for (int j = 0; j < N; ++j) r.h[i][j] = f1 * h[i][j] + f2 * d[i] * d[j];
    }
    return r;
  }

  Jet operator-() const {
    Jet r;
    r.v = -v;
    for (int i = 0; i < N; ++i) {
      r.d[i] = -d[i];
      for (int j = 0; j < N; ++j) r.h[i][j] = -h[i][j];
    }
    return r;
  }
  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) {
      d[i] += o.d[i];
      for (int j = 0; j < N; ++j) h[i][j] += o.h[i][j];
    }
    return *this;
  }
  Jet& operator-=(const Jet& o) { return *this += -o; }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.v * b.v);
    for (int i = 0; i < N; ++i) {
      r.d[i] = a.d[i] * b.v + a.v * b.d[i];
      for (int j = 0; j < N; ++j)
        r.h[i][j] = a.h[i][j] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] + a.v * b.h[i][j];
    }
    return r;
  }
  friend Jet operator*(T s, Jet a) {
    a.v *= s;
    for (int i = 0; i < N; ++i) {
      a.d[i] *= s;
      for (int j = 0; j < N; ++j) a.h[i][j] *= s;
    }
    return a;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

  friend Jet reciprocal(const Jet& a) {
    const T r = T(1) / a.v;
    return a.apply(r, -r * r, T(2) * r * r * r);
  }
  friend Jet exp(const Jet& a) {
    using std::exp;
    const T e = exp(a.v);
    return a.apply(e, e, e);
  }
  friend Jet sqrt(const Jet& a) {
    using std::sqrt;
    const T s = sqrt(a.v);
    return a.apply(s, T(0.5) / s, T(-0.25) / (s * a.v));
  }
  /// a^p for real p; a.v must be positive when p is not an integer.
  friend Jet pow(const Jet& a, double p) {
    using std::pow;
    const T f0 = pow(a.v, p);
    const T f1 = T(p) * pow(a.v, p - 1);
    const T f2 = T(p * (p - 1)) * pow(a.v, p - 2);
    return a.apply(f0, f1, f2);
  }

  /// The jet of d_mu of this function; needs third derivatives, which are
  /// taken to vanish (exact for polynomials of degree two).
  Jet derivative(int mu) const {
    Jet r(d[mu]);
    for (int i = 0; i < N; ++i) r.d[i] = h[mu][i];
    return r;
  }
};

using RealJet = Jet<double>;
using ComplexJet = Jet<std::complex<double>>;

template <typename T>
using JetMatrix = std::array<std::array<Jet<T>, 4>, 4>;

/// Gauss-Jordan inverse with partial pivoting on the values.
template <typename T>
JetMatrix<T> inverse(JetMatrix<T> m) {
  JetMatrix<T> inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = Jet<T>(T(1));
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col].v) > std::abs(m[pivot][col].v)) pivot = r;
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    const Jet<T> p = reciprocal(m[col][col]);
    for (int c = 0; c < 4; ++c) {
      m[col][c] = m[col][c] * p;
      inv[col][c] = inv[col][c] * p;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const Jet<T> factor = m[r][col];
      for (int c = 0; c < 4; ++c) {
        m[r][c] -= factor * m[col][c];
        inv[r][c] -= factor * inv[col][c];
      }
    }
  }
  return inv;
}

/// Determinant by elimination on jets.
template <typename T>
Jet<T> determinant(JetMatrix<T> m) {
  Jet<T> det(T(1));
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col].v) > std::abs(m[pivot][col].v)) pivot = r;
    if (pivot != col) {
      std::swap(m[col], m[pivot]);
      det = -det;
    }
    det = det * m[col][col];
    const Jet<T> p = reciprocal(m[col][col]);
    for (int r = col + 1; r < 4; ++r) {
      const Jet<T> factor = m[r][col] * p;
      for (int c = col; c < 4; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  return det;
}

}  // namespace weylcheck
