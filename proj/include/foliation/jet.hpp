// Forward-mode jets of order two over a swappable scalar type.
//
// Jet2<S> carries value, gradient and symmetric Hessian with respect to up to
// four ambient coordinates. S is double for ordinary evaluation or Dual for
// one extra exact derivative order along a fixed direction (used where an
// outer directional derivative of an assembled quantity is needed).

#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace foliation {

inline constexpr int kMaxDim = 4;
inline constexpr int kHessSize = 10;

// Upper-triangle index for the packed symmetric Hessian, kMaxDim columns.
constexpr int hidx(int i, int j) {
  if (i > j) { const int t = i; i = j; j = t; }
  return i * kMaxDim - i * (i + 1) / 2 + j;
}

// Dual number a + eps*b, eps^2 = 0. b holds a directional derivative.
struct Dual {
  double a = 0.0;
  double b = 0.0;
  Dual() = default;
  Dual(double v) : a(v) {}  // NOLINT: implicit by design, literals promote
  Dual(double v, double d) : a(v), b(d) {}

  Dual& operator+=(const Dual& o) { a += o.a; b += o.b; return *this; }
  Dual& operator-=(const Dual& o) { a -= o.a; b -= o.b; return *this; }
};

inline Dual operator+(Dual x, Dual y) { return {x.a + y.a, x.b + y.b}; }
inline Dual operator-(Dual x, Dual y) { return {x.a - y.a, x.b - y.b}; }
inline Dual operator-(Dual x) { return {-x.a, -x.b}; }
inline Dual operator*(Dual x, Dual y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
inline Dual operator/(Dual x, Dual y) {
  const double inv = 1.0 / y.a;
  return {x.a * inv, (x.b - x.a * y.b * inv) * inv};
}
inline bool operator<(Dual x, Dual y) { return x.a < y.a; }
inline bool operator>(Dual x, Dual y) { return x.a > y.a; }
inline bool operator<=(Dual x, Dual y) { return x.a <= y.a; }
inline bool operator>=(Dual x, Dual y) { return x.a >= y.a; }

inline Dual sin(Dual x) { return {std::sin(x.a), x.b * std::cos(x.a)}; }
inline Dual cos(Dual x) { return {std::cos(x.a), -x.b * std::sin(x.a)}; }
inline Dual tan(Dual x) { const double c = std::cos(x.a); return {std::tan(x.a), x.b / (c * c)}; }
inline Dual sinh(Dual x) { return {std::sinh(x.a), x.b * std::cosh(x.a)}; }
inline Dual cosh(Dual x) { return {std::cosh(x.a), x.b * std::sinh(x.a)}; }
inline Dual tanh(Dual x) { const double c = std::cosh(x.a); return {std::tanh(x.a), x.b / (c * c)}; }
inline Dual exp(Dual x) { const double e = std::exp(x.a); return {e, x.b * e}; }
inline Dual log(Dual x) { return {std::log(x.a), x.b / x.a}; }
inline Dual sqrt(Dual x) { const double r = std::sqrt(x.a); return {r, x.b / (2.0 * r)}; }
inline Dual asin(Dual x) { return {std::asin(x.a), x.b / std::sqrt(1.0 - x.a * x.a)}; }
inline Dual acos(Dual x) { return {std::acos(x.a), -x.b / std::sqrt(1.0 - x.a * x.a)}; }
inline Dual atan(Dual x) { return {std::atan(x.a), x.b / (1.0 + x.a * x.a)}; }
inline Dual atan2(Dual y, Dual x) {
  const double q = x.a * x.a + y.a * y.a;
  return {std::atan2(y.a, x.a), (x.a * y.b - y.a * x.b) / q};
}
inline Dual pow(Dual x, double p) {
  return {std::pow(x.a, p), x.b * p * std::pow(x.a, p - 1.0)};
}
inline Dual abs(Dual x) { return x.a < 0.0 ? Dual{-x.a, -x.b} : x; }

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.a; }
inline double deriv_of(double) { return 0.0; }
inline double deriv_of(Dual x) { return x.b; }

template <class S>
struct Jet2 {
  int dim = 0;
  S v{};
  std::array<S, kMaxDim> g{};
  std::array<S, kHessSize> h{};

  S hess(int i, int j) const { return h[hidx(i, j)]; }
};

using Jet2d = Jet2<double>;
using Jet2x = Jet2<Dual>;

template <class S>
Jet2<S> jet_const(S v, int dim) {
  Jet2<S> j;
  j.dim = dim;
  j.v = v;
  return j;
}

template <class S>
Jet2<S> jet_var(S v, int i, int dim) {
  Jet2<S> j = jet_const<S>(v, dim);
  j.g[i] = S(1.0);
  return j;
}

template <class S>
Jet2<S> operator+(const Jet2<S>& x, const Jet2<S>& y) {
  assert(x.dim == y.dim);
  Jet2<S> r = x;
  r.v += y.v;
  for (int i = 0; i < x.dim; ++i) r.g[i] += y.g[i];
  for (int i = 0; i < x.dim; ++i)
    for (int j = i; j < x.dim; ++j) r.h[hidx(i, j)] += y.h[hidx(i, j)];
  return r;
}

template <class S>
Jet2<S> operator-(const Jet2<S>& x, const Jet2<S>& y) {
  assert(x.dim == y.dim);
  Jet2<S> r = x;
  r.v -= y.v;
  for (int i = 0; i < x.dim; ++i) r.g[i] -= y.g[i];
  for (int i = 0; i < x.dim; ++i)
    for (int j = i; j < x.dim; ++j) r.h[hidx(i, j)] -= y.h[hidx(i, j)];
  return r;
}

template <class S>
Jet2<S> operator-(const Jet2<S>& x) {
  Jet2<S> r = x;
  r.v = -r.v;
  for (int i = 0; i < x.dim; ++i) r.g[i] = -r.g[i];
  for (int i = 0; i < x.dim; ++i)
    for (int j = i; j < x.dim; ++j) r.h[hidx(i, j)] = -r.h[hidx(i, j)];
  return r;
}

template <class S>
Jet2<S> operator*(const Jet2<S>& x, const Jet2<S>& y) {
  assert(x.dim == y.dim);
  Jet2<S> r;
  r.dim = x.dim;
  r.v = x.v * y.v;
  for (int i = 0; i < x.dim; ++i) r.g[i] = x.g[i] * y.v + x.v * y.g[i];
  for (int i = 0; i < x.dim; ++i)
    for (int j = i; j < x.dim; ++j)
      r.h[hidx(i, j)] = x.h[hidx(i, j)] * y.v + x.v * y.h[hidx(i, j)] +
                        x.g[i] * y.g[j] + x.g[j] * y.g[i];
  return r;
}

// Composition with a scalar function given by value and first two derivatives
// at x.v: chain rule to order two.
template <class S>
Jet2<S> jet_chain(const Jet2<S>& x, S f0, S f1, S f2) {
  Jet2<S> r;
  r.dim = x.dim;
  r.v = f0;
  for (int i = 0; i < x.dim; ++i) r.g[i] = f1 * x.g[i];
  for (int i = 0; i < x.dim; ++i)
    for (int j = i; j < x.dim; ++j)
      r.h[hidx(i, j)] = f1 * x.h[hidx(i, j)] + f2 * x.g[i] * x.g[j];
  return r;
}

template <class S>
Jet2<S> inv(const Jet2<S>& x) {
  const S iv = S(1.0) / x.v;
  return jet_chain(x, iv, -iv * iv, S(2.0) * iv * iv * iv);
}

template <class S>
Jet2<S> operator/(const Jet2<S>& x, const Jet2<S>& y) { return x * inv(y); }

// Mixed jet/scalar arithmetic. double promotes to S where needed.
template <class S> Jet2<S> operator+(const Jet2<S>& x, S c) { Jet2<S> r = x; r.v += c; return r; }
template <class S> Jet2<S> operator+(S c, const Jet2<S>& x) { return x + c; }
template <class S> Jet2<S> operator-(const Jet2<S>& x, S c) { Jet2<S> r = x; r.v -= c; return r; }
template <class S> Jet2<S> operator-(S c, const Jet2<S>& x) { return (-x) + c; }
template <class S>
Jet2<S> operator*(const Jet2<S>& x, S c) {
  Jet2<S> r = x;
  r.v = r.v * c;
  for (int i = 0; i < x.dim; ++i) r.g[i] = r.g[i] * c;
  for (int i = 0; i < x.dim; ++i)
    for (int j = i; j < x.dim; ++j) r.h[hidx(i, j)] = r.h[hidx(i, j)] * c;
  return r;
}
template <class S> Jet2<S> operator*(S c, const Jet2<S>& x) { return x * c; }
template <class S> Jet2<S> operator/(const Jet2<S>& x, S c) { return x * (S(1.0) / c); }
template <class S> Jet2<S> operator/(S c, const Jet2<S>& x) { return inv(x) * c; }

inline Jet2x operator+(const Jet2x& x, double c) { return x + Dual(c); }
inline Jet2x operator+(double c, const Jet2x& x) { return x + Dual(c); }
inline Jet2x operator-(const Jet2x& x, double c) { return x - Dual(c); }
inline Jet2x operator-(double c, const Jet2x& x) { return Dual(c) - x; }
inline Jet2x operator*(const Jet2x& x, double c) { return x * Dual(c); }
inline Jet2x operator*(double c, const Jet2x& x) { return x * Dual(c); }
inline Jet2x operator/(const Jet2x& x, double c) { return x / Dual(c); }
inline Jet2x operator/(double c, const Jet2x& x) { return Dual(c) / x; }

template <class S> Jet2<S> sin(const Jet2<S>& x) {
  using std::sin; using std::cos;
  const S s = sin(x.v), c = cos(x.v);
  return jet_chain(x, s, c, -s);
}
template <class S> Jet2<S> cos(const Jet2<S>& x) {
  using std::sin; using std::cos;
  const S s = sin(x.v), c = cos(x.v);
  return jet_chain(x, c, -s, -c);
}
template <class S> Jet2<S> tan(const Jet2<S>& x) {
  using std::tan;
  const S t = tan(x.v);
  const S d = S(1.0) + t * t;
  return jet_chain(x, t, d, S(2.0) * t * d);
}
template <class S> Jet2<S> sinh(const Jet2<S>& x) {
  using std::sinh; using std::cosh;
  const S s = sinh(x.v), c = cosh(x.v);
  return jet_chain(x, s, c, s);
}
template <class S> Jet2<S> cosh(const Jet2<S>& x) {
  using std::sinh; using std::cosh;
  const S s = sinh(x.v), c = cosh(x.v);
  return jet_chain(x, c, s, c);
}
template <class S> Jet2<S> tanh(const Jet2<S>& x) {
  using std::tanh;
  const S t = tanh(x.v);
  const S d = S(1.0) - t * t;
  return jet_chain(x, t, d, S(-2.0) * t * d);
}
template <class S> Jet2<S> exp(const Jet2<S>& x) {
  using std::exp;
  const S e = exp(x.v);
  return jet_chain(x, e, e, e);
}
template <class S> Jet2<S> log(const Jet2<S>& x) {
  using std::log;
  const S iv = S(1.0) / x.v;
  return jet_chain(x, log(x.v), iv, -iv * iv);
}
template <class S> Jet2<S> sqrt(const Jet2<S>& x) {
  using std::sqrt;
  const S r = sqrt(x.v);
  const S d = S(0.5) / r;
  return jet_chain(x, r, d, S(-0.5) * d / x.v);
}
template <class S> Jet2<S> asin(const Jet2<S>& x) {
  using std::asin; using std::sqrt;
  const S w = S(1.0) - x.v * x.v;
  const S d = S(1.0) / sqrt(w);
  return jet_chain(x, asin(x.v), d, x.v * d / w);
}
template <class S> Jet2<S> acos(const Jet2<S>& x) {
  using std::acos; using std::sqrt;
  const S w = S(1.0) - x.v * x.v;
  const S d = S(-1.0) / sqrt(w);
  return jet_chain(x, acos(x.v), d, x.v * d / w);
}
template <class S> Jet2<S> atan(const Jet2<S>& x) {
  using std::atan;
  const S w = S(1.0) + x.v * x.v;
  const S d = S(1.0) / w;
  return jet_chain(x, atan(x.v), d, S(-2.0) * x.v * d * d);
}

// Integer power, valid for any base sign.
template <class S>
Jet2<S> ipow(const Jet2<S>& x, int n) {
  if (n == 0) return jet_const(S(1.0), x.dim);
  if (n < 0) return inv(ipow(x, -n));
  Jet2<S> r = x;
  for (int k = 1; k < n; ++k) r = r * x;
  return r;
}

// Real power via exp(p log x); requires positive base.
template <class S>
Jet2<S> pow(const Jet2<S>& x, double p) {
  using std::pow;
  const S f0 = pow(x.v, p);
  const S f1 = S(p) * pow(x.v, p - 1.0);
  const S f2 = S(p) * S(p - 1.0) * pow(x.v, p - 2.0);
  return jet_chain(x, f0, f1, f2);
}

template <class S>
Jet2<S> atan2(const Jet2<S>& y, const Jet2<S>& x) {
  using std::atan2;
  // d atan2 = (x dy - y dx) / (x^2 + y^2); assembled via jet arithmetic on
  // the quotient field with the branch-correct value spliced in.
  Jet2<S> r = atan(y / x);
  r.v = atan2(y.v, x.v);
  return r;
}

using Seeds = std::array<Jet2d, kMaxDim>;
using SeedsX = std::array<Jet2x, kMaxDim>;

inline Seeds seed_point(const std::array<double, kMaxDim>& x, int dim) {
  Seeds s{};
  for (int i = 0; i < dim; ++i) s[i] = jet_var(x[i], i, dim);
  return s;
}

// Seeds whose dual slots carry the fixed direction v: evaluating any field on
// them yields that field's exact directional derivative along v in .v.b.
inline SeedsX seed_point_dir(const std::array<double, kMaxDim>& x,
                             const std::array<double, kMaxDim>& v, int dim) {
  SeedsX s{};
  for (int i = 0; i < dim; ++i) s[i] = jet_var(Dual(x[i], v[i]), i, dim);
  return s;
}

}  // namespace foliation
