// Scalar and vector fields evaluable in second-order jets.
//
// A field is stored as two instantiations of one generic callable: over
// double jets (ordinary evaluation) and over dual-number jets (one extra
// derivative order along a direction chosen at evaluation time).
//
// Derived fields built by apply_field / lie_bracket have exact value and
// gradient; their assembled Hessian omits the third-order term of the
// underlying field. Compositions are therefore supported to second total
// derivative order, which is all the downstream operators consume.

#pragma once

#include <array>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>

#include "foliation/chart.hpp"
#include "foliation/jet.hpp"

namespace foliation {

template <class S> using JetVec = std::array<Jet2<S>, kMaxDim>;
template <class S> using ScalarFn = std::function<Jet2<S>(const JetVec<S>&, int)>;
template <class S> using VectorFn = std::function<JetVec<S>(const JetVec<S>&, int)>;

struct ScalarField {
  ScalarFn<double> re;
  ScalarFn<Dual> du;
};

struct VectorField {
  std::string label;
  VectorFn<double> re;
  VectorFn<Dual> du;
};

template <class F>
ScalarField scalar_field(F f) {
  return {ScalarFn<double>(f), ScalarFn<Dual>(f)};
}

template <class F>
VectorField vector_field(std::string label, F f) {
  return {std::move(label), VectorFn<double>(f), VectorFn<Dual>(f)};
}

template <class S>
const ScalarFn<S>& field_fn(const ScalarField& f) {
  if constexpr (std::is_same_v<S, double>) return f.re; else return f.du;
}

template <class S>
const VectorFn<S>& field_fn(const VectorField& f) {
  if constexpr (std::is_same_v<S, double>) return f.re; else return f.du;
}

template <class S>
JetVec<S> seeds_for(const ChartPoint& p) {
  JetVec<S> s{};
  for (int i = 0; i < p.dim; ++i) s[i] = jet_var(S(p.x[i]), i, p.dim);
  return s;
}

inline Jet2d eval_jet(const ScalarField& f, const ChartPoint& p) {
  return f.re(seeds_for<double>(p), p.dim);
}

inline Jet2d eval_jet(const ScalarField& f, const JetVec<double>& seeds, int dim) {
  return f.re(seeds, dim);
}

inline double eval_value(const ScalarField& f, const ChartPoint& p) {
  return eval_jet(f, p).v;
}

inline double eval_value(const ScalarField& f, const JetVec<double>& seeds, int dim) {
  return f.re(seeds, dim).v;
}

// Value and exact directional derivative of f along v at p.
inline Dual eval_dir(const ScalarField& f, const ChartPoint& p,
                     const std::array<double, kMaxDim>& v) {
  SeedsX s{};
  for (int i = 0; i < p.dim; ++i) s[i] = jet_var(Dual(p.x[i], v[i]), i, p.dim);
  return f.du(s, p.dim).v;
}

inline std::array<double, kMaxDim> eval_vector(const VectorField& V,
                                               const ChartPoint& p) {
  const auto jets = V.re(seeds_for<double>(p), p.dim);
  std::array<double, kMaxDim> out{};
  for (int i = 0; i < p.dim; ++i) out[i] = jets[i].v;
  return out;
}

inline JetVec<double> eval_vector(const VectorField& V, const JetVec<double>& seeds,
                                  int dim) {
  return V.re(seeds, dim);
}

// Jet of the scalar field Vf from the component jets of V and the jet of f.
// Exact through gradient; the Hessian omits the third-order term of f.
template <class S>
Jet2<S> apply_jets(const JetVec<S>& V, const Jet2<S>& F, int dim) {
  Jet2<S> r;
  r.dim = dim;
  for (int k = 0; k < dim; ++k) {
    r.v += V[k].v * F.g[k];
    for (int i = 0; i < dim; ++i)
      r.g[i] += V[k].g[i] * F.g[k] + V[k].v * F.hess(k, i);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        r.h[hidx(i, j)] += V[k].h[hidx(i, j)] * F.g[k] +
                           V[k].g[i] * F.hess(k, j) + V[k].g[j] * F.hess(k, i);
  }
  return r;
}

// Component jets of [V, W]. Exact through gradient.
template <class S>
JetVec<S> bracket_jets(const JetVec<S>& V, const JetVec<S>& W, int dim) {
  JetVec<S> r{};
  for (int k = 0; k < dim; ++k) {
    Jet2<S> c;
    c.dim = dim;
    for (int j = 0; j < dim; ++j) {
      c.v += V[j].v * W[k].g[j] - W[j].v * V[k].g[j];
      for (int i = 0; i < dim; ++i)
        c.g[i] += V[j].g[i] * W[k].g[j] + V[j].v * W[k].hess(j, i) -
                  W[j].g[i] * V[k].g[j] - W[j].v * V[k].hess(j, i);
      for (int i = 0; i < dim; ++i)
        for (int m = i; m < dim; ++m)
          c.h[hidx(i, m)] += V[j].h[hidx(i, m)] * W[k].g[j] +
                             V[j].g[i] * W[k].hess(j, m) +
                             V[j].g[m] * W[k].hess(j, i) -
                             W[j].h[hidx(i, m)] * V[k].g[j] -
                             W[j].g[i] * V[k].hess(j, m) -
                             W[j].g[m] * V[k].hess(j, i);
    }
    r[k] = c;
  }
  return r;
}

ScalarField apply_field(const VectorField& V, const ScalarField& f);
VectorField lie_bracket(const VectorField& V, const VectorField& W);

inline double apply_field_value(const VectorField& V, const ScalarField& f,
                                const ChartPoint& p) {
  const auto seeds = seeds_for<double>(p);
  return apply_jets(V.re(seeds, p.dim), f.re(seeds, p.dim), p.dim).v;
}

inline std::array<double, kMaxDim> lie_bracket_value(const VectorField& V,
                                                     const VectorField& W,
                                                     const ChartPoint& p) {
  const auto seeds = seeds_for<double>(p);
  const auto jets = bracket_jets(V.re(seeds, p.dim), W.re(seeds, p.dim), p.dim);
  std::array<double, kMaxDim> out{};
  for (int i = 0; i < p.dim; ++i) out[i] = jets[i].v;
  return out;
}

}  // namespace foliation
