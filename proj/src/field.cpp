#include "foliation/field.hpp"

namespace foliation {

namespace {

template <class S>
ScalarFn<S> apply_fn(VectorFn<S> V, ScalarFn<S> f) {
  return [V = std::move(V), f = std::move(f)](const JetVec<S>& xs, int dim) {
    return apply_jets(V(xs, dim), f(xs, dim), dim);
  };
}

template <class S>
VectorFn<S> bracket_fn(VectorFn<S> V, VectorFn<S> W) {
  return [V = std::move(V), W = std::move(W)](const JetVec<S>& xs, int dim) {
    return bracket_jets(V(xs, dim), W(xs, dim), dim);
  };
}

}  // namespace

ScalarField apply_field(const VectorField& V, const ScalarField& f) {
  return {apply_fn<double>(V.re, f.re), apply_fn<Dual>(V.du, f.du)};
}

VectorField lie_bracket(const VectorField& V, const VectorField& W) {
  return {"[" + V.label + "," + W.label + "]",
          bracket_fn<double>(V.re, W.re), bracket_fn<Dual>(V.du, W.du)};
}

}  // namespace foliation
