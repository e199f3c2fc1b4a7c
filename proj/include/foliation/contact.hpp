// Contact structures: an adapted frame (X1, X2, X0) with optional contact
// form, structure-function extraction and normalization checks. The frame
// convention is [X1,X2] = c121 X1 + c122 X2 + X0 and [X0,Xi] horizontal.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "foliation/field.hpp"

namespace foliation {

struct OneForm {
  VectorFn<double> re;
  VectorFn<Dual> du;
};

template <class F>
OneForm one_form(F f) {
  return {VectorFn<double>(f), VectorFn<Dual>(f)};
}

struct ContactStructure {
  ChartId chart = ChartId::Heisenberg;
  VectorField X1, X2, X0;
  std::optional<OneForm> omega;
};

// Pairing omega(V) as a scalar field.
ScalarField pair_form(const OneForm& omega, const VectorField& V);

struct FrameCoeffs {
  double d1 = 0.0, d2 = 0.0, d0 = 0.0;
  double residual = 0.0;  // out-of-span norm, meaningful on dim-4 charts
};

// Least-squares decomposition of an ambient vector in the frame at p.
// Fails (residual large / throws nothing, flags via ok=false) when the frame
// matrix is singular below the determinant threshold.
struct FrameDecomposition {
  bool ok = false;
  FrameCoeffs c;
};
FrameDecomposition frame_decompose(const ContactStructure& cs, const ChartPoint& p,
                                   const std::array<double, kMaxDim>& v);

inline constexpr double kFrameSingularTol = 1e-10;

struct StructureFunctions {
  // [X1,X2] = c121 X1 + c122 X2 + c120 X0; c120 = 1 for an adapted frame.
  double c121 = 0.0, c122 = 0.0, c120 = 0.0;
  // [X0,Xi] = c0i1 X1 + c0i2 X2 + c0i0 X0; c0i0 = 0 for an adapted frame.
  double c011 = 0.0, c012 = 0.0, c010 = 0.0;
  double c021 = 0.0, c022 = 0.0, c020 = 0.0;
  double max_residual = 0.0;
};

std::optional<StructureFunctions> structure_functions(const ContactStructure& cs,
                                                      const ChartPoint& p);

struct ContactCheck {
  bool ok = false;
  double max_violation = 0.0;
  std::vector<std::string> failures;
};

// Verifies at the given points: omega(X0)=1, omega(X1)=omega(X2)=0,
// omega([X1,X2])=1, d omega(X0, Xi)=0 and, on dim-4 charts, tangency of the
// frame to the constraint set. Skips form checks when omega is absent but
// still validates the commutation normalization via structure functions.
ContactCheck validate_contact(const ContactStructure& cs,
                              const std::vector<ChartPoint>& pts,
                              double tol = 1e-8);

// Riemannian inner product on D extended by g(X0,X0)=1 (used with weight
// 1/eps by the operator module): returns frame coefficients dot products.
double g_horizontal(const FrameCoeffs& a, const FrameCoeffs& b);

// Jet-level Cramer decomposition of v in the frame columns, usable inside
// field closures over either scalar type. On dim-4 charts solves the normal
// equations; the frame is well-conditioned wherever the models are evaluated.
template <class S>
std::array<Jet2<S>, 3> frame_decompose_jets(const JetVec<S>& X1, const JetVec<S>& X2,
                                            const JetVec<S>& X0, const JetVec<S>& v,
                                            int dim) {
  // Gram matrix entries and right-hand side in jet arithmetic.
  const JetVec<S>* cols[3] = {&X1, &X2, &X0};
  Jet2<S> A[3][3];
  Jet2<S> rhs[3];
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      Jet2<S> s = jet_const(S(0.0), dim);
      for (int i = 0; i < dim; ++i) s = s + (*cols[a])[i] * (*cols[b])[i];
      A[a][b] = s;
      A[b][a] = s;
    }
    Jet2<S> s = jet_const(S(0.0), dim);
    for (int i = 0; i < dim; ++i) s = s + (*cols[a])[i] * v[i];
    rhs[a] = s;
  }
  const Jet2<S> det =
      A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
      A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
      A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  std::array<Jet2<S>, 3> out;
  for (int c = 0; c < 3; ++c) {
    Jet2<S> M[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) M[a][b] = (b == c) ? rhs[a] : A[a][b];
    const Jet2<S> num =
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
        M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
        M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    out[c] = num / det;
  }
  return out;
}

}  // namespace foliation
