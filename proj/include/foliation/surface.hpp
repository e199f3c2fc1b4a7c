// Surfaces S = {u = 0} inside a contact structure: horizontal gradient,
// characteristic points (where the horizontal gradient vanishes on S), their
// linear classification, and the unit foliation field with its drift.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "foliation/contact.hpp"

namespace foliation {

struct SurfaceSpec {
  std::string name;
  ChartId chart = ChartId::Heisenberg;
  ScalarField u;
};

struct HorizontalGradient {
  double x1u = 0.0, x2u = 0.0, x0u = 0.0;
  double norm = 0.0;  // sqrt(x1u^2 + x2u^2), the characteristic criterion
};

HorizontalGradient horizontal_gradient(const ContactStructure& cs,
                                       const SurfaceSpec& S, const ChartPoint& p);

// u' = u / (X0 u). Requires X0 u != 0 near the points of interest. The trace
// of the frame Hessian of u' equals 1 at characteristic points.
SurfaceSpec normalize_u(const ContactStructure& cs, const SurfaceSpec& S);

// (Hess u) J in the frame basis: [[X1X2u, -X1X1u], [X2X2u, -X2X1u]].
std::array<std::array<double, 2>, 2> hessJ(const ContactStructure& cs,
                                           const SurfaceSpec& S, const ChartPoint& p);

enum class PointClass { EllipticFocus, EllipticNode, HyperbolicSaddle, Degenerate };

std::string point_class_name(PointClass c);

struct EigenDirection {
  double lambda = 0.0;                      // real eigenvalue
  std::array<double, 2> frame{};            // direction in the (X1, X2) basis
  std::array<double, kMaxDim> ambient{};    // same direction in chart coords
};

struct CharacteristicPointReport {
  ChartPoint location;
  std::array<std::array<double, 2>, 2> hess_j{};
  double det = 0.0;
  double trace = 0.0;
  std::array<std::complex<double>, 2> eigenvalues{};
  PointClass cls = PointClass::Degenerate;
  std::vector<EigenDirection> directions;   // empty for complex eigenvalues
  bool normalized = false;
};

inline constexpr double kClassifyTol = 1e-9;

// Classifies a characteristic point. Normalizes u by X0u first unless the
// surface already has X0u = 1 at x (within tol); records whether it did.
CharacteristicPointReport classify(const ContactStructure& cs, const SurfaceSpec& S,
                                   const ChartPoint& x, double tol = kClassifyTol);

struct FindOptions {
  std::array<double, kMaxDim> lo{-1.5, -1.5, -1.5, -1.5};
  std::array<double, kMaxDim> hi{1.5, 1.5, 1.5, 1.5};
  int grid_per_axis = 11;
  std::vector<ChartPoint> extra_seeds;
  int max_iter = 30;
  double residual_tol = 1e-12;
  double dedup_radius = 1e-6;
};

struct FindResult {
  std::vector<ChartPoint> points;
  int n_seeds = 0;
  int n_converged = 0;
};

// Damped Newton on (u, X1u, X2u [, chart constraint]) from a seed lattice.
// Every returned point satisfies |u| <= 1e-10 and horizontal norm <= 1e-8;
// duplicates within dedup_radius are merged and results sorted canonically.
FindResult find_characteristic_points(const ContactStructure& cs, const SurfaceSpec& S,
                                      const FindOptions& opt = {});

// Unit foliation field ((X2u) X1 - (X1u) X2) / |grad_H u| extended off S by
// the same formula, and its quarter-turn J rotation.
VectorField foliation_field(const ContactStructure& cs, const SurfaceSpec& S);
VectorField foliation_field_perp(const ContactStructure& cs, const SurfaceSpec& S);

// Drift b = X0u / |grad_H u| as a field and at a point.
ScalarField drift_field(const ContactStructure& cs, const SurfaceSpec& S);
double drift_b(const ContactStructure& cs, const SurfaceSpec& S, const ChartPoint& p);

// |(b J(hatX) - X0) u| at p: vanishes on S, the intrinsic meaning of b.
double drift_tangency_residual(const ContactStructure& cs, const SurfaceSpec& S,
                               const ChartPoint& p);

}  // namespace foliation
