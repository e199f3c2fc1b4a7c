// The epsilon-family of surface Laplacians, their limit, and the intrinsic
// Gaussian curvatures. All outer derivatives of assembled quantities (frame
// derivatives of b, of the bracket coefficient b1, of applied fields) are
// taken with dual-number directional evaluation, so no quantity ever needs an
// incomplete assembled Hessian.

#pragma once

#include <string>
#include <vector>

#include "foliation/contact.hpp"
#include "foliation/surface.hpp"

namespace foliation {

// Frame and scalar data of the operator family at one surface point.
struct FramePoint {
  int dim = 3;
  double u = 0.0;
  double x1u = 0.0, x2u = 0.0, x0u = 0.0;
  double norm = 0.0;  // |grad_H u|, the characteristic criterion
  double b = 0.0;
  std::array<double, kMaxDim> F1{};      // unit foliation direction
  std::array<double, kMaxDim> F1perp{};  // quarter-turn J(F1)
  std::array<double, kMaxDim> F2{};      // b J(F1) - X0
  double F1b = 0.0, F2b = 0.0;           // frame derivatives of b
  double hF1 = 0.0;                      // deviation h(F1)
  double etaF1 = 0.0;                    // tensor eta(F1)
  double b1 = 0.0, b2 = 0.0;             // [F1,F2] = b1 F1 + b2 F2; b2 = -b
};

struct OperatorContext {
  ContactStructure cs;
  SurfaceSpec surf;
  double min_criterion = 1e-10;  // refuse evaluation closer to the singular set
  double on_surface_tol = 1e-7;  // |u| allowed at evaluation points
};

OperatorContext make_operators(const ContactStructure& cs, const SurfaceSpec& surf);

// Throws std::invalid_argument off the surface or too close to a
// characteristic point.
FramePoint frame_point(const OperatorContext& ctx, const ChartPoint& p);

double a_eps_value(const OperatorContext& ctx, const ChartPoint& p, double eps);

// Metric of the Riemannian approximation: (X1, X2, sqrt(eps) X0) orthonormal.
double g_eps(const OperatorContext& ctx, const std::array<double, kMaxDim>& v,
             const std::array<double, kMaxDim>& w, const ChartPoint& p, double eps);

// Limiting operator F1^2 + b F1 applied to f at p.
double delta0_apply(const OperatorContext& ctx, const ScalarField& f, const ChartPoint& p);

// F1^2 + a^2 F2^2 + (b - F1(a)/a) F1 - a^2 (b h(F1) + eta(F1)) F2 applied to f.
double delta_eps_apply(const OperatorContext& ctx, const ScalarField& f,
                       const ChartPoint& p, double eps);

// K0 = -F1(b) - b^2 and the finite-eps curvature it is the limit of.
double gauss_k0(const OperatorContext& ctx, const ChartPoint& p);
double gauss_k_eps(const OperatorContext& ctx, const ChartPoint& p, double eps);

// F1(b) + b^2 + K0 with the derivative taken by an independent route.
double riccati_residual(const OperatorContext& ctx, const ChartPoint& p);

struct OperatorSample {
  ChartPoint point;
  double epsilon = 0.0;
  double delta_eps_f = 0.0;
  double delta0_f = 0.0;
  double error = 0.0;
};

struct ConvergenceSummary {
  std::vector<double> eps;
  std::vector<double> max_error;  // per eps, over all points
  std::vector<double> order;      // per adjacent eps pair
  double overall_slope = 0.0;     // log-log fit of max_error vs eps
};

struct ConvergenceStudy {
  std::vector<OperatorSample> rows;
  ConvergenceSummary summary;
};

ConvergenceStudy convergence_study(const OperatorContext& ctx, const ScalarField& f,
                                   const std::vector<ChartPoint>& points,
                                   const std::vector<double>& eps_list);

std::string convergence_csv(const ConvergenceStudy& study);

struct CurvatureSample {
  ChartPoint point;
  std::vector<double> k_eps;  // parallel to the eps list
  double k0 = 0.0;
  double riccati = 0.0;
};

std::vector<CurvatureSample> curvature_sweep(const OperatorContext& ctx,
                                             const std::vector<ChartPoint>& points,
                                             const std::vector<double>& eps_list);

std::string curvature_csv(const std::vector<CurvatureSample>& rows,
                          const std::vector<double>& eps_list);

// Compactly supported bump exp(1 - 1/(1 - d^2/R^2)) in ambient distance from
// center; identically zero at distance >= R, smooth across the edge in double
// precision (the exponential underflows before the cut).
ScalarField bump_field(const ChartPoint& center, double radius);

}  // namespace foliation
