// Built-in model spaces and surfaces.
//
// Model spaces carry an adapted frame normalized so that [X1,X2] = X0 and
// [X0,X1] = kappa X2, [X0,X2] = -kappa X1 with kappa in {0, 4k^2, -4k^2}
// (flat, positive, negative model). Surfaces come with parameter samplers,
// closed-form drift where available, and expected characteristic points.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "foliation/surface.hpp"

namespace foliation {

struct ModelSpace {
  std::string name;
  double kappa = 0.0;
  double k = 0.0;  // scale; kappa = 4k^2 (su2), -4k^2 (sl2), 0 (heisenberg)
  ContactStructure structure;
};

ModelSpace heisenberg();
ModelSpace su2(double k);
ModelSpace sl2(double k);
std::optional<ModelSpace> make_model(const std::string& name, double k);

struct NamedSurface {
  std::string name;
  ModelSpace space;
  SurfaceSpec spec;
  std::map<std::string, double> params;
  // Drift of the foliation field in ambient terms; nullopt off the formula's
  // domain (e.g. away from the axes of the hyperbolic paraboloid).
  std::function<std::optional<double>(const ChartPoint&)> closed_form_b;
  std::vector<ChartPoint> expected_characteristic_points;
  // Deterministic point sampler over (t1, t2) in [0,1)^2, staying on the
  // surface and away from characteristic points.
  std::function<ChartPoint(double, double)> sample;
  std::optional<std::string> warning;
};

NamedSurface paraboloid(double a);                  // z = a (x^2 + y^2)
NamedSurface spheroid(double a, double c);          // x^2+y^2+z^2/c^2 = a^2
NamedSurface hyperbolic_paraboloid(double a);       // z = a x y
NamedSurface su2_sphere(double k);                  // u = w
NamedSurface sl2_plane(double k);                   // u = y - z
// Surface swept by the group exponential of horizontal rays; realized by the
// closed-form zero set, asserted elsewhere to coincide with the numerical
// exponential. kappa selects the model (k = sqrt(|kappa|)/2).
NamedSurface canonical_exp_surface(double kappa);

std::vector<std::string> builtin_surface_names();
std::optional<NamedSurface> make_surface(const std::string& name,
                                         const std::map<std::string, double>& params);

// Logarithmic spiral leaf of the paraboloid in arc length s from the
// characteristic point, phase psi.
ChartPoint spiral_leaf_point(double a, double psi, double s);

// Leaf arc length between polar angles 0 and theta on the spheroid, and its
// inverse; adaptive quadrature with relative error <= 1e-10.
double spheroid_arclength(double a, double c, double theta);
double spheroid_theta_from_arclength(double a, double c, double s);

// Cosine of the angle between the foliation field and the meridian tangent;
// constant exactly when c = 1.
double loxodrome_cos_angle(double a, double c, double theta);

// Orders of the radial reference processes along the (y, x) axes of the
// hyperbolic paraboloid: (1 + 2/(1+2a), 1 + 2/(1-2a)).
std::pair<double, double> axis_bessel_orders(double a);

// exp(r cos(theta) X1 + r sin(theta) X2) from the group identity, integrated
// by fixed-step RK4 with per-step projection to the chart constraint.
ChartPoint exp_surface_point(double kappa, double r, double theta,
                             double step = 1e-3);

// Drift along the exponential ray predicted by the curvature table:
// 2k cot(kr), 2/r, 2k coth(kr) for kappa positive, zero, negative.
double exp_surface_drift(double kappa, double r);

}  // namespace foliation
