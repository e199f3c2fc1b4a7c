// Ambient charts for the three model spaces. Heisenberg lives on R^3; the
// group models live on algebraic constraint sets in R^4 (unit quaternions,
// unit-determinant 2x2 matrices laid out as (x,y,z,w)).

#pragma once

#include <array>
#include <optional>
#include <string>

#include "foliation/jet.hpp"

namespace foliation {

enum class ChartId { Heisenberg, SU2, SL2 };

std::string chart_name(ChartId id);
std::optional<ChartId> chart_from_name(const std::string& name);
int chart_dim(ChartId id);

struct ChartPoint {
  ChartId chart = ChartId::Heisenberg;
  std::array<double, kMaxDim> x{};
  int dim = 3;
  double constraint_residual = 0.0;
};

// Constraint value c(x); identically zero for Heisenberg. Charts with dim 4
// carry one scalar constraint (|q|^2 - 1 resp. xw - yz - 1).
double chart_constraint(ChartId id, const std::array<double, kMaxDim>& x);
std::array<double, kMaxDim> chart_constraint_grad(ChartId id,
                                                  const std::array<double, kMaxDim>& x);

inline double chart_constraint(const ChartPoint& p) {
  return chart_constraint(p.chart, p.x);
}
inline std::array<double, kMaxDim> chart_constraint_grad(const ChartPoint& p) {
  return chart_constraint_grad(p.chart, p.x);
}

template <class S>
Jet2<S> chart_constraint_jet(ChartId id, const std::array<Jet2<S>, kMaxDim>& xs) {
  switch (id) {
    case ChartId::Heisenberg:
      return jet_const(S(0.0), 3);
    case ChartId::SU2:
      return xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2] + xs[3] * xs[3] - S(1.0);
    case ChartId::SL2:
      return xs[0] * xs[3] - xs[1] * xs[2] - S(1.0);
  }
  return jet_const(S(0.0), 3);
}

struct ProjectOptions {
  double tol = 1e-12;
  int max_iter = 20;
  double max_initial_residual = 0.1;
};

// Newton projection of a raw ambient point onto the chart constraint set,
// moving along the constraint gradient. Requires the start to be within
// max_initial_residual of the set. Returns nullopt on non-convergence.
std::optional<ChartPoint> project_to_chart(ChartId id,
                                           std::array<double, kMaxDim> x,
                                           const ProjectOptions& opt = {});

// Wraps coordinates into a ChartPoint, recording the residual without
// projecting. Suitable for points already on the set.
ChartPoint make_chart_point(ChartId id, const std::array<double, kMaxDim>& x);

ChartPoint heisenberg_point(double x, double y, double z);

double dist(const ChartPoint& p, const ChartPoint& q);

}  // namespace foliation
