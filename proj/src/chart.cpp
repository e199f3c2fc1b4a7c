#include "foliation/chart.hpp"

#include <cmath>

namespace foliation {

std::string chart_name(ChartId id) {
  switch (id) {
    case ChartId::Heisenberg: return "heisenberg";
    case ChartId::SU2: return "su2";
    case ChartId::SL2: return "sl2";
  }
  return "heisenberg";
}

std::optional<ChartId> chart_from_name(const std::string& name) {
  if (name == "heisenberg") return ChartId::Heisenberg;
  if (name == "su2") return ChartId::SU2;
  if (name == "sl2") return ChartId::SL2;
  return std::nullopt;
}

int chart_dim(ChartId id) { return id == ChartId::Heisenberg ? 3 : 4; }

double chart_constraint(ChartId id, const std::array<double, kMaxDim>& x) {
  switch (id) {
    case ChartId::Heisenberg:
      return 0.0;
    case ChartId::SU2:
      return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - 1.0;
    case ChartId::SL2:
      return x[0] * x[3] - x[1] * x[2] - 1.0;
  }
  return 0.0;
}

std::array<double, kMaxDim> chart_constraint_grad(ChartId id,
                                                  const std::array<double, kMaxDim>& x) {
  switch (id) {
    case ChartId::Heisenberg:
      return {0.0, 0.0, 0.0, 0.0};
    case ChartId::SU2:
      return {2.0 * x[0], 2.0 * x[1], 2.0 * x[2], 2.0 * x[3]};
    case ChartId::SL2:
      return {x[3], -x[2], -x[1], x[0]};
  }
  return {};
}

std::optional<ChartPoint> project_to_chart(ChartId id,
                                           std::array<double, kMaxDim> x,
                                           const ProjectOptions& opt) {
  const int dim = chart_dim(id);
  double c = chart_constraint(id, x);
  if (std::abs(c) > opt.max_initial_residual) return std::nullopt;
  for (int iter = 0; iter < opt.max_iter && std::abs(c) > opt.tol; ++iter) {
    const auto g = chart_constraint_grad(id, x);
    double g2 = 0.0;
    for (int i = 0; i < dim; ++i) g2 += g[i] * g[i];
    if (g2 == 0.0) return std::nullopt;
    const double step = c / g2;
    for (int i = 0; i < dim; ++i) x[i] -= step * g[i];
    c = chart_constraint(id, x);
  }
  if (std::abs(c) > opt.tol) return std::nullopt;
  ChartPoint p;
  p.chart = id;
  p.x = x;
  p.dim = dim;
  p.constraint_residual = c;
  return p;
}

ChartPoint make_chart_point(ChartId id, const std::array<double, kMaxDim>& x) {
  ChartPoint p;
  p.chart = id;
  p.x = x;
  p.dim = chart_dim(id);
  p.constraint_residual = chart_constraint(id, x);
  return p;
}

ChartPoint heisenberg_point(double x, double y, double z) {
  return make_chart_point(ChartId::Heisenberg, {x, y, z, 0.0});
}

double dist(const ChartPoint& p, const ChartPoint& q) {
  double s = 0.0;
  for (int i = 0; i < p.dim; ++i) {
    const double d = p.x[i] - q.x[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace foliation
