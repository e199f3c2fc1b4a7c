// Finite-difference oracles used to validate the jet machinery from an
// independent route: central differences with one Richardson extrapolation
// level on plain field evaluations. Points are shifted along straight chart
// lines, matching the literal off-surface extension the library uses.

#pragma once

#include <array>
#include <functional>

#include "foliation/field.hpp"

namespace oracle {

using foliation::ChartPoint;
using foliation::kMaxDim;

inline ChartPoint shifted(const ChartPoint& p, const std::array<double, kMaxDim>& v,
                          double t) {
  std::array<double, kMaxDim> x = p.x;
  for (int i = 0; i < p.dim; ++i) x[i] += t * v[i];
  return foliation::make_chart_point(p.chart, x);
}

// First directional derivative along v, Richardson-extrapolated central
// difference with base step h.
inline double fd_dir(const std::function<double(const ChartPoint&)>& f,
                     const ChartPoint& p, const std::array<double, kMaxDim>& v,
                     double h = 1e-4) {
  const auto d = [&](double step) {
    return (f(shifted(p, v, step)) - f(shifted(p, v, -step))) / (2.0 * step);
  };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

// Second directional derivative along v.
inline double fd_dir2(const std::function<double(const ChartPoint&)>& f,
                      const ChartPoint& p, const std::array<double, kMaxDim>& v,
                      double h = 1e-3) {
  const auto d = [&](double step) {
    return (f(shifted(p, v, step)) - 2.0 * f(p) + f(shifted(p, v, -step))) /
           (step * step);
  };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

inline std::array<double, kMaxDim> axis(int i) {
  std::array<double, kMaxDim> v{};
  v[i] = 1.0;
  return v;
}

// Partial derivative of a scalar field value along coordinate i.
inline double fd_partial(const foliation::ScalarField& f, const ChartPoint& p, int i,
                         double h = 1e-4) {
  return fd_dir([&](const ChartPoint& q) { return foliation::eval_value(f, q); }, p,
                axis(i), h);
}

}  // namespace oracle
