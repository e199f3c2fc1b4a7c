// Leaf tracing of the characteristic foliation: fixed-step RK4 along the
// unit foliation field with per-step Newton projection back onto the surface
// (and chart constraint). Steps shrink automatically near characteristic
// points, where the stop rule takes over.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foliation/surface.hpp"

namespace foliation {

enum class StopReason { MaxLength, NearCharacteristicPoint, DomainExit, StepFailure };

std::string stop_reason_name(StopReason r);

struct TraceOptions {
  int direction = +1;            // trace along direction * hatX
  double step = 1e-3;            // arc-length step
  double max_length = 5.0;
  double char_stop = 1e-4;       // stop when |grad_H u| falls below this
  double project_tol = 1e-12;
  double u_drift_tol = 1e-6;     // reject a step whose pre-projection |u| exceeds this
  std::optional<std::array<double, kMaxDim>> box_lo;
  std::optional<std::array<double, kMaxDim>> box_hi;
  std::size_t max_samples = 2'000'000;
};

struct LeafSample {
  double s = 0.0;                  // signed arc length from the start point
  ChartPoint point;
  double b = 0.0;                  // drift field value
  std::array<double, kMaxDim> hat_x{};
};

struct LeafTrace {
  std::string surface;
  int direction = +1;
  StopReason stop = StopReason::MaxLength;
  std::vector<LeafSample> samples;
};

// Start must lie on the surface (|u| <= 1e-8) and away from characteristic
// points; refuses starts whose nearest characteristic point classifies as
// Degenerate when a classification is supplied.
LeafTrace trace_leaf(const ContactStructure& cs, const SurfaceSpec& S,
                     const ChartPoint& start, const TraceOptions& opt = {});

std::string leaf_trace_to_csv(const LeafTrace& t);
LeafTrace leaf_trace_from_csv(const std::string& csv);
void write_leaf_csv(const LeafTrace& t, const std::string& path);

struct ExpansionFit {
  double lambda_hat = 0.0;  // signed: negative when the foliation field
                            // points toward the characteristic point
  double intercept = 0.0;
  double r2 = 0.0;
  int n_points = 0;
  int orientation = +1;     // sign of hatX against the outward leaf direction
  bool ok = false;
};

// Fits 1/b against arc distance from the characteristic point over the given
// window; the slope estimates the approach eigenvalue (1/2 for a focus).
ExpansionFit expansion_check(const LeafTrace& trace, const ChartPoint& char_point,
                             double window_lo = 0.01, double window_hi = 0.1);

}  // namespace foliation
