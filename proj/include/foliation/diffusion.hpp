// One-dimensional diffusions along foliation leaves: dS = (b(S)/2) dt + dW.
// Euler-Maruyama with a Brownian-bridge barrier test per step (steps refine
// near barriers to keep the one-step Peclet number bounded), counter-based
// per-path RNG for thread-count-independent bit reproducibility, and boundary
// accessibility classification via exponent fits of rho(t) = exp(int_t^delta b).

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foliation/leaf.hpp"
#include "foliation/surface.hpp"

namespace foliation {

// Deterministic per-path stream: a splitmix64 sequence whose state is a
// fixed mix of (master seed, path index). Normals via Box-Muller.
class PathRng {
 public:
  PathRng(std::uint64_t master_seed, std::uint64_t path_index);
  double uniform();  // [0, 1)
  double normal();

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// Monotone cubic Hermite interpolation (Fritsch-Carlson slopes); exact at
// knots, constant extrapolation outside them.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> xs, std::vector<double> ys);
  double operator()(double x) const;
  double x_front() const { return xs_.front(); }
  double x_back() const { return xs_.back(); }

 private:
  std::vector<double> xs_, ys_, ms_;
};

enum class BoundaryLabel { CharacteristicPoint, DomainEdge };

std::string boundary_label_name(BoundaryLabel l);

struct LeafDiffusionSpec {
  std::string name;
  std::function<double(double)> b_of_s;  // leaf-arc-length drift, signed away
                                         // from the lower endpoint
  double s_min = 0.0;
  double s_max = std::numeric_limits<double>::infinity();
  BoundaryLabel lower = BoundaryLabel::CharacteristicPoint;
  BoundaryLabel upper = BoundaryLabel::DomainEdge;
  // Knot coverage for interpolated drifts; the drift is extrapolated as a
  // constant outside [data_lo, data_hi].
  double data_lo = 0.0;
  double data_hi = std::numeric_limits<double>::infinity();
};

enum class ReferenceKind { Bessel3, Legendre3, HyperbolicBessel3, BesselOrder };

// Closed-form drifts 2/s, 2k cot(ks) on (0, pi/k), 2k coth(ks), (nu-1)/s.
// The parameter is k for the middle two kinds and nu for BesselOrder.
LeafDiffusionSpec reference_process(ReferenceKind kind, double param = 1.0);

// Interpolated drift in arc distance sigma from the characteristic point,
// signed so positive drift pushes away from it. Lower endpoint sits at
// sigma = 0 and is labeled CharacteristicPoint.
LeafDiffusionSpec spec_from_trace(const LeafTrace& trace, const ChartPoint& char_point,
                                  std::string name);

struct SimConfig {
  double s0 = 1.0;
  double dt = 1e-4;
  double t_max = 10.0;
  std::int64_t n_paths = 10000;
  double kill_radius = 1e-3;
  std::uint64_t master_seed = 0;
};

struct PathStats {
  std::int64_t n_paths = 0;
  std::int64_t n_hit = 0;         // absorbed at a CharacteristicPoint endpoint
  std::int64_t n_survived = 0;    // alive at t_max
  std::int64_t n_exited_far = 0;  // absorbed at a DomainEdge endpoint
  std::int64_t n_aborted = 0;     // drift evaluation failure (counted, not binned)
  std::int64_t n_hit_lower = 0;
  std::int64_t n_hit_upper = 0;
  double hit_fraction = 0.0;
  double wilson_lo = 0.0, wilson_hi = 0.0;
  double mean_hit_time = 0.0;  // over hit paths; 0 when none hit
};

PathStats simulate(const LeafDiffusionSpec& spec, const SimConfig& cfg);

// Deterministic report payload; no timing field, so byte-identical for
// identical config regardless of wall clock or thread count.
nlohmann::ordered_json path_stats_json(const LeafDiffusionSpec& spec,
                                       const SimConfig& cfg, const PathStats& stats);

// exp(int_t^delta b) by adaptive quadrature.
double rho(const LeafDiffusionSpec& spec, double t, double delta);

enum class Verdict { Accessible, Inaccessible };
enum class BoundaryMethod { EigenvalueRule, NumericIntegral, Both };
enum class Side { Lower, Upper };

std::string verdict_name(Verdict v);
std::string boundary_method_name(BoundaryMethod m);

struct IntegralResult {
  bool divergent = false;
  double value = 0.0;  // meaningful when convergent
};

struct BoundaryReport {
  Verdict verdict = Verdict::Accessible;
  BoundaryMethod method = BoundaryMethod::NumericIntegral;
  double lambda_exponent = 0.0;  // eigenvalue when supplied, else 1/q_hat
  double q_hat = 0.0;            // fitted exponent of rho(t) ~ t^(-q)
  double fit_r2 = 0.0;
  double delta = 0.0;
  double t_lo = 0.0, t_hi = 0.0;  // fit window
  bool unreliable_fit = false;
  bool disagreement = false;
  std::optional<Verdict> verdict_eigen;
  std::optional<Verdict> verdict_integral;
  IntegralResult integral_rho;    // int_0^delta rho
  IntegralResult integral_test2;  // int_0^delta (1 + |b|/2) / rho
};

// Exponent-fit classification of the endpoint on the given side, optionally
// cross-checked against the eigenvalue rule (inaccessible iff lambda in (0,1]).
BoundaryReport classify_boundary(const LeafDiffusionSpec& spec, Side side,
                                 std::optional<double> eigen_lambda = std::nullopt,
                                 std::optional<double> delta_override = std::nullopt);

nlohmann::ordered_json boundary_report_json(const BoundaryReport& r);

// Eigenvalue of the characteristic point along the approach direction:
// 1/2 for a focus, else the real eigenvalue whose eigendirection is most
// parallel to dir. Throws for degenerate points.
double approach_lambda(const CharacteristicPointReport& report,
                       const std::array<double, kMaxDim>& dir);

// h(r) in {sin(kr), r, sinh(kr)} by the sign of kappa, and the drift identity
// 2 h'(r)/h(r) it generates.
double weighted_laplacian_h(double kappa, double k, double r);
double weighted_laplacian_h_ratio(double kappa, double k, double r);

}  // namespace foliation
