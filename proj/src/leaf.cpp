#include "foliation/leaf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "foliation/util.hpp"

namespace foliation {

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::MaxLength: return "max_length";
    case StopReason::NearCharacteristicPoint: return "near_characteristic_point";
    case StopReason::DomainExit: return "domain_exit";
    case StopReason::StepFailure: return "step_failure";
  }
  return "unknown";
}

namespace {

// Newton projection onto {u = 0} (and the chart constraint in dim 4) along
// the gradient directions of the active constraints.
bool project_to_leaf_surface(const ContactStructure& cs, const SurfaceSpec& S,
                             ChartPoint& p, double tol) {
  const int dim = p.dim;
  const int nc = (dim == 4) ? 2 : 1;
  for (int iter = 0; iter < 25; ++iter) {
    auto seeds = seeds_for<double>(p);
    Jet2d ju = eval_jet(S.u, seeds, dim);
    double cres = chart_constraint(p);
    if (std::abs(ju.v) <= tol && std::abs(cres) <= tol) {
      p.constraint_residual = cres;
      return true;
    }
    Eigen::MatrixXd A(nc, dim);
    Eigen::VectorXd r(nc);
    for (int k = 0; k < dim; ++k) A(0, k) = ju.g[k];
    r(0) = ju.v;
    if (nc == 2) {
      auto cg = chart_constraint_grad(p);
      for (int k = 0; k < dim; ++k) A(1, k) = cg[k];
      r(1) = cres;
    }
    // Least-norm correction: step = A^T (A A^T)^{-1} r.
    Eigen::MatrixXd AAt = A * A.transpose();
    if (std::abs(AAt.determinant()) < 1e-30) return false;
    Eigen::VectorXd lam = AAt.ldlt().solve(r);
    Eigen::VectorXd step = A.transpose() * lam;
    if (!step.allFinite()) return false;
    for (int k = 0; k < dim; ++k) p.x[k] -= step(k);
  }
  return false;
}

struct FieldEval {
  std::array<double, kMaxDim> hat_x{};
  double b = 0.0;
  double crit = 0.0;  // |grad_H u|
  double u = 0.0;
};

FieldEval eval_at(const ContactStructure& cs, const SurfaceSpec& S, const ChartPoint& p) {
  FieldEval out;
  auto seeds = seeds_for<double>(p);
  Jet2d ju = eval_jet(S.u, seeds, p.dim);
  out.u = ju.v;
  auto hg = horizontal_gradient(cs, S, p);
  out.crit = hg.norm;
  if (hg.norm <= 0.0) return out;
  auto j1 = eval_vector(cs.X1, seeds, p.dim);
  auto j2 = eval_vector(cs.X2, seeds, p.dim);
  for (int k = 0; k < p.dim; ++k)
    out.hat_x[k] = (hg.x2u * j1[k].v - hg.x1u * j2[k].v) / hg.norm;
  out.b = hg.x0u / hg.norm;
  return out;
}

bool outside_box(const ChartPoint& p, const TraceOptions& opt) {
  if (!opt.box_lo && !opt.box_hi) return false;
  for (int k = 0; k < p.dim; ++k) {
    if (opt.box_lo && p.x[k] < (*opt.box_lo)[k]) return true;
    if (opt.box_hi && p.x[k] > (*opt.box_hi)[k]) return true;
  }
  return false;
}

}  // namespace

LeafTrace trace_leaf(const ContactStructure& cs, const SurfaceSpec& S,
                     const ChartPoint& start, const TraceOptions& opt) {
  if (opt.direction != +1 && opt.direction != -1)
    throw std::invalid_argument("trace_leaf: direction must be +1 or -1");
  if (opt.step <= 0.0) throw std::invalid_argument("trace_leaf: step must be positive");

  LeafTrace out;
  out.surface = S.name;
  out.direction = opt.direction;

  ChartPoint p = start;
  if (std::abs(eval_value(S.u, p)) > 1e-8)
    throw std::invalid_argument("trace_leaf: start point is not on the surface");
  if (!project_to_leaf_surface(cs, S, p, opt.project_tol))
    throw std::invalid_argument("trace_leaf: start point does not project onto the surface");

  {
    FieldEval fe = eval_at(cs, S, p);
    if (fe.crit <= opt.char_stop)
      throw std::invalid_argument("trace_leaf: start point is too close to a characteristic point");
  }

  double s = 0.0;
  const double dir = static_cast<double>(opt.direction);

  auto rhs = [&](const ChartPoint& q, std::array<double, kMaxDim>& v, double& crit) -> bool {
    FieldEval fe = eval_at(cs, S, q);
    crit = fe.crit;
    if (fe.crit <= 0.0) return false;
    for (int k = 0; k < q.dim; ++k) v[k] = dir * fe.hat_x[k];
    return true;
  };

  while (true) {
    FieldEval fe = eval_at(cs, S, p);
    LeafSample sample;
    sample.s = dir * s;
    sample.point = p;
    sample.b = fe.b;
    sample.hat_x = fe.hat_x;
    out.samples.push_back(sample);

    if (fe.crit <= opt.char_stop) {
      out.stop = StopReason::NearCharacteristicPoint;
      break;
    }
    if (s >= opt.max_length) {
      out.stop = StopReason::MaxLength;
      break;
    }
    if (outside_box(p, opt)) {
      out.stop = StopReason::DomainExit;
      break;
    }
    if (out.samples.size() >= opt.max_samples) {
      out.stop = StopReason::StepFailure;
      break;
    }

    // Shrink steps near characteristic points so spirals stay resolved.
    double h = std::min(opt.step, 0.2 * fe.crit);
    h = std::min(h, opt.max_length - s + 1e-15);
    if (h <= 0.0) {
      out.stop = StopReason::MaxLength;
      break;
    }

    // Classical RK4 on the unit field, then projection.
    std::array<double, kMaxDim> k1{}, k2{}, k3{}, k4{};
    double crit_mid = 0.0;
    ChartPoint q = p;
    bool ok = rhs(p, k1, crit_mid);
    if (ok) {
      for (int k = 0; k < p.dim; ++k) q.x[k] = p.x[k] + 0.5 * h * k1[k];
      ok = rhs(q, k2, crit_mid);
    }
    if (ok) {
      for (int k = 0; k < p.dim; ++k) q.x[k] = p.x[k] + 0.5 * h * k2[k];
      ok = rhs(q, k3, crit_mid);
    }
    if (ok) {
      for (int k = 0; k < p.dim; ++k) q.x[k] = p.x[k] + h * k3[k];
      ok = rhs(q, k4, crit_mid);
    }
    if (!ok) {
      out.stop = StopReason::StepFailure;
      break;
    }
    ChartPoint next = p;
    for (int k = 0; k < p.dim; ++k)
      next.x[k] = p.x[k] + (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);

    // The RK4 update should stay on the surface to high order; a large
    // pre-projection residual means the step outran the local geometry.
    {
      auto seeds = seeds_for<double>(next);
      double u_pre = eval_value(S.u, seeds, next.dim);
      if (std::abs(u_pre) > opt.u_drift_tol) {
        out.stop = StopReason::StepFailure;
        break;
      }
    }
    if (!project_to_leaf_surface(cs, S, next, opt.project_tol)) {
      out.stop = StopReason::StepFailure;
      break;
    }
    p = next;
    s += h;
  }
  return out;
}

std::string leaf_trace_to_csv(const LeafTrace& t) {
  const int dim = t.samples.empty() ? 3 : t.samples.front().point.dim;
  std::ostringstream os;
  os << "s";
  for (int k = 0; k < dim; ++k) os << ",coord" << k;
  os << ",b";
  for (int k = 0; k < dim; ++k) os << ",hatX" << k;
  os << "\n";
  for (const auto& smp : t.samples) {
    os << format_g17(smp.s);
    for (int k = 0; k < dim; ++k) os << "," << format_g17(smp.point.x[k]);
    os << "," << format_g17(smp.b);
    for (int k = 0; k < dim; ++k) os << "," << format_g17(smp.hat_x[k]);
    os << "\n";
  }
  return os.str();
}

LeafTrace leaf_trace_from_csv(const std::string& csv) {
  LeafTrace t;
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("leaf_trace_from_csv: empty input");
  // Count coordinate columns from the header.
  int dim = 0;
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("coord", 0) == 0) ++dim;
    }
  }
  if (dim != 3 && dim != 4)
    throw std::invalid_argument("leaf_trace_from_csv: expected 3 or 4 coordinate columns");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != 2 * dim + 2)
      throw std::invalid_argument("leaf_trace_from_csv: bad column count");
    LeafSample smp;
    smp.s = vals[0];
    smp.point.dim = dim;
    for (int k = 0; k < dim; ++k) smp.point.x[k] = vals[1 + k];
    smp.b = vals[1 + dim];
    for (int k = 0; k < dim; ++k) smp.hat_x[k] = vals[2 + dim + k];
    t.samples.push_back(smp);
  }
  if (!t.samples.empty() && t.samples.size() >= 2)
    t.direction = (t.samples.back().s >= t.samples.front().s) ? +1 : -1;
  return t;
}

void write_leaf_csv(const LeafTrace& t, const std::string& path) {
  atomic_write_file(path, leaf_trace_to_csv(t));
}

ExpansionFit expansion_check(const LeafTrace& trace, const ChartPoint& char_point,
                             double window_lo, double window_hi) {
  ExpansionFit fit;
  if (trace.samples.size() < 8) return fit;

  const int dim = trace.samples.front().point.dim;
  auto dist_to_char = [&](const ChartPoint& q) {
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      double d = q.x[k] - char_point.x[k];
      d2 += d * d;
    }
    return std::sqrt(d2);
  };

  // Decide whether the trace runs toward or away from the characteristic
  // point, then accumulate arc distance sigma from that point.
  double d_first = dist_to_char(trace.samples.front().point);
  double d_last = dist_to_char(trace.samples.back().point);
  const bool toward = d_last < d_first;
  // hatX against the outward direction: traces store hat_x for the field
  // itself, while s carries the signed trace direction.
  fit.orientation = toward ? -trace.direction : trace.direction;

  // Arc-length offset of the closest sample to the characteristic point.
  double s_closest = toward ? trace.samples.back().s : trace.samples.front().s;
  double d_closest = toward ? d_last : d_first;

  std::vector<double> xs, ys;
  for (const auto& smp : trace.samples) {
    double sigma = std::abs(smp.s - s_closest) + d_closest;
    if (sigma < window_lo || sigma > window_hi) continue;
    // Signed drift along the outward direction.
    double b_out = static_cast<double>(fit.orientation) * smp.b;
    if (std::abs(b_out) < 1e-14) continue;
    xs.push_back(sigma);
    ys.push_back(1.0 / b_out);
  }
  if (xs.size() < 5) return fit;
  LinFit lf = linear_fit(xs, ys);
  fit.lambda_hat = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  fit.n_points = lf.n;
  fit.ok = true;
  return fit;
}

}  // namespace foliation
