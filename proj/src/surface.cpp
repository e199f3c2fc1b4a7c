#include "foliation/surface.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace foliation {

HorizontalGradient horizontal_gradient(const ContactStructure& cs,
                                       const SurfaceSpec& S, const ChartPoint& p) {
  const auto seeds = seeds_for<double>(p);
  const auto U = S.u.re(seeds, p.dim);
  HorizontalGradient hg;
  hg.x1u = apply_jets(cs.X1.re(seeds, p.dim), U, p.dim).v;
  hg.x2u = apply_jets(cs.X2.re(seeds, p.dim), U, p.dim).v;
  hg.x0u = apply_jets(cs.X0.re(seeds, p.dim), U, p.dim).v;
  hg.norm = std::hypot(hg.x1u, hg.x2u);
  return hg;
}

SurfaceSpec normalize_u(const ContactStructure& cs, const SurfaceSpec& S) {
  const ScalarField x0u = apply_field(cs.X0, S.u);
  SurfaceSpec out;
  out.name = S.name + "/normalized";
  out.chart = S.chart;
  out.u = {[ur = S.u.re, vr = x0u.re](const JetVec<double>& xs, int dim) {
             return ur(xs, dim) / vr(xs, dim);
           },
           [ud = S.u.du, vd = x0u.du](const JetVec<Dual>& xs, int dim) {
             return ud(xs, dim) / vd(xs, dim);
           }};
  return out;
}

std::array<std::array<double, 2>, 2> hessJ(const ContactStructure& cs,
                                           const SurfaceSpec& S, const ChartPoint& p) {
  const ScalarField f1 = apply_field(cs.X1, S.u);
  const ScalarField f2 = apply_field(cs.X2, S.u);
  const double h11 = apply_field_value(cs.X1, f1, p);
  const double h12 = apply_field_value(cs.X1, f2, p);
  const double h21 = apply_field_value(cs.X2, f1, p);
  const double h22 = apply_field_value(cs.X2, f2, p);
  return {{{h12, -h11}, {h22, -h21}}};
}

std::string point_class_name(PointClass c) {
  switch (c) {
    case PointClass::EllipticFocus: return "EllipticFocus";
    case PointClass::EllipticNode: return "EllipticNode";
    case PointClass::HyperbolicSaddle: return "HyperbolicSaddle";
    case PointClass::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

namespace {

EigenDirection eigen_direction(const ContactStructure& cs, const ChartPoint& x,
                               const std::array<std::array<double, 2>, 2>& m,
                               double lambda) {
  EigenDirection d;
  d.lambda = lambda;
  double v1 = m[0][1], v2 = lambda - m[0][0];
  if (std::hypot(v1, v2) < 1e-14 * (1.0 + std::abs(lambda))) {
    v1 = lambda - m[1][1];
    v2 = m[1][0];
  }
  const double n = std::hypot(v1, v2);
  d.frame = {v1 / n, v2 / n};
  const auto e1 = eval_vector(cs.X1, x);
  const auto e2 = eval_vector(cs.X2, x);
  double an = 0.0;
  for (int i = 0; i < x.dim; ++i) {
    d.ambient[i] = d.frame[0] * e1[i] + d.frame[1] * e2[i];
    an += d.ambient[i] * d.ambient[i];
  }
  an = std::sqrt(an);
  for (int i = 0; i < x.dim; ++i) d.ambient[i] /= an;
  return d;
}

}  // namespace

CharacteristicPointReport classify(const ContactStructure& cs, const SurfaceSpec& S,
                                   const ChartPoint& x, double tol) {
  const auto hg = horizontal_gradient(cs, S, x);
  if (hg.norm > 1e-5)
    throw std::invalid_argument("classify: point is not characteristic (|grad_H u| = " +
                                std::to_string(hg.norm) + ")");

  CharacteristicPointReport rep;
  rep.location = x;

  SurfaceSpec work = S;
  if (std::abs(hg.x0u - 1.0) > tol) {
    if (std::abs(hg.x0u) < 1e-12) {
      rep.cls = PointClass::Degenerate;
      return rep;
    }
    work = normalize_u(cs, S);
    rep.normalized = true;
  }

  rep.hess_j = hessJ(cs, work, x);
  const auto& m = rep.hess_j;
  rep.det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  rep.trace = m[0][0] + m[1][1];
  const double disc = rep.trace * rep.trace - 4.0 * rep.det;

  if (std::abs(rep.det) <= tol) {
    rep.cls = PointClass::Degenerate;
    const double lam = rep.trace;  // nonzero eigenvalue when det = 0
    rep.eigenvalues = {std::complex<double>(lam, 0.0), std::complex<double>(0.0, 0.0)};
    return rep;
  }

  if (disc < -tol) {
    const double im = std::sqrt(-disc) / 2.0;
    rep.eigenvalues = {std::complex<double>(rep.trace / 2.0, im),
                       std::complex<double>(rep.trace / 2.0, -im)};
    rep.cls = PointClass::EllipticFocus;
    return rep;
  }

  const double rt = std::sqrt(std::max(disc, 0.0));
  const double l1 = (rep.trace + rt) / 2.0;
  const double l2 = (rep.trace - rt) / 2.0;
  rep.eigenvalues = {std::complex<double>(l1, 0.0), std::complex<double>(l2, 0.0)};
  rep.directions.push_back(eigen_direction(cs, x, m, l1));
  if (rt > tol) rep.directions.push_back(eigen_direction(cs, x, m, l2));

  if (rep.det < -tol) {
    rep.cls = PointClass::HyperbolicSaddle;
  } else if (l1 > 0.0 && l1 < 1.0 && l2 > 0.0 && l2 < 1.0) {
    rep.cls = PointClass::EllipticNode;
  } else {
    rep.cls = PointClass::Degenerate;
  }
  return rep;
}

namespace {

struct NewtonEval {
  Eigen::VectorXd g;       // residual vector
  Eigen::MatrixXd jac;     // rows = gradients
  double u = 0.0;
  double crit = 0.0;
  double constraint = 0.0;
};

NewtonEval eval_system(const ContactStructure& cs, const SurfaceSpec& S,
                       const std::array<double, kMaxDim>& x, int dim) {
  ChartPoint p = make_chart_point(cs.chart, x);
  const auto seeds = seeds_for<double>(p);
  const auto U = S.u.re(seeds, dim);
  const auto f1 = apply_jets(cs.X1.re(seeds, dim), U, dim);
  const auto f2 = apply_jets(cs.X2.re(seeds, dim), U, dim);
  const int rows = dim == 3 ? 3 : 4;

  NewtonEval ev;
  ev.g.resize(rows);
  ev.jac.resize(rows, dim);
  ev.g(0) = U.v;
  ev.g(1) = f1.v;
  ev.g(2) = f2.v;
  for (int i = 0; i < dim; ++i) {
    ev.jac(0, i) = U.g[i];
    ev.jac(1, i) = f1.g[i];
    ev.jac(2, i) = f2.g[i];
  }
  if (rows == 4) {
    ev.g(3) = chart_constraint(cs.chart, x);
    const auto gc = chart_constraint_grad(cs.chart, x);
    for (int i = 0; i < dim; ++i) ev.jac(3, i) = gc[i];
  }
  ev.u = U.v;
  ev.crit = std::hypot(f1.v, f2.v);
  ev.constraint = rows == 4 ? ev.g(3) : 0.0;
  return ev;
}

}  // namespace

FindResult find_characteristic_points(const ContactStructure& cs, const SurfaceSpec& S,
                                      const FindOptions& opt) {
  const int dim = chart_dim(cs.chart);
  FindResult res;

  std::vector<std::array<double, kMaxDim>> seeds;
  const int n = std::max(opt.grid_per_axis, 2);
  std::array<int, kMaxDim> idx{};
  const int axes = dim;
  while (true) {
    std::array<double, kMaxDim> x{};
    for (int a = 0; a < axes; ++a)
      x[a] = opt.lo[a] + (opt.hi[a] - opt.lo[a]) * idx[a] / double(n - 1);
    if (dim == 3) {
      seeds.push_back(x);
    } else {
      ProjectOptions po;
      po.max_initial_residual = 1e9;  // seeding only; roots re-verified below
      if (auto p = project_to_chart(cs.chart, x, po)) seeds.push_back(p->x);
    }
    int a = 0;
    for (; a < axes; ++a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
    if (a == axes) break;
  }
  for (const auto& p : opt.extra_seeds) seeds.push_back(p.x);
  res.n_seeds = static_cast<int>(seeds.size());

  std::vector<ChartPoint> found;
  for (auto x : seeds) {
    bool converged = false;
    NewtonEval ev = eval_system(cs, S, x, dim);
    for (int iter = 0; iter < opt.max_iter; ++iter) {
      const double gn = ev.g.norm();
      if (gn <= opt.residual_tol) {
        converged = true;
        break;
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(ev.jac,
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-12);
      Eigen::VectorXd step = svd.solve(ev.g);
      if (!step.allFinite()) break;
      double scale = 1.0;
      bool improved = false;
      for (int half = 0; half < 12; ++half) {
        auto xn = x;
        for (int i = 0; i < dim; ++i) xn[i] -= scale * step(i);
        NewtonEval en = eval_system(cs, S, xn, dim);
        if (en.g.norm() < gn) {
          x = xn;
          ev = std::move(en);
          improved = true;
          break;
        }
        scale *= 0.5;
      }
      if (!improved) break;
    }
    if (!converged) {
      // Accept high-precision near-roots that meet the published contract.
      converged = std::abs(ev.u) <= 1e-10 && ev.crit <= 1e-8 &&
                  std::abs(ev.constraint) <= 1e-10;
    }
    if (!converged) continue;
    if (std::abs(ev.u) > 1e-10 || ev.crit > 1e-8 || std::abs(ev.constraint) > 1e-10)
      continue;
    ++res.n_converged;
    ChartPoint p = make_chart_point(cs.chart, x);
    bool dup = false;
    for (const auto& q : found)
      if (dist(p, q) <= opt.dedup_radius) { dup = true; break; }
    if (!dup) found.push_back(p);
  }

  std::sort(found.begin(), found.end(), [](const ChartPoint& a, const ChartPoint& b) {
    for (int i = 0; i < a.dim; ++i)
      if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    return false;
  });
  res.points = std::move(found);
  return res;
}

VectorField foliation_field(const ContactStructure& cs, const SurfaceSpec& S) {
  auto fn = [u = S.u, X1 = cs.X1, X2 = cs.X2](const auto& xs, int dim) {
    using SS = std::decay_t<decltype(xs[0].v)>;
    const auto U = field_fn<SS>(u)(xs, dim);
    const auto e1 = field_fn<SS>(X1)(xs, dim);
    const auto e2 = field_fn<SS>(X2)(xs, dim);
    const auto j1 = apply_jets(e1, U, dim);
    const auto j2 = apply_jets(e2, U, dim);
    const auto n = sqrt(j1 * j1 + j2 * j2);
    JetVec<SS> out{};
    for (int k = 0; k < dim; ++k) out[k] = (j2 * e1[k] - j1 * e2[k]) / n;
    return out;
  };
  return vector_field("hatX[" + S.name + "]", fn);
}

VectorField foliation_field_perp(const ContactStructure& cs, const SurfaceSpec& S) {
  auto fn = [u = S.u, X1 = cs.X1, X2 = cs.X2](const auto& xs, int dim) {
    using SS = std::decay_t<decltype(xs[0].v)>;
    const auto U = field_fn<SS>(u)(xs, dim);
    const auto e1 = field_fn<SS>(X1)(xs, dim);
    const auto e2 = field_fn<SS>(X2)(xs, dim);
    const auto j1 = apply_jets(e1, U, dim);
    const auto j2 = apply_jets(e2, U, dim);
    const auto n = sqrt(j1 * j1 + j2 * j2);
    JetVec<SS> out{};
    for (int k = 0; k < dim; ++k) out[k] = (j2 * e2[k] + j1 * e1[k]) / n;
    return out;
  };
  return vector_field("J(hatX)[" + S.name + "]", fn);
}

ScalarField drift_field(const ContactStructure& cs, const SurfaceSpec& S) {
  auto fn = [u = S.u, X1 = cs.X1, X2 = cs.X2, X0 = cs.X0](const auto& xs, int dim) {
    using SS = std::decay_t<decltype(xs[0].v)>;
    const auto U = field_fn<SS>(u)(xs, dim);
    const auto j1 = apply_jets(field_fn<SS>(X1)(xs, dim), U, dim);
    const auto j2 = apply_jets(field_fn<SS>(X2)(xs, dim), U, dim);
    const auto j0 = apply_jets(field_fn<SS>(X0)(xs, dim), U, dim);
    return j0 / sqrt(j1 * j1 + j2 * j2);
  };
  return scalar_field(fn);
}

double drift_b(const ContactStructure& cs, const SurfaceSpec& S, const ChartPoint& p) {
  return eval_value(drift_field(cs, S), p);
}

double drift_tangency_residual(const ContactStructure& cs, const SurfaceSpec& S,
                               const ChartPoint& p) {
  const double b = drift_b(cs, S, p);
  const auto jp = eval_vector(foliation_field_perp(cs, S), p);
  const auto x0 = eval_vector(cs.X0, p);
  const auto ug = eval_jet(S.u, p);
  double r = 0.0;
  for (int i = 0; i < p.dim; ++i) r += (b * jp[i] - x0[i]) * ug.g[i];
  return std::abs(r);
}

}  // namespace foliation
