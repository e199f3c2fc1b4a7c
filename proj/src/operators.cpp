#include "foliation/operators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "foliation/util.hpp"

namespace foliation {

namespace {

// Every quantity the operator family needs, assembled once per evaluation
// point over a swappable scalar type. Component jets are exact through the
// gradient, which is exactly what value-level directional derivatives of the
// assembled scalars consume.
template <class S>
struct Bundle {
  int dim = 3;
  Jet2<S> ju, j1, j2, j0;  // u and its frame derivatives
  Jet2<S> n, b;
  JetVec<S> e1{}, e2{}, e0{};
  JetVec<S> f1{}, fperp{}, f2{};
  S norm2{};                 // (X1u)^2 + (X2u)^2
  S F1b{}, F2b{};
  S hF1{}, etaF1{}, b1{};
};

// Frame coefficients (d1, d2, d0) of v via the Gram normal equations, value
// arithmetic only. The model frames are uniformly well conditioned.
template <class S>
std::array<S, 3> decompose_values(const JetVec<S>& e1, const JetVec<S>& e2,
                                  const JetVec<S>& e0, const std::array<S, kMaxDim>& v,
                                  int dim) {
  const JetVec<S>* cols[3] = {&e1, &e2, &e0};
  S A[3][3];
  S r[3];
  for (int a = 0; a < 3; ++a) {
    for (int c = a; c < 3; ++c) {
      S s = S(0.0);
      for (int i = 0; i < dim; ++i) s += (*cols[a])[i].v * (*cols[c])[i].v;
      A[a][c] = s;
      A[c][a] = s;
    }
    S s = S(0.0);
    for (int i = 0; i < dim; ++i) s += (*cols[a])[i].v * v[i];
    r[a] = s;
  }
  const S det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  std::array<S, 3> out{};
  for (int c = 0; c < 3; ++c) {
    S M[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) M[a][b] = (b == c) ? r[a] : A[a][b];
    const S num = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                  M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                  M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    out[c] = num / det;
  }
  return out;
}

template <class S>
Bundle<S> make_bundle(const ContactStructure& cs, const SurfaceSpec& surf,
                      const JetVec<S>& seeds, int dim) {
  Bundle<S> B;
  B.dim = dim;
  B.e1 = field_fn<S>(cs.X1)(seeds, dim);
  B.e2 = field_fn<S>(cs.X2)(seeds, dim);
  B.e0 = field_fn<S>(cs.X0)(seeds, dim);
  B.ju = field_fn<S>(surf.u)(seeds, dim);
  B.j1 = apply_jets(B.e1, B.ju, dim);
  B.j2 = apply_jets(B.e2, B.ju, dim);
  B.j0 = apply_jets(B.e0, B.ju, dim);
  const Jet2<S> n2 = B.j1 * B.j1 + B.j2 * B.j2;
  B.norm2 = n2.v;
  B.n = sqrt(n2);
  B.b = B.j0 / B.n;
  for (int k = 0; k < dim; ++k) {
    B.f1[k] = (B.j2 * B.e1[k] - B.j1 * B.e2[k]) / B.n;
    B.fperp[k] = (B.j2 * B.e2[k] + B.j1 * B.e1[k]) / B.n;
    B.f2[k] = B.b * B.fperp[k] - B.e0[k];
  }
  B.F1b = S(0.0);
  B.F2b = S(0.0);
  for (int k = 0; k < dim; ++k) {
    B.F1b += B.f1[k].v * B.b.g[k];
    B.F2b += B.f2[k].v * B.b.g[k];
  }
  // Bracket values [F1, J(F1)] and [X0, F1] from the exact component
  // gradients, then their horizontal frame coefficients.
  std::array<S, kMaxDim> br_jrot{};
  std::array<S, kMaxDim> br_reeb{};
  for (int k = 0; k < dim; ++k) {
    S a = S(0.0), c = S(0.0);
    for (int j = 0; j < dim; ++j) {
      a += B.f1[j].v * B.fperp[k].g[j] - B.fperp[j].v * B.f1[k].g[j];
      c += B.e0[j].v * B.f1[k].g[j] - B.f1[j].v * B.e0[k].g[j];
    }
    br_jrot[k] = a;
    br_reeb[k] = c;
  }
  const auto d_jrot = decompose_values(B.e1, B.e2, B.e0, br_jrot, dim);
  const auto d_reeb = decompose_values(B.e1, B.e2, B.e0, br_reeb, dim);
  // F1 = c1 X1 + c2 X2 with (c1, c2) = (X2u, -X1u)/|grad_H u|.
  const S c1 = B.j2.v / B.n.v;
  const S c2 = S(0.0) - B.j1.v / B.n.v;
  B.hF1 = S(0.0) - (d_jrot[0] * c1 + d_jrot[1] * c2);
  B.etaF1 = S(0.0) - (d_reeb[0] * c1 + d_reeb[1] * c2);
  B.b1 = S(0.0) - B.b.v * B.hF1 - B.etaF1;
  return B;
}

Bundle<double> bundle_at(const OperatorContext& ctx, const ChartPoint& p) {
  const auto seeds = seeds_for<double>(p);
  Bundle<double> B = make_bundle<double>(ctx.cs, ctx.surf, seeds, p.dim);
  if (std::abs(B.ju.v) > ctx.on_surface_tol ||
      std::abs(chart_constraint(p)) > ctx.on_surface_tol)
    throw std::invalid_argument("operators: point is off the surface");
  if (B.n.v < ctx.min_criterion)
    throw std::invalid_argument("operators: point is too close to a characteristic point");
  return B;
}

// Directional derivative along the ambient vector v of a scalar assembled
// from the bundle. G: (const Bundle<Dual>&) -> Dual.
template <class G>
double bundle_dir(const OperatorContext& ctx, const ChartPoint& p,
                  const std::array<double, kMaxDim>& v, G&& get) {
  JetVec<Dual> seeds{};
  for (int i = 0; i < p.dim; ++i) seeds[i] = jet_var(Dual(p.x[i], v[i]), i, p.dim);
  const Bundle<Dual> B = make_bundle<Dual>(ctx.cs, ctx.surf, seeds, p.dim);
  return get(B).b;
}

// Same, for scalars that also consume a test function's jet.
template <class G>
double bundle_dir_f(const OperatorContext& ctx, const ScalarField& f, const ChartPoint& p,
                    const std::array<double, kMaxDim>& v, G&& get) {
  JetVec<Dual> seeds{};
  for (int i = 0; i < p.dim; ++i) seeds[i] = jet_var(Dual(p.x[i], v[i]), i, p.dim);
  const Bundle<Dual> B = make_bundle<Dual>(ctx.cs, ctx.surf, seeds, p.dim);
  const Jet2<Dual> jf = f.du(seeds, p.dim);
  return get(B, jf).b;
}

template <class S>
S directional_of(const Bundle<S>& B, const JetVec<S>& comp, const Jet2<S>& jf) {
  S r = S(0.0);
  for (int k = 0; k < B.dim; ++k) r += comp[k].v * jf.g[k];
  return r;
}

std::array<double, kMaxDim> values_of(const JetVec<double>& comp, int dim) {
  std::array<double, kMaxDim> out{};
  for (int k = 0; k < dim; ++k) out[k] = comp[k].v;
  return out;
}

}  // namespace

OperatorContext make_operators(const ContactStructure& cs, const SurfaceSpec& surf) {
  return OperatorContext{cs, surf, 1e-10, 1e-7};
}

FramePoint frame_point(const OperatorContext& ctx, const ChartPoint& p) {
  const Bundle<double> B = bundle_at(ctx, p);
  FramePoint fp;
  fp.dim = p.dim;
  fp.u = B.ju.v;
  fp.x1u = B.j1.v;
  fp.x2u = B.j2.v;
  fp.x0u = B.j0.v;
  fp.norm = B.n.v;
  fp.b = B.b.v;
  fp.F1 = values_of(B.f1, p.dim);
  fp.F1perp = values_of(B.fperp, p.dim);
  fp.F2 = values_of(B.f2, p.dim);
  fp.F1b = B.F1b;
  fp.F2b = B.F2b;
  fp.hF1 = B.hF1;
  fp.etaF1 = B.etaF1;
  fp.b1 = B.b1;
  fp.b2 = -B.b.v;
  return fp;
}

double a_eps_value(const OperatorContext& ctx, const ChartPoint& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("a_eps: eps must be positive");
  const Bundle<double> B = bundle_at(ctx, p);
  return 1.0 / std::sqrt(B.b.v * B.b.v + 1.0 / eps);
}

double g_eps(const OperatorContext& ctx, const std::array<double, kMaxDim>& v,
             const std::array<double, kMaxDim>& w, const ChartPoint& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("g_eps: eps must be positive");
  const FrameDecomposition dv = frame_decompose(ctx.cs, p, v);
  const FrameDecomposition dw = frame_decompose(ctx.cs, p, w);
  if (!dv.ok || !dw.ok) throw std::invalid_argument("g_eps: frame decomposition failed");
  return dv.c.d1 * dw.c.d1 + dv.c.d2 * dw.c.d2 + dv.c.d0 * dw.c.d0 / eps;
}

double delta0_apply(const OperatorContext& ctx, const ScalarField& f, const ChartPoint& p) {
  const Bundle<double> B = bundle_at(ctx, p);
  const Jet2d jf = f.re(seeds_for<double>(p), p.dim);
  const double f1f = directional_of(B, B.f1, jf);
  const double f1f1f = bundle_dir_f(
      ctx, f, p, values_of(B.f1, p.dim),
      [](const Bundle<Dual>& D, const Jet2<Dual>& jfd) { return directional_of(D, D.f1, jfd); });
  return f1f1f + B.b.v * f1f;
}

double delta_eps_apply(const OperatorContext& ctx, const ScalarField& f,
                       const ChartPoint& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("delta_eps: eps must be positive");
  const Bundle<double> B = bundle_at(ctx, p);
  const Jet2d jf = f.re(seeds_for<double>(p), p.dim);
  const double b = B.b.v;
  const double den = eps * b * b + 1.0;
  const double aa = eps / den;                      // a_eps^2
  const double f1a_over_a = -eps * b * B.F1b / den;  // F1(a_eps)/a_eps

  const double f1f = directional_of(B, B.f1, jf);
  const double f2f = directional_of(B, B.f2, jf);
  const double f1f1f = bundle_dir_f(
      ctx, f, p, values_of(B.f1, p.dim),
      [](const Bundle<Dual>& D, const Jet2<Dual>& jfd) { return directional_of(D, D.f1, jfd); });
  const double f2f2f = bundle_dir_f(
      ctx, f, p, values_of(B.f2, p.dim),
      [](const Bundle<Dual>& D, const Jet2<Dual>& jfd) { return directional_of(D, D.f2, jfd); });

  return f1f1f + aa * f2f2f + (b - f1a_over_a) * f1f -
         aa * (b * B.hF1 + B.etaF1) * f2f;
}

double gauss_k0(const OperatorContext& ctx, const ChartPoint& p) {
  const Bundle<double> B = bundle_at(ctx, p);
  return -B.F1b - B.b.v * B.b.v;
}

double gauss_k_eps(const OperatorContext& ctx, const ChartPoint& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("gauss_k_eps: eps must be positive");
  const Bundle<double> B = bundle_at(ctx, p);
  const double b = B.b.v;
  const double den = eps * b * b + 1.0;

  // Second derivative of b along F1 and the F2 derivative of b1, both by
  // dual-number directional evaluation of exactly assembled scalars.
  const double f1f1b = bundle_dir(ctx, p, values_of(B.f1, p.dim),
                                  [](const Bundle<Dual>& D) { return D.F1b; });
  const double f2b1 = bundle_dir(ctx, p, values_of(B.f2, p.dim),
                                 [](const Bundle<Dual>& D) { return D.b1; });

  const double f1a_over_a = -eps * b * B.F1b / den;
  const double c1 = -b + f1a_over_a;
  // F1(F1(a)/a) via the closed form; F1(b F1(b)) = (F1 b)^2 + b F1^2 b.
  const double f1_f1a_over_a = -eps * (B.F1b * B.F1b + b * f1f1b) / den +
                               2.0 * eps * eps * b * b * B.F1b * B.F1b / (den * den);
  const double f1c1 = -B.F1b + f1_f1a_over_a;
  // a F2(a b1) = (a F2(a)) b1 + a^2 F2(b1) with a F2(a) in closed form.
  const double a_f2a = -eps * eps * b * B.F2b / (den * den);
  const double aa = eps / den;
  const double af2ab1 = a_f2a * B.b1 + aa * f2b1;
  const double ab1_sq = aa * B.b1 * B.b1;  // (a b1)^2

  return f1c1 - af2ab1 - ab1_sq - c1 * c1;
}

double riccati_residual(const OperatorContext& ctx, const ChartPoint& p) {
  const Bundle<double> B = bundle_at(ctx, p);
  // The drift derivative by the dual route against K0 built from the jet
  // route; agreement validates both derivative paths.
  const double f1b_dual = bundle_dir(ctx, p, values_of(B.f1, p.dim),
                                     [](const Bundle<Dual>& D) { return D.b.v; });
  const double k0 = -B.F1b - B.b.v * B.b.v;
  return f1b_dual + B.b.v * B.b.v + k0;
}

ConvergenceStudy convergence_study(const OperatorContext& ctx, const ScalarField& f,
                                   const std::vector<ChartPoint>& points,
                                   const std::vector<double>& eps_list) {
  if (points.empty() || eps_list.empty())
    throw std::invalid_argument("convergence_study: needs points and eps values");
  const std::size_t np = points.size();
  const std::size_t ne = eps_list.size();

  // Row slot (e, i) fixed up front; workers fill disjoint slots.
  std::vector<double> d0(np, 0.0);
  std::vector<double> de(np * ne, 0.0);
  parallel_for(np, [&](std::size_t i) {
    d0[i] = delta0_apply(ctx, f, points[i]);
    for (std::size_t e = 0; e < ne; ++e)
      de[e * np + i] = delta_eps_apply(ctx, f, points[i], eps_list[e]);
  });

  ConvergenceStudy out;
  out.summary.eps = eps_list;
  out.summary.max_error.assign(ne, 0.0);
  out.rows.reserve(np * ne);
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t i = 0; i < np; ++i) {
      OperatorSample s;
      s.point = points[i];
      s.epsilon = eps_list[e];
      s.delta_eps_f = de[e * np + i];
      s.delta0_f = d0[i];
      s.error = std::abs(s.delta_eps_f - s.delta0_f);
      out.summary.max_error[e] = std::max(out.summary.max_error[e], s.error);
      out.rows.push_back(s);
    }
  }
  for (std::size_t e = 0; e + 1 < ne; ++e) {
    const double re = out.summary.max_error[e] / out.summary.max_error[e + 1];
    out.summary.order.push_back(std::log(re) / std::log(eps_list[e] / eps_list[e + 1]));
  }
  if (ne >= 2) {
    std::vector<double> lx(ne), ly(ne);
    for (std::size_t e = 0; e < ne; ++e) {
      lx[e] = std::log(eps_list[e]);
      ly[e] = std::log(out.summary.max_error[e]);
    }
    out.summary.overall_slope = linear_fit(lx, ly).slope;
  }
  return out;
}

std::string convergence_csv(const ConvergenceStudy& study) {
  const int dim = study.rows.empty() ? 3 : study.rows.front().point.dim;
  std::ostringstream os;
  os << "eps";
  for (int k = 0; k < dim; ++k) os << ",coord" << k;
  os << ",delta_eps,delta0,error\n";
  for (const auto& r : study.rows) {
    os << format_g17(r.epsilon);
    for (int k = 0; k < dim; ++k) os << "," << format_g17(r.point.x[k]);
    os << "," << format_g17(r.delta_eps_f) << "," << format_g17(r.delta0_f) << ","
       << format_g17(r.error) << "\n";
  }
  return os.str();
}

std::vector<CurvatureSample> curvature_sweep(const OperatorContext& ctx,
                                             const std::vector<ChartPoint>& points,
                                             const std::vector<double>& eps_list) {
  std::vector<CurvatureSample> rows(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    CurvatureSample s;
    s.point = points[i];
    s.k0 = gauss_k0(ctx, points[i]);
    s.riccati = riccati_residual(ctx, points[i]);
    s.k_eps.reserve(eps_list.size());
    for (double e : eps_list) s.k_eps.push_back(gauss_k_eps(ctx, points[i], e));
    rows[i] = std::move(s);
  });
  return rows;
}

std::string curvature_csv(const std::vector<CurvatureSample>& rows,
                          const std::vector<double>& eps_list) {
  const int dim = rows.empty() ? 3 : rows.front().point.dim;
  std::ostringstream os;
  os << "eps";
  for (int k = 0; k < dim; ++k) os << ",coord" << k;
  os << ",K_eps,K0,riccati_residual\n";
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    for (const auto& r : rows) {
      os << format_g17(eps_list[e]);
      for (int k = 0; k < dim; ++k) os << "," << format_g17(r.point.x[k]);
      os << "," << format_g17(r.k_eps[e]) << "," << format_g17(r.k0) << ","
         << format_g17(r.riccati) << "\n";
    }
  }
  return os.str();
}

ScalarField bump_field(const ChartPoint& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("bump_field: radius must be positive");
  std::array<double, kMaxDim> c{};
  for (int k = 0; k < center.dim; ++k) c[k] = center.x[k];
  const double inv_r2 = 1.0 / (radius * radius);
  return scalar_field([c, inv_r2](const auto& seeds, int dim) {
    using S = decltype(seeds[0].v);
    Jet2<S> t = jet_const(S(0.0), dim);
    for (int k = 0; k < dim; ++k) {
      const Jet2<S> dx = seeds[k] - S(c[k]);
      t = t + dx * dx;
    }
    t = t * S(inv_r2);
    if (value_of(t.v) >= 1.0 - 1e-13) return jet_const(S(0.0), dim);
    const Jet2<S> one = jet_const(S(1.0), dim);
    return exp(one - inv(one - t));
  });
}

}  // namespace foliation
