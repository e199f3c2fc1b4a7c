#include "foliation/models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace foliation {

namespace {

constexpr double kPi = std::numbers::pi;

template <class S>
JetVec<S> comps(std::initializer_list<Jet2<S>> parts) {
  JetVec<S> out{};
  int i = 0;
  for (const auto& p : parts) out[i++] = p;
  return out;
}

}  // namespace

ModelSpace heisenberg() {
  ModelSpace m;
  m.name = "heisenberg";
  m.kappa = 0.0;
  m.k = 0.0;
  m.structure.chart = ChartId::Heisenberg;
  m.structure.X1 = vector_field("X1", [](const auto& xs, int dim) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({jet_const(S(1.0), dim), jet_const(S(0.0), dim), -xs[1] * 0.5});
  });
  m.structure.X2 = vector_field("X2", [](const auto& xs, int dim) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({jet_const(S(0.0), dim), jet_const(S(1.0), dim), xs[0] * 0.5});
  });
  m.structure.X0 = vector_field("X0", [](const auto& xs, int dim) {
    using S = std::decay_t<decltype(xs[0].v)>;
    (void)xs;
    return comps<S>({jet_const(S(0.0), dim), jet_const(S(0.0), dim), jet_const(S(1.0), dim)});
  });
  m.structure.omega = one_form([](const auto& xs, int dim) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[1] * 0.5, -xs[0] * 0.5, jet_const(S(1.0), dim)});
  });
  return m;
}

ModelSpace su2(double k) {
  ModelSpace m;
  m.name = "su2";
  m.kappa = 4.0 * k * k;
  m.k = k;
  m.structure.chart = ChartId::SU2;
  m.structure.X1 = vector_field("X1", [k](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[2] * k, -xs[3] * k, -xs[0] * k, xs[1] * k});
  });
  m.structure.X2 = vector_field("X2", [k](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[3] * k, xs[2] * k, -xs[1] * k, -xs[0] * k});
  });
  const double kk2 = 2.0 * k * k;
  m.structure.X0 = vector_field("X0", [kk2](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[1] * kk2, -xs[0] * kk2, xs[3] * kk2, -xs[2] * kk2});
  });
  const double w = 1.0 / (2.0 * k * k);
  m.structure.omega = one_form([w](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[1] * w, -xs[0] * w, xs[3] * w, -xs[2] * w});
  });
  return m;
}

ModelSpace sl2(double k) {
  ModelSpace m;
  m.name = "sl2";
  m.kappa = -4.0 * k * k;
  m.k = k;
  m.structure.chart = ChartId::SL2;
  m.structure.X1 = vector_field("X1", [k](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[0] * k, -xs[1] * k, xs[2] * k, -xs[3] * k});
  });
  m.structure.X2 = vector_field("X2", [k](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[1] * k, xs[0] * k, xs[3] * k, xs[2] * k});
  });
  const double kk2 = 2.0 * k * k;
  m.structure.X0 = vector_field("X0", [kk2](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({-xs[1] * kk2, xs[0] * kk2, -xs[3] * kk2, xs[2] * kk2});
  });
  const double w = 1.0 / (4.0 * k * k);
  m.structure.omega = one_form([w](const auto& xs, int) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return comps<S>({xs[2] * w, xs[3] * w, -xs[0] * w, -xs[1] * w});
  });
  return m;
}

std::optional<ModelSpace> make_model(const std::string& name, double k) {
  if (name == "heisenberg") return heisenberg();
  if (name == "su2") return su2(k);
  if (name == "sl2") return sl2(k);
  return std::nullopt;
}

NamedSurface paraboloid(double a) {
  NamedSurface s;
  s.name = "paraboloid";
  s.space = heisenberg();
  s.params = {{"a", a}};
  s.spec.name = "paraboloid(a=" + std::to_string(a) + ")";
  s.spec.chart = ChartId::Heisenberg;
  s.spec.u = scalar_field([a](const auto& xs, int) {
    return xs[2] - (xs[0] * xs[0] + xs[1] * xs[1]) * a;
  });
  const double scale = std::sqrt(1.0 + 16.0 * a * a);
  s.closed_form_b = [scale](const ChartPoint& p) -> std::optional<double> {
    const double r = std::hypot(p.x[0], p.x[1]);
    if (r < 1e-12) return std::nullopt;
    return 2.0 / (r * scale);
  };
  s.expected_characteristic_points = {heisenberg_point(0.0, 0.0, 0.0)};
  s.sample = [a](double t1, double t2) {
    const double r = 0.15 + 1.45 * t1;
    const double th = 2.0 * kPi * t2;
    return heisenberg_point(r * std::cos(th), r * std::sin(th), a * r * r);
  };
  return s;
}

NamedSurface spheroid(double a, double c) {
  NamedSurface s;
  s.name = "spheroid";
  s.space = heisenberg();
  s.params = {{"a", a}, {"c", c}};
  s.spec.name = "spheroid(a=" + std::to_string(a) + ",c=" + std::to_string(c) + ")";
  s.spec.chart = ChartId::Heisenberg;
  const double ic2 = 1.0 / (c * c);
  s.spec.u = scalar_field([a, ic2](const auto& xs, int) {
    return xs[0] * xs[0] + xs[1] * xs[1] + (xs[2] * xs[2]) * ic2 - a * a;
  });
  s.closed_form_b = [a, c](const ChartPoint& p) -> std::optional<double> {
    const double ct = p.x[2] / (a * c);
    if (std::abs(ct) >= 1.0 - 1e-12) return std::nullopt;
    const double theta = std::acos(ct);
    return 2.0 / std::tan(theta) / std::sqrt(4.0 * c * c + a * a * ct * ct);
  };
  s.expected_characteristic_points = {heisenberg_point(0.0, 0.0, a * c),
                                      heisenberg_point(0.0, 0.0, -a * c)};
  s.sample = [a, c](double t1, double t2) {
    const double theta = 0.35 + (kPi - 0.7) * t1;
    const double phi = 2.0 * kPi * t2;
    return heisenberg_point(a * std::sin(theta) * std::cos(phi),
                            a * std::sin(theta) * std::sin(phi),
                            a * c * std::cos(theta));
  };
  return s;
}

NamedSurface hyperbolic_paraboloid(double a) {
  NamedSurface s;
  s.name = "hyperbolic-paraboloid";
  s.space = heisenberg();
  s.params = {{"a", a}};
  s.spec.name = "hyperbolic-paraboloid(a=" + std::to_string(a) + ")";
  s.spec.chart = ChartId::Heisenberg;
  s.spec.u = scalar_field([a](const auto& xs, int) { return xs[2] - xs[0] * xs[1] * a; });
  if (std::abs(a - 0.5) < 1e-9)
    s.warning = "a = 1/2 degenerates the characteristic point into a line";
  // Field drift on the two axes; elsewhere no closed form is attached.
  s.closed_form_b = [a](const ChartPoint& p) -> std::optional<double> {
    const double x = p.x[0], y = p.x[1];
    if (std::abs(x) < 1e-12 && std::abs(y) > 1e-12)
      return 1.0 / ((0.5 + a) * std::abs(y));
    if (std::abs(y) < 1e-12 && std::abs(x) > 1e-12)
      return 1.0 / (std::abs(0.5 - a) * std::abs(x));
    return std::nullopt;
  };
  s.expected_characteristic_points = {heisenberg_point(0.0, 0.0, 0.0)};
  s.sample = [a](double t1, double t2) {
    const double r = 0.2 + 1.1 * t1;
    const double th = 2.0 * kPi * t2;
    const double x = r * std::cos(th), y = r * std::sin(th);
    return heisenberg_point(x, y, a * x * y);
  };
  return s;
}

NamedSurface su2_sphere(double k) {
  NamedSurface s;
  s.name = "su2-sphere";
  s.space = su2(k);
  s.params = {{"k", k}};
  s.spec.name = "su2-sphere(k=" + std::to_string(k) + ")";
  s.spec.chart = ChartId::SU2;
  s.spec.u = scalar_field([](const auto& xs, int) { return xs[3]; });
  s.closed_form_b = [k](const ChartPoint& p) -> std::optional<double> {
    const double rho = std::hypot(p.x[0], p.x[1]);
    if (rho < 1e-12) return std::nullopt;
    return -2.0 * k * p.x[2] / rho;
  };
  s.expected_characteristic_points = {
      make_chart_point(ChartId::SU2, {0.0, 0.0, 1.0, 0.0}),
      make_chart_point(ChartId::SU2, {0.0, 0.0, -1.0, 0.0})};
  s.sample = [k](double t1, double t2) {
    const double theta = (0.35 + (kPi - 0.7) * t1) / k;
    const double phi = 2.0 * kPi * t2;
    return make_chart_point(ChartId::SU2,
                            {std::sin(k * theta) * std::cos(phi),
                             std::sin(k * theta) * std::sin(phi),
                             std::cos(k * theta), 0.0});
  };
  return s;
}

NamedSurface sl2_plane(double k) {
  NamedSurface s;
  s.name = "sl2-plane";
  s.space = sl2(k);
  s.params = {{"k", k}};
  s.spec.name = "sl2-plane(k=" + std::to_string(k) + ")";
  s.spec.chart = ChartId::SL2;
  s.spec.u = scalar_field([](const auto& xs, int) { return xs[1] - xs[2]; });
  s.closed_form_b = [k](const ChartPoint& p) -> std::optional<double> {
    const double half = (p.x[0] + p.x[3]) / 2.0;
    if (std::abs(half) <= 1.0 + 1e-12) return std::nullopt;
    const double r = std::acosh(std::abs(half)) / k;
    const double sign = half > 0.0 ? 1.0 : -1.0;
    return sign * 2.0 * k / std::tanh(k * r);
  };
  s.expected_characteristic_points = {
      make_chart_point(ChartId::SL2, {-1.0, 0.0, 0.0, -1.0}),
      make_chart_point(ChartId::SL2, {1.0, 0.0, 0.0, 1.0})};
  s.sample = [k](double t1, double t2) {
    const double r = 0.15 + 1.35 * t1;
    const double th = 2.0 * kPi * t2;
    const double ch = std::cosh(k * r), sh = std::sinh(k * r);
    return make_chart_point(ChartId::SL2,
                            {ch + sh * std::cos(th), sh * std::sin(th),
                             sh * std::sin(th), ch - sh * std::cos(th)});
  };
  return s;
}

NamedSurface canonical_exp_surface(double kappa) {
  const double k = std::sqrt(std::abs(kappa)) / 2.0;
  NamedSurface s;
  s.params = {{"kappa", kappa}};
  if (kappa == 0.0) {
    s = paraboloid(0.0);
    s.params = {{"kappa", 0.0}};
    s.name = "exp-surface";
    s.spec.name = "exp-surface(kappa=0)";
    s.closed_form_b = [](const ChartPoint& p) -> std::optional<double> {
      const double r = std::hypot(p.x[0], p.x[1]);
      if (r < 1e-12) return std::nullopt;
      return 2.0 / r;
    };
    return s;
  }
  if (kappa > 0.0) {
    s.name = "exp-surface";
    s.space = su2(k);
    s.spec.name = "exp-surface(kappa=" + std::to_string(kappa) + ")";
    s.spec.chart = ChartId::SU2;
    // u = -w orients the foliation field outward from the identity, so the
    // drift along exponential rays is +2k cot(kr).
    s.spec.u = scalar_field([](const auto& xs, int) { return -xs[3]; });
    s.closed_form_b = [k](const ChartPoint& p) -> std::optional<double> {
      const double rho = std::hypot(p.x[0], p.x[1]);
      if (rho < 1e-12) return std::nullopt;
      return 2.0 * k * p.x[2] / rho;
    };
    s.expected_characteristic_points = {
        make_chart_point(ChartId::SU2, {0.0, 0.0, 1.0, 0.0}),
        make_chart_point(ChartId::SU2, {0.0, 0.0, -1.0, 0.0})};
    const NamedSurface base = su2_sphere(k);
    s.sample = base.sample;
    s.params = {{"kappa", kappa}};
    return s;
  }
  s = sl2_plane(k);
  s.name = "exp-surface";
  s.spec.name = "exp-surface(kappa=" + std::to_string(kappa) + ")";
  s.params = {{"kappa", kappa}};
  return s;
}

std::vector<std::string> builtin_surface_names() {
  return {"paraboloid", "spheroid", "hyperbolic-paraboloid",
          "su2-sphere", "sl2-plane", "exp-surface"};
}

std::optional<NamedSurface> make_surface(const std::string& name,
                                         const std::map<std::string, double>& params) {
  auto get = [&params](const std::string& key, double dflt) {
    const auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (name == "paraboloid") return paraboloid(get("a", 1.0));
  if (name == "spheroid") return spheroid(get("a", 1.0), get("c", 1.0));
  if (name == "hyperbolic-paraboloid") return hyperbolic_paraboloid(get("a", 1.0));
  if (name == "su2-sphere") return su2_sphere(get("k", 1.0));
  if (name == "sl2-plane") return sl2_plane(get("k", 1.0));
  if (name == "exp-surface") return canonical_exp_surface(get("kappa", 4.0));
  return std::nullopt;
}

ChartPoint spiral_leaf_point(double a, double psi, double s) {
  const double scale = std::sqrt(1.0 + 16.0 * a * a);
  const double r = s / scale;
  const double theta = 4.0 * a * std::log(r) + psi;
  const double z = a * s * s / (scale * scale);
  return heisenberg_point(r * std::cos(theta), r * std::sin(theta), z);
}

double spheroid_arclength(double a, double c, double theta) {
  const auto f = [a, c](double t) {
    const double ct = std::cos(t);
    return std::sqrt(4.0 * c * c + a * a * ct * ct);
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, 0.0, theta, 15, 1e-10, &err);
}

double spheroid_theta_from_arclength(double a, double c, double s) {
  // ds/dtheta is positive and bounded; safeguarded Newton.
  double lo = 0.0, hi = kPi;
  double theta = s / std::sqrt(4.0 * c * c + a * a / 2.0);
  theta = std::clamp(theta, 1e-8, kPi - 1e-8);
  for (int i = 0; i < 60; ++i) {
    const double g = spheroid_arclength(a, c, theta) - s;
    if (std::abs(g) < 1e-12) break;
    if (g > 0) hi = theta; else lo = theta;
    const double ct = std::cos(theta);
    const double deriv = std::sqrt(4.0 * c * c + a * a * ct * ct);
    double next = theta - g / deriv;
    if (next <= lo || next >= hi) next = (lo + hi) / 2.0;
    theta = next;
  }
  return theta;
}

double loxodrome_cos_angle(double a, double c, double theta) {
  const double ct = std::cos(theta), st = std::sin(theta);
  return -2.0 * c /
         std::sqrt(a * a * ct * ct + a * a * c * c * st * st + 4.0 * c * c);
}

std::pair<double, double> axis_bessel_orders(double a) {
  return {1.0 + 2.0 / (1.0 + 2.0 * a), 1.0 + 2.0 / (1.0 - 2.0 * a)};
}

ChartPoint exp_surface_point(double kappa, double r, double theta, double step) {
  const double k = std::sqrt(std::abs(kappa)) / 2.0;
  ModelSpace m = kappa == 0.0 ? heisenberg() : (kappa > 0.0 ? su2(k) : sl2(k));
  const double ct = std::cos(theta), st = std::sin(theta);
  VectorField V = vector_field(
      "ray", [ct, st, X1 = m.structure.X1, X2 = m.structure.X2](const auto& xs, int dim) {
        using S = std::decay_t<decltype(xs[0].v)>;
        const auto e1 = field_fn<S>(X1)(xs, dim);
        const auto e2 = field_fn<S>(X2)(xs, dim);
        JetVec<S> out{};
        for (int i = 0; i < dim; ++i) out[i] = e1[i] * ct + e2[i] * st;
        return out;
      });

  ChartPoint p = kappa == 0.0 ? heisenberg_point(0.0, 0.0, 0.0)
                 : (kappa > 0.0 ? make_chart_point(ChartId::SU2, {0.0, 0.0, 1.0, 0.0})
                                : make_chart_point(ChartId::SL2, {1.0, 0.0, 0.0, 1.0}));
  const int n = std::max(1, static_cast<int>(std::ceil(r / step)));
  const double h = r / n;
  for (int i = 0; i < n; ++i) {
    const auto eval_at = [&](const std::array<double, kMaxDim>& x) {
      return eval_vector(V, make_chart_point(p.chart, x));
    };
    const auto k1 = eval_at(p.x);
    std::array<double, kMaxDim> tmp{};
    for (int j = 0; j < p.dim; ++j) tmp[j] = p.x[j] + 0.5 * h * k1[j];
    const auto k2 = eval_at(tmp);
    for (int j = 0; j < p.dim; ++j) tmp[j] = p.x[j] + 0.5 * h * k2[j];
    const auto k3 = eval_at(tmp);
    for (int j = 0; j < p.dim; ++j) tmp[j] = p.x[j] + h * k3[j];
    const auto k4 = eval_at(tmp);
    for (int j = 0; j < p.dim; ++j)
      p.x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    if (p.dim == 4) {
      const auto proj = project_to_chart(p.chart, p.x);
      if (!proj) throw std::runtime_error("exp_surface_point: projection failed");
      p = *proj;
    }
  }
  return make_chart_point(p.chart, p.x);
}

double exp_surface_drift(double kappa, double r) {
  const double k = std::sqrt(std::abs(kappa)) / 2.0;
  if (kappa > 0.0) return 2.0 * k / std::tan(k * r);
  if (kappa < 0.0) return 2.0 * k / std::tanh(k * r);
  return 2.0 / r;
}

}  // namespace foliation
