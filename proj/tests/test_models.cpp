#include <doctest.h>

#include <cmath>

#include "foliation/models.hpp"
#include "foliation/surface.hpp"
#include "oracles.hpp"

using namespace foliation;

namespace {

std::vector<NamedSurface> all_builtin() {
  return {paraboloid(0.7),  spheroid(1.0, 1.0),        spheroid(1.0, 1.4),
          hyperbolic_paraboloid(0.25), su2_sphere(1.2), sl2_plane(0.8),
          canonical_exp_surface(4.0),  canonical_exp_surface(-4.0),
          canonical_exp_surface(0.0)};
}

}  // namespace

TEST_CASE("surface registry resolves names and defaults") {
  for (const auto& name : builtin_surface_names()) {
    auto s = make_surface(name, {});
    REQUIRE(s.has_value());
    CHECK(s->name == name);
  }
  CHECK_FALSE(make_surface("torus", {}).has_value());
  CHECK(make_surface("paraboloid", {{"a", 0.25}})->params.at("a") == 0.25);
  CHECK(make_surface("exp-surface", {})->params.at("kappa") == 4.0);
  CHECK(make_model("su2", 1.3)->kappa == doctest::Approx(4.0 * 1.3 * 1.3));
  CHECK(make_model("sl2", 0.5)->kappa == doctest::Approx(-1.0));
  CHECK_FALSE(make_model("so3", 1.0).has_value());
}

TEST_CASE("samplers stay on the surface and the closed-form drift matches") {
  for (const NamedSurface& s : all_builtin()) {
    CAPTURE(s.spec.name);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 3; ++j) {
        const ChartPoint p = s.sample((i + 0.5) / 5.0, (j + 0.31) / 3.0);
        CHECK(std::abs(eval_value(s.spec.u, p)) <= 1e-10);
        CHECK(std::abs(p.constraint_residual) <= 1e-10);
        if (s.name == "hyperbolic-paraboloid") continue;  // axes only
        const auto cf = s.closed_form_b(p);
        REQUIRE(cf.has_value());
        const double b = drift_b(s.space.structure, s.spec, p);
        CHECK(std::abs(b - *cf) <= 1e-9 * std::max(1.0, std::abs(*cf)));
      }
    }
  }
}

TEST_CASE("closed-form drift on the hyperbolic paraboloid axes") {
  const NamedSurface s = hyperbolic_paraboloid(1.0);
  for (const double t : {0.3, 0.7, 1.1}) {
    const ChartPoint px = heisenberg_point(t, 0, 0);
    CHECK(drift_b(s.space.structure, s.spec, px) ==
          doctest::Approx(*s.closed_form_b(px)).epsilon(1e-10));
    CHECK(*s.closed_form_b(px) == doctest::Approx(2.0 / t).epsilon(1e-12));
    const ChartPoint py = heisenberg_point(0, t, 0);
    CHECK(drift_b(s.space.structure, s.spec, py) ==
          doctest::Approx(*s.closed_form_b(py)).epsilon(1e-10));
    CHECK(*s.closed_form_b(py) == doctest::Approx(1.0 / (1.5 * t)).epsilon(1e-12));
  }
  CHECK_FALSE(s.closed_form_b(heisenberg_point(0.4, 0.5, 0.2)).has_value());
}

TEST_CASE("declared characteristic points are characteristic and classifiable") {
  for (const NamedSurface& s : all_builtin()) {
    CAPTURE(s.spec.name);
    REQUIRE_FALSE(s.expected_characteristic_points.empty());
    for (const ChartPoint& p : s.expected_characteristic_points) {
      CHECK(std::abs(eval_value(s.spec.u, p)) <= 1e-12);
      CHECK(horizontal_gradient(s.space.structure, s.spec, p).norm <= 1e-12);
      const auto rep = classify(s.space.structure, s.spec, p);
      CHECK(rep.cls != PointClass::Degenerate);
    }
  }
  const NamedSurface d = hyperbolic_paraboloid(0.5);
  CHECK(classify(d.space.structure, d.spec, heisenberg_point(0, 0, 0)).cls ==
        PointClass::Degenerate);
}

TEST_CASE("spiral leaf points lie on the paraboloid at unit planar speed") {
  const double a = 0.25, psi = -1.1;
  const NamedSurface s = paraboloid(a);
  for (const double arc : {0.3, 0.9, 1.7}) {
    const ChartPoint p = spiral_leaf_point(a, psi, arc);
    CHECK(std::abs(eval_value(s.spec.u, p)) <= 1e-12);
    // drift equals 2/arc along the spiral
    CHECK(drift_b(s.space.structure, s.spec, p) ==
          doctest::Approx(2.0 / arc).epsilon(1e-10));
    const double h = 1e-5;
    const ChartPoint q1 = spiral_leaf_point(a, psi, arc + h);
    const ChartPoint q0 = spiral_leaf_point(a, psi, arc - h);
    const double speed =
        std::hypot(q1.x[0] - q0.x[0], q1.x[1] - q0.x[1]) / (2.0 * h);
    CHECK(speed == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("spheroid leaf arc length inverts and has the right pole slope") {
  const double a = 1.0, c = 1.4;
  for (const double theta : {0.2, 0.8, 1.5, 2.6}) {
    const double arc = spheroid_arclength(a, c, theta);
    CHECK(spheroid_theta_from_arclength(a, c, arc) ==
          doctest::Approx(theta).epsilon(1e-9));
  }
  // ds/dtheta = sqrt(a^2 cos^2 theta + 4 c^2); at the pole with a = c = 1
  // the slope is sqrt(5).
  CHECK(spheroid_arclength(1.0, 1.0, 1e-4) / 1e-4 ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));
  const double h = 1e-5, th = 1.1;
  const double fd = (spheroid_arclength(a, c, th + h) -
                     spheroid_arclength(a, c, th - h)) /
                    (2.0 * h);
  CHECK(fd == doctest::Approx(std::sqrt(a * a * std::cos(th) * std::cos(th) +
                                        4.0 * c * c))
                  .epsilon(1e-8));
}

TEST_CASE("leaves are loxodromes exactly on the round spheroid") {
  const double a = 0.8;
  const double expected = -2.0 / std::sqrt(a * a + 4.0);
  for (const double theta : {0.3, 0.9, 1.6, 2.4})
    CHECK(loxodrome_cos_angle(a, 1.0, theta) ==
          doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(loxodrome_cos_angle(a, 1.4, 0.4) -
                 loxodrome_cos_angle(a, 1.4, 1.2)) > 1e-3);
}

TEST_CASE("axis reference-process orders") {
  const auto saddle = axis_bessel_orders(1.0);
  CHECK(saddle.first == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(saddle.second == doctest::Approx(-1.0).epsilon(1e-12));
  const auto node = axis_bessel_orders(0.25);
  CHECK(node.first == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(node.second == doctest::Approx(5.0).epsilon(1e-12));
  const auto flat = axis_bessel_orders(0.0);
  CHECK(flat.first == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(flat.second == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("group exponential rays match their closed forms") {
  SUBCASE("positive curvature") {
    const double kappa = 4.0;  // k = 1
    for (const double r : {0.3, 0.9}) {
      for (const double th : {0.0, 2.1}) {
        const ChartPoint p = exp_surface_point(kappa, r, th);
        CHECK(std::abs(p.x[0] - std::sin(r) * std::cos(th)) <= 1e-9);
        CHECK(std::abs(p.x[1] - std::sin(r) * std::sin(th)) <= 1e-9);
        CHECK(std::abs(p.x[2] - std::cos(r)) <= 1e-9);
        CHECK(std::abs(p.x[3]) <= 1e-9);
      }
    }
  }
  SUBCASE("negative curvature") {
    const double kappa = -4.0;
    for (const double r : {0.4, 1.1}) {
      for (const double th : {0.0, 1.3}) {
        const ChartPoint p = exp_surface_point(kappa, r, th);
        const double ch = std::cosh(r), sh = std::sinh(r);
        CHECK(std::abs(p.x[0] - (ch + sh * std::cos(th))) <= 1e-9);
        CHECK(std::abs(p.x[1] - sh * std::sin(th)) <= 1e-9);
        CHECK(std::abs(p.x[2] - sh * std::sin(th)) <= 1e-9);
        CHECK(std::abs(p.x[3] - (ch - sh * std::cos(th))) <= 1e-9);
      }
    }
  }
  SUBCASE("flat") {
    const ChartPoint p = exp_surface_point(0.0, 0.8, 0.6);
    CHECK(std::abs(p.x[0] - 0.8 * std::cos(0.6)) <= 1e-10);
    CHECK(std::abs(p.x[1] - 0.8 * std::sin(0.6)) <= 1e-10);
    CHECK(std::abs(p.x[2]) <= 1e-10);
  }
}

TEST_CASE("exp-surface foliation field is the radial ray field") {
  for (const double kappa : {4.0, -4.0, 0.0}) {
    CAPTURE(kappa);
    const NamedSurface s = canonical_exp_surface(kappa);
    const VectorField hat = foliation_field(s.space.structure, s.spec);
    for (const double r : {0.4, 0.9}) {
      for (const double th : {0.7, 3.9}) {
        const ChartPoint p = exp_surface_point(kappa, r, th);
        CHECK(std::abs(eval_value(s.spec.u, p)) <= 1e-9);
        const auto dec = frame_decompose(s.space.structure, p, eval_vector(hat, p));
        REQUIRE(dec.ok);
        // parallel to cos(th) X1 + sin(th) X2, outward
        CHECK(std::abs(dec.c.d1 * std::sin(th) - dec.c.d2 * std::cos(th)) <= 1e-8);
        CHECK(dec.c.d1 * std::cos(th) + dec.c.d2 * std::sin(th) ==
              doctest::Approx(1.0).epsilon(1e-8));
        // drift along the ray
        CHECK(drift_b(s.space.structure, s.spec, p) ==
              doctest::Approx(exp_surface_drift(kappa, r)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("flat exp-surface is the flat paraboloid with radial drift") {
  const NamedSurface s = canonical_exp_surface(0.0);
  CHECK(s.name == "exp-surface");
  CHECK(s.params.at("kappa") == 0.0);
  const ChartPoint p = heisenberg_point(0.3, 0.4, 0.0);
  CHECK(*s.closed_form_b(p) == doctest::Approx(4.0).epsilon(1e-12));  // 2/r, r=1/2
}
