#include <doctest.h>

#include <cmath>

#include "foliation/models.hpp"
#include "foliation/surface.hpp"
#include "oracles.hpp"

using namespace foliation;

TEST_CASE("horizontal gradient of the su2 sphere matches the analytic frame pairing") {
  const double k = 1.3;
  const NamedSurface s = su2_sphere(k);
  const ChartPoint p = s.sample(0.4, 0.2);
  const auto g = horizontal_gradient(s.space.structure, s.spec, p);
  // u = w; X1 u = k*y, X2 u = -k*x, X0 u = -2k^2 z on the chart.
  CHECK(g.x1u == doctest::Approx(k * p.x[1]).epsilon(1e-12));
  CHECK(g.x2u == doctest::Approx(-k * p.x[0]).epsilon(1e-12));
  CHECK(g.x0u == doctest::Approx(-2.0 * k * k * p.x[2]).epsilon(1e-12));
  CHECK(g.norm == doctest::Approx(k * std::hypot(p.x[0], p.x[1])).epsilon(1e-12));
}

TEST_CASE("frame Hessian of the paraboloid at the origin") {
  const NamedSurface s = paraboloid(1.0);
  const auto h = hessJ(s.space.structure, s.spec, heisenberg_point(0, 0, 0));
  CHECK(h[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h[0][1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h[1][0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(h[1][1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("classification: paraboloid focus, node at a=0") {
  const auto rep = classify(paraboloid(1.0).space.structure, paraboloid(1.0).spec,
                            heisenberg_point(0, 0, 0));
  CHECK(rep.cls == PointClass::EllipticFocus);
  CHECK(rep.trace == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.det == doctest::Approx(0.25 + 4.0).epsilon(1e-10));
  CHECK(rep.eigenvalues[0].real() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(rep.eigenvalues[0].imag()) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(rep.directions.empty());
  CHECK_FALSE(rep.normalized);  // X0 u = 1 already

  const auto rep0 = classify(paraboloid(0.0).space.structure, paraboloid(0.0).spec,
                             heisenberg_point(0, 0, 0));
  CHECK(rep0.cls == PointClass::EllipticNode);
  CHECK(rep0.eigenvalues[0].real() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep0.eigenvalues[0].imag() == doctest::Approx(0.0));
}

TEST_CASE("classification: hyperbolic paraboloid eigenstructure") {
  const NamedSurface s = hyperbolic_paraboloid(1.0);
  const auto rep = classify(s.space.structure, s.spec, heisenberg_point(0, 0, 0));
  CHECK(rep.cls == PointClass::HyperbolicSaddle);
  REQUIRE(rep.directions.size() == 2);
  // diag(1/2 - a, 1/2 + a) with eigenvectors along the coordinate axes
  double lam_x = 0.0, lam_y = 0.0;
  for (const auto& d : rep.directions) {
    if (std::abs(d.ambient[0]) > std::abs(d.ambient[1]))
      lam_x = d.lambda;
    else
      lam_y = d.lambda;
  }
  CHECK(lam_x == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(lam_y == doctest::Approx(1.5).epsilon(1e-10));

  const NamedSurface n = hyperbolic_paraboloid(0.25);
  const auto rep2 = classify(n.space.structure, n.spec, heisenberg_point(0, 0, 0));
  CHECK(rep2.cls == PointClass::EllipticNode);
  REQUIRE(rep2.directions.size() == 2);
  const double lo = std::min(rep2.directions[0].lambda, rep2.directions[1].lambda);
  const double hi = std::max(rep2.directions[0].lambda, rep2.directions[1].lambda);
  CHECK(lo == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(hi == doctest::Approx(0.75).epsilon(1e-10));

  const NamedSurface d = hyperbolic_paraboloid(0.5);
  CHECK(d.warning.has_value());
  const auto rep3 = classify(d.space.structure, d.spec, heisenberg_point(0, 0, 0));
  CHECK(rep3.cls == PointClass::Degenerate);
}

TEST_CASE("classification normalizes by X0 u and reports it") {
  const NamedSurface s = spheroid(1.0, 1.0);
  for (const double zc : {1.0, -1.0}) {
    const auto rep =
        classify(s.space.structure, s.spec, heisenberg_point(0, 0, zc));
    CHECK(rep.normalized);  // X0 u = 2 z != 1 at the poles
    CHECK(rep.cls == PointClass::EllipticFocus);
    CHECK(rep.trace == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("classification is invariant under u -> -u") {
  const NamedSurface s = paraboloid(0.25);
  SurfaceSpec flipped = s.spec;
  const ScalarField u = s.spec.u;
  flipped.u = scalar_field([u](const auto& xs, int dim) {
    using S = std::decay_t<decltype(xs[0].v)>;
    return jet_const(S(0.0), dim) - field_fn<S>(u)(xs, dim);
  });
  const auto a = classify(s.space.structure, s.spec, heisenberg_point(0, 0, 0));
  const auto b = classify(s.space.structure, flipped, heisenberg_point(0, 0, 0));
  CHECK(a.cls == b.cls);
  CHECK(a.trace == doctest::Approx(b.trace).epsilon(1e-12));
  CHECK(a.det == doctest::Approx(b.det).epsilon(1e-12));
}

TEST_CASE("characteristic point search finds exactly the expected sets") {
  SUBCASE("paraboloid") {
    const NamedSurface s = paraboloid(1.0);
    const auto found = find_characteristic_points(s.space.structure, s.spec);
    REQUIRE(found.points.size() == 1);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(found.points[0].x[i]) <= 1e-10);
  }
  SUBCASE("spheroid") {
    const NamedSurface s = spheroid(1.0, 1.0);
    const auto found = find_characteristic_points(s.space.structure, s.spec);
    REQUIRE(found.points.size() == 2);
    CHECK(std::abs(std::abs(found.points[0].x[2]) - 1.0) <= 1e-10);
    CHECK(std::abs(std::abs(found.points[1].x[2]) - 1.0) <= 1e-10);
    CHECK(found.points[0].x[2] * found.points[1].x[2] < 0.0);
  }
  SUBCASE("su2 sphere") {
    const NamedSurface s = su2_sphere(1.0);
    FindOptions opt;
    opt.grid_per_axis = 7;
    const auto found = find_characteristic_points(s.space.structure, s.spec, opt);
    REQUIRE(found.points.size() == 2);
    for (const auto& p : found.points) {
      CHECK(std::abs(std::abs(p.x[2]) - 1.0) <= 1e-9);
      CHECK(std::abs(p.x[3]) <= 1e-9);
    }
  }
  SUBCASE("sl2 plane") {
    const NamedSurface s = sl2_plane(1.0);
    FindOptions opt;
    opt.grid_per_axis = 7;
    const auto found = find_characteristic_points(s.space.structure, s.spec, opt);
    REQUIRE(found.points.size() == 2);
    for (const auto& p : found.points) {
      CHECK(std::abs(std::abs(p.x[0]) - 1.0) <= 1e-9);
      CHECK(std::abs(p.x[1]) <= 1e-9);
      CHECK(std::abs(p.x[2]) <= 1e-9);
    }
  }
}

TEST_CASE("foliation field is horizontal unit and the drift is tangent") {
  for (const NamedSurface& s :
       {paraboloid(1.0), spheroid(1.0, 1.0), su2_sphere(1.0), sl2_plane(1.0)}) {
    CAPTURE(s.name);
    const VectorField hat = foliation_field(s.space.structure, s.spec);
    for (int i = 0; i < 6; ++i) {
      const ChartPoint p = s.sample((i + 0.5) / 6.0, 0.31 * i);
      const auto v = eval_vector(hat, p);
      const auto dec = frame_decompose(s.space.structure, p, v);
      REQUIRE(dec.ok);
      CHECK(dec.c.d1 * dec.c.d1 + dec.c.d2 * dec.c.d2 ==
            doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(dec.c.d0) <= 1e-10);
      // hatX u = 0: the field is tangent to the surface
      const Dual du = eval_dir(s.spec.u, p, v);
      CHECK(std::abs(du.b) <= 1e-9);
      CHECK(drift_tangency_residual(s.space.structure, s.spec, p) <= 1e-9);
    }
  }
}

TEST_CASE("drift matches a finite-difference flow derivative route") {
  // b = X0 u / |grad_H u|: check the jet-computed pieces against FD partials.
  const NamedSurface s = paraboloid(0.25);
  const ChartPoint p = s.sample(0.4, 0.15);
  const auto g = horizontal_gradient(s.space.structure, s.spec, p);
  const auto e1 = eval_vector(s.space.structure.X1, p);
  const auto fd_x1u = oracle::fd_dir(
      [&](const ChartPoint& q) { return eval_value(s.spec.u, q); }, p, e1);
  CHECK(g.x1u == doctest::Approx(fd_x1u).epsilon(1e-9));
  CHECK(drift_b(s.space.structure, s.spec, p) ==
        doctest::Approx(g.x0u / g.norm).epsilon(1e-12));
}
