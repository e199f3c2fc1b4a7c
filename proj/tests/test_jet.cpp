#include <doctest.h>

#include <cmath>

#include "foliation/jet.hpp"

using namespace foliation;

namespace {

// f(x, y, z) = sin(x) * exp(y) + z^2 / x, assembled in jets.
template <class S>
Jet2<S> sample_fn(const std::array<Jet2<S>, kMaxDim>& xs) {
  return sin(xs[0]) * exp(xs[1]) + xs[2] * xs[2] / xs[0];
}

}  // namespace

TEST_CASE("hidx packs the upper triangle consistently") {
  CHECK(hidx(0, 0) == 0);
  CHECK(hidx(2, 1) == hidx(1, 2));
  int seen[kHessSize] = {};
  for (int i = 0; i < kMaxDim; ++i)
    for (int j = i; j < kMaxDim; ++j) seen[hidx(i, j)]++;
  for (int k = 0; k < kHessSize; ++k) CHECK(seen[k] == 1);
}

TEST_CASE("dual arithmetic differentiates elementary compositions") {
  const Dual x{0.8, 1.0};  // derivative with respect to x
  const Dual y = sin(x) * exp(x) + pow(x, 2.5);
  const double v = std::sin(0.8) * std::exp(0.8) + std::pow(0.8, 2.5);
  const double d = (std::cos(0.8) + std::sin(0.8)) * std::exp(0.8) +
                   2.5 * std::pow(0.8, 1.5);
  CHECK(y.a == doctest::Approx(v).epsilon(1e-14));
  CHECK(y.b == doctest::Approx(d).epsilon(1e-14));

  const Dual q = atan2(Dual{0.3, 1.0}, Dual{0.7, 0.0});
  CHECK(q.b == doctest::Approx(0.7 / (0.49 + 0.09)).epsilon(1e-14));
}

TEST_CASE("second-order jet matches hand derivatives of a composite") {
  const double x = 1.2, y = -0.4, z = 0.7;
  const auto seeds = seed_point({x, y, z, 0.0}, 3);
  const Jet2d j = sample_fn(seeds);

  const double ex = std::exp(y);
  CHECK(j.v == doctest::Approx(std::sin(x) * ex + z * z / x).epsilon(1e-14));
  // gradient
  CHECK(j.g[0] == doctest::Approx(std::cos(x) * ex - z * z / (x * x)).epsilon(1e-13));
  CHECK(j.g[1] == doctest::Approx(std::sin(x) * ex).epsilon(1e-13));
  CHECK(j.g[2] == doctest::Approx(2.0 * z / x).epsilon(1e-13));
  // Hessian
  CHECK(j.hess(0, 0) ==
        doctest::Approx(-std::sin(x) * ex + 2.0 * z * z / (x * x * x)).epsilon(1e-13));
  CHECK(j.hess(0, 1) == doctest::Approx(std::cos(x) * ex).epsilon(1e-13));
  CHECK(j.hess(0, 2) == doctest::Approx(-2.0 * z / (x * x)).epsilon(1e-13));
  CHECK(j.hess(1, 1) == doctest::Approx(std::sin(x) * ex).epsilon(1e-13));
  CHECK(j.hess(1, 2) == doctest::Approx(0.0));
  CHECK(j.hess(2, 2) == doctest::Approx(2.0 / x).epsilon(1e-13));
}

TEST_CASE("jet functions agree with their defining identities") {
  const auto seeds = seed_point({0.6, 0.0, 0.0, 0.0}, 1);
  const Jet2d t = tan(seeds[0]);
  const Jet2d s = sin(seeds[0]) / cos(seeds[0]);
  CHECK(t.v == doctest::Approx(s.v).epsilon(1e-14));
  CHECK(t.g[0] == doctest::Approx(s.g[0]).epsilon(1e-13));
  CHECK(t.hess(0, 0) == doctest::Approx(s.hess(0, 0)).epsilon(1e-12));

  const Jet2d p = pow(seeds[0], 2.5);
  CHECK(p.g[0] == doctest::Approx(2.5 * std::pow(0.6, 1.5)).epsilon(1e-13));
  CHECK(p.hess(0, 0) == doctest::Approx(2.5 * 1.5 * std::pow(0.6, 0.5)).epsilon(1e-13));

  const Jet2d ip = ipow(seeds[0], 3);
  CHECK(ip.v == doctest::Approx(0.216).epsilon(1e-14));
  CHECK(ip.g[0] == doctest::Approx(3.0 * 0.36).epsilon(1e-13));
  CHECK(ip.hess(0, 0) == doctest::Approx(6.0 * 0.6).epsilon(1e-13));

  const Jet2d lg = log(exp(seeds[0]));
  CHECK(lg.v == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(lg.g[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(lg.hess(0, 0) == doctest::Approx(0.0).epsilon(1e-12));

  const Jet2d as = asin(sin(seeds[0]));
  CHECK(as.g[0] == doctest::Approx(1.0).epsilon(1e-12));
  const Jet2d ac = acos(cos(seeds[0]));
  CHECK(ac.g[0] == doctest::Approx(1.0).epsilon(1e-12));
  const Jet2d at = atan(tan(seeds[0]));
  CHECK(at.g[0] == doctest::Approx(1.0).epsilon(1e-12));

  const Jet2d th = tanh(seeds[0]);
  const Jet2d sh = sinh(seeds[0]) / cosh(seeds[0]);
  CHECK(th.hess(0, 0) == doctest::Approx(sh.hess(0, 0)).epsilon(1e-12));
}

TEST_CASE("dual-seeded jets carry the exact third-order directional slice") {
  // Seed the point along direction v; the Dual part of gradient entry i must
  // equal the Hessian row contraction H_{i.} v, and the Dual part of the
  // Hessian gives third-order data consistent with symmetry.
  const std::array<double, kMaxDim> x{1.1, 0.3, -0.5, 0.0};
  const std::array<double, kMaxDim> v{0.4, -1.2, 0.9, 0.0};
  const auto seeds = seed_point_dir(x, v, 3);
  const Jet2x j = sample_fn(seeds);

  const auto plain = sample_fn(seed_point(x, 3));
  CHECK(j.v.a == doctest::Approx(plain.v).epsilon(1e-14));

  // value derivative along v equals gradient . v
  double gv = 0.0;
  for (int i = 0; i < 3; ++i) gv += plain.g[i] * v[i];
  CHECK(j.v.b == doctest::Approx(gv).epsilon(1e-13));

  for (int i = 0; i < 3; ++i) {
    double hv = 0.0;
    for (int m = 0; m < 3; ++m) hv += plain.hess(i, m) * v[m];
    CHECK(j.g[i].a == doctest::Approx(plain.g[i]).epsilon(1e-13));
    CHECK(j.g[i].b == doctest::Approx(hv).epsilon(1e-12));
  }
}

TEST_CASE("jet_chain composes a scalar profile through an inner jet") {
  const auto seeds = seed_point({0.9, 0.4, 0.0, 0.0}, 2);
  const Jet2d inner = seeds[0] * seeds[1];  // g = x*y
  // f(g) = exp(g); compare jet_chain against the direct exp.
  const Jet2d chained =
      jet_chain(inner, std::exp(inner.v), std::exp(inner.v), std::exp(inner.v));
  const Jet2d direct = exp(inner);
  CHECK(chained.v == doctest::Approx(direct.v).epsilon(1e-14));
  for (int i = 0; i < 2; ++i)
    CHECK(chained.g[i] == doctest::Approx(direct.g[i]).epsilon(1e-13));
  for (int i = 0; i < 2; ++i)
    for (int m = i; m < 2; ++m)
      CHECK(chained.hess(i, m) == doctest::Approx(direct.hess(i, m)).epsilon(1e-13));
}
