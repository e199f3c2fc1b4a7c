#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "foliation/diffusion.hpp"
#include "foliation/models.hpp"
#include "foliation/util.hpp"

using namespace foliation;

namespace {

struct ThreadEnvGuard {
  std::string saved;
  bool had = false;
  ThreadEnvGuard() {
    if (const char* v = std::getenv("FOLIATION_THREADS")) {
      saved = v;
      had = true;
    }
  }
  ~ThreadEnvGuard() {
    if (had)
      setenv("FOLIATION_THREADS", saved.c_str(), 1);
    else
      unsetenv("FOLIATION_THREADS");
  }
};

}  // namespace

TEST_CASE("path RNG streams are deterministic and well distributed") {
  PathRng a(42, 7), b(42, 7), c(42, 8);
  bool same = true, differ = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.uniform();
    same = same && (va == b.uniform());
    differ = differ || (va != c.uniform());
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(same);
  CHECK(differ);

  PathRng n(2026, 0);
  const int kDraws = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = n.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / kDraws) < 0.01);
  CHECK(sum2 / kDraws == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("monotone interpolation: exact knots, no overshoot, flat tails") {
  const std::vector<double> xs = {0.0, 1.0, 2.0, 4.0};
  const std::vector<double> ys = {0.0, 0.5, 0.6, 2.0};
  const Pchip f(xs, ys);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(f(xs[i]) == ys[i]);
  double prev = f(0.0);
  for (double x = 0.05; x <= 4.0; x += 0.05) {
    const double v = f(x);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
  CHECK(f(-3.0) == ys.front());
  CHECK(f(9.0) == ys.back());

  const Pchip lin({1.0, 3.0}, {2.0, -4.0});
  CHECK(lin(1.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lin(2.5) == doctest::Approx(-2.5).epsilon(1e-14));

  // linear data stays linear through the monotone limiter
  const Pchip lin2({0.0, 1.0, 2.0, 3.0}, {1.0, 1.5, 2.0, 2.5});
  CHECK(lin2(0.7) == doctest::Approx(1.35).epsilon(1e-13));
  CHECK(lin2(2.2) == doctest::Approx(2.1).epsilon(1e-13));
}

TEST_CASE("reference drifts and their domains") {
  const auto b3 = reference_process(ReferenceKind::Bessel3);
  CHECK(b3.b_of_s(0.7) == doctest::Approx(2.0 / 0.7).epsilon(1e-14));
  CHECK(b3.s_min == 0.0);
  CHECK(std::isinf(b3.s_max));
  CHECK(b3.lower == BoundaryLabel::CharacteristicPoint);
  CHECK(b3.upper == BoundaryLabel::DomainEdge);

  const auto leg = reference_process(ReferenceKind::Legendre3, 1.0);
  CHECK(leg.b_of_s(0.7) == doctest::Approx(2.0 / std::tan(0.7)).epsilon(1e-14));
  CHECK(leg.s_max == doctest::Approx(3.141592653589793).epsilon(1e-15));
  CHECK(leg.upper == BoundaryLabel::CharacteristicPoint);

  const auto hyp = reference_process(ReferenceKind::HyperbolicBessel3, 1.0);
  CHECK(hyp.b_of_s(0.7) == doctest::Approx(2.0 / std::tanh(0.7)).epsilon(1e-14));

  const auto nu3 = reference_process(ReferenceKind::BesselOrder, 3.0);
  for (const double s : {0.2, 0.9, 3.0})
    CHECK(nu3.b_of_s(s) == doctest::Approx(b3.b_of_s(s)).epsilon(1e-14));

  CHECK_THROWS_AS((void)reference_process(ReferenceKind::Legendre3, 0.0),
                  std::invalid_argument);
}

TEST_CASE("the expansion factor rho matches its closed forms") {
  const auto b3 = reference_process(ReferenceKind::Bessel3);
  CHECK(rho(b3, 0.3, 1.0) == doctest::Approx(1.0 / 0.09).epsilon(1e-7));
  const auto leg = reference_process(ReferenceKind::Legendre3, 1.0);
  const double expect_leg = std::pow(std::sin(1.0) / std::sin(0.4), 2.0);
  CHECK(rho(leg, 0.4, 1.0) == doctest::Approx(expect_leg).epsilon(1e-7));
  const auto hyp = reference_process(ReferenceKind::HyperbolicBessel3, 1.0);
  const double expect_hyp = std::pow(std::sinh(1.0) / std::sinh(0.4), 2.0);
  CHECK(rho(hyp, 0.4, 1.0) == doctest::Approx(expect_hyp).epsilon(1e-7));
  const auto nu53 = reference_process(ReferenceKind::BesselOrder, 5.0 / 3.0);
  CHECK(rho(nu53, 0.2, 1.0) == doctest::Approx(std::pow(5.0, 2.0 / 3.0)).epsilon(1e-7));
  CHECK(rho(b3, 1.0, 1.0) == 1.0);
  CHECK_THROWS_AS((void)rho(b3, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)rho(b3, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("boundary classification of the reference processes") {
  SUBCASE("radial order 3: inaccessible by both rules") {
    const auto r = classify_boundary(reference_process(ReferenceKind::Bessel3),
                                     Side::Lower, 0.5);
    CHECK(r.verdict == Verdict::Inaccessible);
    CHECK(r.method == BoundaryMethod::Both);
    CHECK_FALSE(r.disagreement);
    CHECK_FALSE(r.unreliable_fit);
    CHECK(*r.verdict_eigen == Verdict::Inaccessible);
    CHECK(*r.verdict_integral == Verdict::Inaccessible);
    CHECK(r.q_hat == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(r.fit_r2 > 0.999);
    CHECK(r.integral_rho.divergent);
    CHECK_FALSE(r.integral_test2.divergent);
    CHECK(r.integral_test2.value > 0.0);
  }
  SUBCASE("radial order 5: inaccessible, numeric only") {
    const auto r = classify_boundary(
        reference_process(ReferenceKind::BesselOrder, 5.0), Side::Lower);
    CHECK(r.verdict == Verdict::Inaccessible);
    CHECK(r.method == BoundaryMethod::NumericIntegral);
    CHECK(r.q_hat == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(r.lambda_exponent == doctest::Approx(0.25).epsilon(1e-3));
  }
  SUBCASE("radial order 5/3: accessible") {
    const auto r = classify_boundary(
        reference_process(ReferenceKind::BesselOrder, 5.0 / 3.0), Side::Lower, 1.5);
    CHECK(r.verdict == Verdict::Accessible);
    CHECK_FALSE(r.disagreement);
    CHECK(r.q_hat == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
    CHECK_FALSE(r.integral_rho.divergent);
    // int_0^1 t^(-2/3) dt = 3
    CHECK(r.integral_rho.value == doctest::Approx(3.0).epsilon(1e-3));
    CHECK_FALSE(r.integral_test2.divergent);
  }
  SUBCASE("radial order -1: accessible with inward drift") {
    const auto r = classify_boundary(
        reference_process(ReferenceKind::BesselOrder, -1.0), Side::Lower, -0.5);
    CHECK(r.verdict == Verdict::Accessible);
    CHECK_FALSE(r.disagreement);
    CHECK(r.q_hat == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK_FALSE(r.integral_rho.divergent);
    CHECK(r.integral_rho.value == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
    CHECK(r.integral_test2.divergent);
  }
  SUBCASE("trigonometric order 3, upper endpoint") {
    const auto r = classify_boundary(reference_process(ReferenceKind::Legendre3, 1.0),
                                     Side::Upper, 0.5);
    CHECK(r.verdict == Verdict::Inaccessible);
    CHECK_FALSE(r.disagreement);
    CHECK(r.q_hat == doctest::Approx(2.0).epsilon(1e-3));
  }
  SUBCASE("invalid endpoints throw") {
    CHECK_THROWS_AS((void)classify_boundary(reference_process(ReferenceKind::Bessel3),
                                            Side::Upper),
                    std::invalid_argument);
  }
}

TEST_CASE("a traced leaf becomes a one-dimensional diffusion spec") {
  const NamedSurface s = paraboloid(1.0);
  TraceOptions opt;
  opt.direction = -1;
  opt.char_stop = 1e-5;
  const LeafTrace t =
      trace_leaf(s.space.structure, s.spec, spiral_leaf_point(1.0, 0.3, 1.2), opt);
  REQUIRE(t.stop == StopReason::NearCharacteristicPoint);
  const auto spec = spec_from_trace(t, heisenberg_point(0, 0, 0), "paraboloid-leaf");

  CHECK(spec.s_min == 0.0);
  CHECK(spec.s_max == doctest::Approx(1.2).epsilon(0.02));
  CHECK(spec.lower == BoundaryLabel::CharacteristicPoint);
  CHECK(spec.upper == BoundaryLabel::DomainEdge);
  CHECK(spec.data_lo <= 1e-3);
  CHECK(spec.data_hi == spec.s_max);
  for (const double sigma : {0.05, 0.3, 0.8})
    CHECK(spec.b_of_s(sigma) == doctest::Approx(2.0 / sigma).epsilon(1e-3));

  const auto r = classify_boundary(spec, Side::Lower, 0.5);
  CHECK(r.verdict == Verdict::Inaccessible);
  CHECK_FALSE(r.disagreement);
  CHECK(r.q_hat > 1.85);
  CHECK(r.q_hat < 2.05);
  CHECK_THROWS_AS((void)classify_boundary(spec, Side::Upper), std::invalid_argument);
}

TEST_CASE("simulation is reproducible and independent of the thread count") {
  ThreadEnvGuard guard;
  const auto spec = reference_process(ReferenceKind::Legendre3, 1.0);
  SimConfig cfg;
  cfg.s0 = 1.0;
  cfg.dt = 1e-3;
  cfg.t_max = 2.0;
  cfg.n_paths = 400;
  cfg.kill_radius = 1e-2;
  cfg.master_seed = 99;

  setenv("FOLIATION_THREADS", "3", 1);
  const PathStats a = simulate(spec, cfg);
  const std::string ja = path_stats_json(spec, cfg, a).dump();
  setenv("FOLIATION_THREADS", "1", 1);
  const PathStats b = simulate(spec, cfg);
  const std::string jb = path_stats_json(spec, cfg, b).dump();
  CHECK(ja == jb);
  CHECK(a.n_hit == b.n_hit);
  CHECK(a.mean_hit_time == b.mean_hit_time);
  CHECK(a.n_paths == a.n_hit + a.n_survived + a.n_exited_far + a.n_aborted);
  CHECK(a.n_exited_far == 0);  // both endpoints are characteristic points
  CHECK(a.n_hit == a.n_hit_lower + a.n_hit_upper);
  CHECK(a.wilson_lo <= a.hit_fraction);
  CHECK(a.hit_fraction <= a.wilson_hi);
}

TEST_CASE("absorbing behavior matches the drift direction") {
  SUBCASE("strong inward drift: every path is absorbed quickly") {
    const auto spec = reference_process(ReferenceKind::BesselOrder, -1.0);
    SimConfig cfg;
    cfg.s0 = 0.3;
    cfg.dt = 1e-4;
    cfg.t_max = 5.0;
    cfg.n_paths = 300;
    cfg.kill_radius = 1e-3;
    cfg.master_seed = 7;
    const PathStats st = simulate(spec, cfg);
    CHECK(st.hit_fraction >= 0.99);
    CHECK(st.n_hit_lower == st.n_hit);
    CHECK(st.mean_hit_time > 0.0);
  }
  SUBCASE("outward drift from far away: hits are rare") {
    const auto spec = reference_process(ReferenceKind::Bessel3);
    SimConfig cfg;
    cfg.s0 = 0.05;
    cfg.dt = 1e-4;
    cfg.t_max = 5.0;
    cfg.n_paths = 500;
    cfg.kill_radius = 1e-3;
    cfg.master_seed = 12345;
    const PathStats st = simulate(spec, cfg);
    // hit probability is kill_radius / s0 = 0.02
    CHECK(st.n_hit >= 2);
    CHECK(st.n_hit <= 30);
    CHECK(st.n_exited_far == 0);  // upper endpoint at infinity
  }
}

TEST_CASE("simulation input validation") {
  const auto b3 = reference_process(ReferenceKind::Bessel3);
  SimConfig cfg;
  cfg.n_paths = 10;
  cfg.s0 = 5e-4;  // inside the kill band
  CHECK_THROWS_AS((void)simulate(b3, cfg), std::invalid_argument);
  cfg.s0 = 1.0;
  cfg.dt = 0.0;
  CHECK_THROWS_AS((void)simulate(b3, cfg), std::invalid_argument);
  cfg.dt = 1e-3;
  cfg.n_paths = 0;
  CHECK_THROWS_AS((void)simulate(b3, cfg), std::invalid_argument);
  cfg.n_paths = 10;
  cfg.kill_radius = 2.0;
  const auto leg = reference_process(ReferenceKind::Legendre3, 1.0);
  CHECK_THROWS_AS((void)simulate(leg, cfg), std::invalid_argument);  // bands overlap

  LeafDiffusionSpec bad = b3;
  bad.b_of_s = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
  SimConfig c2;
  c2.n_paths = 100;
  c2.t_max = 0.1;
  CHECK_THROWS_AS((void)simulate(bad, c2), std::runtime_error);
}

TEST_CASE("confidence interval helper") {
  const auto ci = wilson_ci_95(5, 100);
  const double z = 1.959963984540054, p = 0.05, n = 100.0;
  const double z2n = z * z / n;
  const double center = (p + z2n / 2.0) / (1.0 + z2n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
  CHECK(ci.first == doctest::Approx(center - half).epsilon(1e-12));
  CHECK(ci.second == doctest::Approx(center + half).epsilon(1e-12));
  CHECK(ci.first <= 0.05);
  CHECK(0.05 <= ci.second);
  CHECK(wilson_ci_95(0, 50).first == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(wilson_ci_95(50, 50).second == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("approach eigenvalue picks the direction-matched eigenvalue") {
  const NamedSurface focus = paraboloid(1.0);
  const auto frep =
      classify(focus.space.structure, focus.spec, heisenberg_point(0, 0, 0));
  CHECK(approach_lambda(frep, {1, 0, 0, 0}) == 0.5);
  CHECK(approach_lambda(frep, {0, 1, 0, 0}) == 0.5);

  const NamedSurface saddle = hyperbolic_paraboloid(1.0);
  const auto srep =
      classify(saddle.space.structure, saddle.spec, heisenberg_point(0, 0, 0));
  CHECK(approach_lambda(srep, {1, 0, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(approach_lambda(srep, {0, 1, 0, 0}) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(approach_lambda(srep, {0.9, 0.2, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-9));

  const NamedSurface deg = hyperbolic_paraboloid(0.5);
  const auto drep =
      classify(deg.space.structure, deg.spec, heisenberg_point(0, 0, 0));
  CHECK_THROWS_AS((void)approach_lambda(drep, {1, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("weighted radial profile and its drift identity") {
  CHECK(weighted_laplacian_h(4.0, 1.0, 0.7) == doctest::Approx(std::sin(0.7)));
  CHECK(weighted_laplacian_h(-4.0, 1.0, 0.7) == doctest::Approx(std::sinh(0.7)));
  CHECK(weighted_laplacian_h(0.0, 1.0, 0.7) == 0.7);
  for (const double kappa : {4.0, 0.0, -4.0}) {
    const double k = std::sqrt(std::abs(kappa)) / 2.0;
    const double kk = kappa == 0.0 ? 1.0 : k;
    const double r = 0.8, h = 1e-6;
    const double fd = (weighted_laplacian_h(kappa, kk, r + h) -
                       weighted_laplacian_h(kappa, kk, r - h)) /
                      (2.0 * h);
    CHECK(weighted_laplacian_h_ratio(kappa, kk, r) ==
          doctest::Approx(2.0 * fd / weighted_laplacian_h(kappa, kk, r)).epsilon(1e-8));
    CHECK(weighted_laplacian_h_ratio(kappa, kk, r) ==
          doctest::Approx(exp_surface_drift(kappa, r)).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)weighted_laplacian_h(4.0, 2.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)weighted_laplacian_h_ratio(-4.0, 0.7, 0.5),
                  std::invalid_argument);
}

TEST_CASE("simulation report carries the spec and config") {
  const auto spec = reference_process(ReferenceKind::Bessel3);
  SimConfig cfg;
  cfg.n_paths = 50;
  cfg.t_max = 0.2;
  cfg.dt = 1e-3;
  cfg.master_seed = 3;
  const auto j = path_stats_json(spec, cfg, simulate(spec, cfg));
  CHECK(j["spec"]["name"] == "bessel3");
  CHECK(j["spec"]["s_max"].is_null());
  CHECK(j["config"]["n_paths"] == 50);
  CHECK(j["config"]["master_seed"] == 3);
  CHECK(j.contains("wilson_ci_95"));
  CHECK(j.contains("mean_hit_time"));

  const auto br = classify_boundary(spec, Side::Lower, 0.5);
  const auto bj = boundary_report_json(br);
  CHECK(bj["verdict"] == "inaccessible");
  CHECK(bj["method"] == "both");
  CHECK(bj["integral_rho"]["divergent"] == true);
  CHECK(bj["fit_window"].size() == 2);
}
