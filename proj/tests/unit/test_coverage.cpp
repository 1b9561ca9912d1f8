#include <doctest.h>

#include <cmath>

#include "tethercov/coverage.hpp"

using namespace tethercov;
using doctest::Approx;

TEST_SUITE("coverage") {
  const Scenario s = Scenario::dense_urban();

  TEST_CASE("terrestrial kernel") {
    SnrThreshold none;
    none.beta = 15.0;
    CHECK(kernel_tbs(none, s.link, 100.0, 10.0) == 1.0);
    // beta_bar_b = 1.1915e-7 for the dense-urban defaults, exp(-beta_bar_b * 10100^1.5) by mpmath.
    CHECK(s.threshold.beta_bar_b == Approx(1.191492352086422e-7).epsilon(1e-12));
    CHECK(kernel_tbs(s.threshold, s.link, 100.0, 10.0) == Approx(0.88608629525347199).epsilon(1e-12));
    double prev = 2.0;
    for (double r = 0.0; r < 400.0; r += 10.0) {
      const double k = kernel_tbs(s.threshold, s.link, r, 10.0);
      CHECK(k < prev);
      prev = k;
    }
  }

  TEST_CASE("aerial kernel") {
    LinkParams link = s.link;
    link.eta_los = 1.0;
    SnrThreshold th;
    th.beta_bar_u = 0.35;
    // m = 2, x = m * 0.35 * 1 * 1 = 0.7: Gamma(2, x) / Gamma(2) = (1 + x) e^-x
    CHECK(kernel_uav(th, link, 1.0, 0.0, true) == Approx(0.84419501644539617).epsilon(1e-14));
    link.m = 1;
    CHECK(kernel_uav(th, link, 1.0, 0.0, true) == Approx(std::exp(-0.35)).epsilon(1e-14));
    for (double r : {0.0, 50.0, 200.0}) {
      CHECK(kernel_uav(s.threshold, s.link, r, 100.0, true) >= kernel_uav(s.threshold, s.link, r, 100.0, false));
    }
  }

  TEST_CASE("TBS link coverage") {
    const double p = coverage_tbs(s).value;
    CHECK(p == Approx(0.467265).epsilon(2e-6));  // matches MC within its standard error
    Scenario tiny = s;
    tiny.hotspot.radius = 1e-3;
    CHECK(coverage_tbs(tiny).value == Approx(kernel_tbs(s.threshold, s.link, 170.0, 10.0)).epsilon(1e-6));
    CHECK(coverage_tbs(s).breakdown.unavailable == p);
  }

  TEST_CASE("UAV access coverage") {
    CHECK(coverage_uav_access(s, {0, 0, 5000}).value < 1e-6);
    const auto r = coverage_uav_access(s, {0, 0, 100});
    CHECK(r.value == Approx(r.breakdown.uav_los + r.breakdown.uav_nlos));
    CHECK_THROWS_AS(coverage_uav_access(s, {0, 0, 0}), GeometryError);
  }

  TEST_CASE("backhaul coverage") {
    CHECK(coverage_backhaul(s, {170, 0, 10.001}) == Approx(1.0).epsilon(1e-6));
    double prev = 2.0;
    for (double x = 160.0; x >= -150.0; x -= 10.0) {
      const double p = coverage_backhaul(s, {x, 0, 100});
      CHECK(p < prev);
      prev = p;
    }
    CHECK_THROWS_AS(coverage_backhaul(s, s.tbs), GeometryError);
  }

  TEST_CASE("end-to-end") {
    const Point3 uav{40, 20, 100};
    CHECK(coverage_end_to_end(s, uav, UavMode::tethered()) == coverage_uav_access(s, uav).value);
    const double u = coverage_end_to_end(s, uav, UavMode::untethered(1.0));
    CHECK(u <= std::min(coverage_backhaul(s, uav), coverage_uav_access(s, uav).value));
  }

  TEST_CASE("association boundary and classes") {
    const auto b = association_boundary(s, 100.0);
    for (double r = 0.0; r < 350.0; r += 5.0) {
      CHECK(b.lambda_nlos(r) <= b.lambda_los(r));
      CHECK(b.lambda_los(r) >= 0.0);
    }
    CHECK(classify_user(s, {-100, 0, 50}, {-100, 0}) == UserClass::UavAlways);
    CHECK(classify_user(s, {-100, 0, 50}, {170, 0}) == UserClass::TbsAlways);
    // The LoS-conditional band lies between the two.
    bool seen = false;
    for (double x = -100.0; x <= 170.0; x += 1.0) {
      seen = seen || classify_user(s, {-100, 0, 50}, {x, 0}) == UserClass::UavIfLos;
    }
    CHECK(seen);
  }

  TEST_CASE("system coverage structure") {
    const Point3 uav{30, -20, 90};
    const double p_br = coverage_tbs(s).value;
    CHECK(system_coverage_uuav(s, uav, 0.0).value == p_br);

    const auto terms = system_terms(s, uav, false);
    const double p_bu = coverage_backhaul(s, uav);
    const double t_sum = terms.value[0] + terms.value[1] + terms.value[2] + terms.value[3];
    CHECK(system_coverage_tuav(s, uav).value == Approx(t_sum).epsilon(1e-12));
    const double expect_u1 = p_bu * (terms.value[0] + terms.value[1]) + terms.value[2] + terms.value[3];
    CHECK(system_coverage_uuav(s, uav, 1.0).value == Approx(expect_u1).epsilon(1e-12));

    // Affine in A.
    const double a0 = system_coverage_uuav(s, uav, 0.0).value;
    const double a1 = system_coverage_uuav(s, uav, 1.0).value;
    for (double a : {0.2, 0.5, 0.8}) {
      CHECK(system_coverage_uuav(s, uav, a).value == Approx(a0 + a * (a1 - a0)).epsilon(1e-9));
    }
    const auto r = system_coverage_uuav(s, uav, 0.6);
    CHECK(r.breakdown.sum() == Approx(r.value).epsilon(1e-12));
  }

  TEST_CASE("reflection symmetry") {
    for (const Point3 p : {Point3{30, 45, 90}, Point3{-80, 10, 140}}) {
      const Point3 q{p.x, -p.y, p.h};
      CHECK(std::abs(system_coverage_tuav(s, p).value - system_coverage_tuav(s, q).value) < 1e-6);
      CHECK(std::abs(system_coverage_uuav(s, p, 0.8).value - system_coverage_uuav(s, q, 0.8).value) < 1e-6);
    }
  }

  TEST_CASE("association probability") {
    Scenario far = s;
    far.tbs = {2000, 0, 10};
    CHECK(association_probability(far, {0, 0, 60}, UavMode::tethered()) > 0.99);
    CHECK(association_probability(s, {0, 0, 100}, UavMode::untethered(0.0)) == 0.0);
    const double t = association_probability(s, {0, 0, 100}, UavMode::tethered());
    CHECK(association_probability(s, {0, 0, 100}, UavMode::untethered(0.5)) == Approx(0.5 * t));
  }

  TEST_CASE("dense-urban reference values") {
    // Each confirmed against the Monte Carlo oracle within its standard error.
    CHECK(system_coverage_tuav(s, {0, 0, 100}).value == Approx(0.952969).epsilon(2e-5));
    CHECK(system_coverage_tuav(s, {-100, 0, 100}).value == Approx(0.917105).epsilon(2e-5));
    CHECK(coverage_uav_access(s, {0, 0, 100}).value == Approx(0.94150).epsilon(2e-5));
  }

  TEST_CASE("scenario validation") {
    Scenario bad = s;
    bad.tbs.y = 5.0;
    CHECK_THROWS(bad.validate());
    CHECK_THROWS_AS(UavMode::untethered(1.5).validate(), ConfigError);
  }
}
