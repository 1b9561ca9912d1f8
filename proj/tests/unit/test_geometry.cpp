#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tethercov/geometry.hpp"
#include "tethercov/rng.hpp"

using namespace tethercov;
using doctest::Approx;

constexpr double kPi = std::numbers::pi;

TEST_SUITE("geometry") {
  TEST_CASE("distances and projection") {
    CHECK(distance3({0, 0, 0}, {3, 4, 0}) == 5.0);
    CHECK(distance3({170, 0, 10}, {170, 0, 0}) == 10.0);
    const Point2 p = project({-18.125, 0, 100});
    CHECK(p.x == -18.125);
    CHECK(p.y == 0.0);
  }

  TEST_CASE("circle intersection") {
    auto two = circle_intersection({{0, 0}, 5}, {{8, 0}, 5});
    REQUIRE(two.kind == IntersectionKind::Two);
    CHECK(two.points[0].x == Approx(4.0));
    CHECK(two.points[1].x == Approx(4.0));
    CHECK(std::abs(two.points[0].y) == Approx(3.0));
    CHECK(two.points[0].y == Approx(-two.points[1].y));

    auto tangent = circle_intersection({{0, 0}, 5}, {{10, 0}, 5});
    REQUIRE(tangent.kind == IntersectionKind::Tangent);
    CHECK(tangent.points[0].x == Approx(5.0));
    CHECK(tangent.points[0].y == Approx(0.0));

    // x = (150^2 - 100^2 + 170^2) / 340, plus residuals on both circles.
    auto r = circle_intersection({{0, 0}, 150}, {{170, 0}, 100});
    REQUIRE(r.kind == IntersectionKind::Two);
    for (const auto& q : r.points) {
      CHECK(q.x == Approx(121.76470588235294).epsilon(1e-12));
      CHECK(std::hypot(q.x, q.y) == Approx(150.0).epsilon(1e-12));
      CHECK(std::hypot(q.x - 170.0, q.y) == Approx(100.0).epsilon(1e-12));
    }

    CHECK(circle_intersection({{0, 0}, 1}, {{5, 0}, 1}).kind == IntersectionKind::Disjoint);
    CHECK(circle_intersection({{0, 0}, 5}, {{1, 0}, 1}).kind == IntersectionKind::Contained);
    CHECK(circle_intersection({{0, 0}, 5}, {{0, 0}, 5}).kind == IntersectionKind::Coincident);
    CHECK_THROWS_AS(circle_intersection({{0, 0}, -1}, {{0, 0}, 5}), GeometryError);
  }

  TEST_CASE("arc length inside a disk") {
    CHECK(arc_length_inside({{5, 0}, 5}, {{0, 0}, 5}).length == Approx(10.0 * kPi / 3.0));
    const auto full = arc_length_inside({{0, 0}, 3}, {{0, 0}, 5});
    CHECK(full.length == Approx(6.0 * kPi));
    CHECK(full.full());
    CHECK(arc_length_inside({{20, 0}, 3}, {{0, 0}, 5}).empty());
    CHECK(arc_length_outside({{5, 0}, 5}, {{0, 0}, 5}) == Approx(10.0 * kPi - 10.0 * kPi / 3.0));

    // Angular rejection sampling on the arc circle.
    const Circle arc{{170, 0}, 60};
    const Circle disk{{0, 0}, 150};
    Rng rng = make_stream(11, 0);
    const int n = 1000000;
    int inside = 0;
    for (int i = 0; i < n; ++i) {
      const double t = kTwoPi * uniform01(rng);
      const double x = 170.0 + 60.0 * std::cos(t);
      const double y = 60.0 * std::sin(t);
      inside += std::hypot(x, y) <= 150.0;
    }
    const double mc = kTwoPi * 60.0 * inside / n;
    const auto a = arc_length_inside(arc, disk);
    CHECK(std::abs(a.length - mc) < 4.0 * kTwoPi * 60.0 * std::sqrt(0.25 / n));
    REQUIRE(a.endpoint_lo);
    REQUIRE(a.endpoint_hi);
    CHECK(std::hypot(a.endpoint_lo->x, a.endpoint_lo->y) == Approx(150.0));
    CHECK(std::hypot(a.endpoint_hi->x, a.endpoint_hi->y) == Approx(150.0));
  }

  TEST_CASE("angles") {
    CHECK(angle_from_east({0, 0}, {1, 1}) == Approx(kPi / 4.0));
    // mpmath: atan2(75, -170) mod 2pi
    CHECK(angle_from_east({170, 0}, {0, 75}) == Approx(2.72610055764890259842).epsilon(1e-14));
    CHECK(angle_from_east({0, 75}, {0, 0}) == Approx(1.5 * kPi));
    CHECK_THROWS_AS(angle_from_east({1, 2}, {1, 2}), GeometryError);
    CHECK(normalize_angle(-0.5) == Approx(kTwoPi - 0.5));
    CHECK(normalize_angle(7.0) == Approx(7.0 - kTwoPi));
    CHECK(normalize_angle(-1e-18) < kTwoPi);
  }

  TEST_CASE("angular interval wraps through zero") {
    const auto iv = AngularInterval::from_to(1.5 * kPi, 0.5 * kPi);
    CHECK(iv.sweep == Approx(kPi));
    CHECK(iv.contains(0.0));
    CHECK(iv.contains(1.9 * kPi));
    CHECK_FALSE(iv.contains(kPi));
    CHECK(iv.end() == Approx(0.5 * kPi));
    CHECK(iv.at(0.5) == Approx(0.0).epsilon(1e-12));
    CHECK(AngularInterval::full().contains(3.0));
  }

  TEST_CASE("cone radius") {
    const SphericalCone cone{{0, 0, 25}, 100.0, kPi / 6.0};
    CHECK(cone_radius_at_height(cone, 25.0) == Approx(0.0));
    CHECK(cone_radius_at_height(cone, 125.0) == Approx(0.0));
    CHECK(cone_radius_at_height(cone, 25.0 + 100.0 * std::cos(kPi / 6.0)) == Approx(50.0));
    // Both branches meet at the junction.
    const double hj = cone.junction_height();
    CHECK(cone_radius_at_height(cone, hj - 1e-9) == Approx(cone_radius_at_height(cone, hj + 1e-9)).epsilon(1e-6));
    CHECK_THROWS_AS(cone_radius_at_height(cone, 10.0), GeometryError);
    CHECK_THROWS_AS(cone_radius_at_height(cone, 200.0), GeometryError);
  }

  TEST_CASE("cone membership") {
    const SphericalCone cone{{0, 0, 25}, 50.0, kPi / 6.0};
    CHECK(cone_contains(cone, {0, 0, 75}));
    CHECK_FALSE(cone_contains(cone, {49, 0, 26}));
    CHECK_FALSE(cone_contains(cone, {0, 0, 76}));

    // Direct definition vs the cylindrical radius.
    Rng rng = make_stream(3, 0);
    for (int i = 0; i < 20000; ++i) {
      const Point3 p{-60.0 + 120.0 * uniform01(rng), -60.0 + 120.0 * uniform01(rng), 20.0 + 60.0 * uniform01(rng)};
      const double r = std::hypot(p.x, p.y);
      if (p.h < 25.0 || p.h > 75.0) {
        CHECK_FALSE(cone_contains(cone, p));
        continue;
      }
      const double radius = cone_radius_at_height(cone, p.h);
      if (std::abs(r - radius) < 1e-6) continue;
      CHECK(cone_contains(cone, p) == (p.h >= 25.0 && r <= radius));
    }
  }

  TEST_CASE("cropped radius") {
    // Widest ring, at the junction: radius T cos(phi).
    auto cropped = [](double y_n, double psi, double t) {
      const SphericalCone c{{0, y_n, 0}, t, kPi / 6.0};
      return cropped_radius(CroppedCone(c), c.junction_height(), psi);
    };
    const double wide = 50.0 * std::cos(kPi / 6.0);
    CHECK(cropped(200.0, 1.5 * kPi, 50.0) == Approx(wide));
    CHECK(cropped(10.0, 1.5 * kPi, 50.0) == Approx(10.0));
    CHECK(cropped(20.0, 7.0 * kPi / 6.0, 50.0) == Approx(std::min(wide, 40.0)));
    CHECK(cropped(20.0, 0.5 * kPi, 50.0) == Approx(wide));

    // y_n = 20, psi = 7pi/6 with a ring of radius >= 40: clipped endpoint on the x-axis.
    const SphericalCone big{{0, 20, 0}, 100.0, kPi / 6.0};
    const double r = cropped_radius(CroppedCone(big), big.junction_height(), 7.0 * kPi / 6.0);
    CHECK(r == Approx(40.0));
    CHECK(20.0 + r * std::sin(7.0 * kPi / 6.0) == Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(CroppedCone(SphericalCone{{0, -1, 0}, 50.0, 0.5}), GeometryError);
  }

  TEST_CASE("cone validation") {
    CHECK_THROWS_AS(SphericalCone({{0, 0, 0}, -1.0, 0.5}).validate(), GeometryError);
    CHECK_THROWS_AS(SphericalCone({{0, 0, 0}, 10.0, kPi / 2.0}).validate(), GeometryError);
  }
}
