#include <doctest.h>

#include <cmath>

#include "tethercov/distributions.hpp"
#include "tethercov/rng.hpp"

using namespace tethercov;
using doctest::Approx;

namespace {

double total_mass(const PiecewisePdf& pdf) {
  return integrate_against(pdf, [](double) { return 1.0; }, 1e-10).value;
}

}  // namespace

TEST_SUITE("distributions") {
  const HotSpot hs{{0.0, 0.0}, 150.0};

  TEST_CASE("marginal pdf, anchor at the centre") {
    const auto pdf = marginal_distance_pdf(hs, {0, 0});
    CHECK(pdf(75.0) == Approx(2.0 * 75.0 / (150.0 * 150.0)));
    CHECK(pdf(151.0) == 0.0);
    CHECK(pdf(-1.0) == 0.0);
    const auto bp = pdf_breakpoints(pdf);
    REQUIRE(bp.size() == 2);
    CHECK(bp[0].r == 0.0);
    CHECK(bp[1].r == 150.0);
  }

  TEST_CASE("marginal pdf, default TBS anchor") {
    const auto pdf = marginal_distance_pdf(hs, {170, 0});
    CHECK(pdf.support_lo() == Approx(20.0));
    CHECK(pdf.support_hi() == Approx(320.0));
    CHECK(total_mass(pdf) == Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("marginal pdf, inside anchor breakpoints") {
    const auto pdf = marginal_distance_pdf(hs, {40, 30});
    const auto bp = pdf_breakpoints(pdf);
    REQUIRE(bp.size() == 3);
    CHECK(bp[0].r == 0.0);
    CHECK(bp[1].r == Approx(100.0));
    CHECK(bp[2].r == Approx(200.0));
    CHECK(total_mass(pdf) == Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("marginal cdf") {
    const Point2 anchor{170, 0};
    CHECK(marginal_distance_cdf(hs, anchor, 10.0) == 0.0);
    CHECK(marginal_distance_cdf(hs, anchor, 400.0) == 1.0);
    Rng rng = make_stream(21, 0);
    const int n = 1000000;
    int below = 0;
    for (int i = 0; i < n; ++i) {
      const double r = 150.0 * std::sqrt(uniform01(rng));
      const double t = kTwoPi * uniform01(rng);
      below += std::hypot(r * std::cos(t) - 170.0, r * std::sin(t)) <= 170.0;
    }
    CHECK(std::abs(marginal_distance_cdf(hs, anchor, 170.0) - static_cast<double>(below) / n) < 0.005);

    // CDF is the integral of the pdf.
    const auto pdf = marginal_distance_pdf(hs, {60, -20});
    const auto panels = split_panels(pdf.panels(), {120.0});
    std::vector<Panel> lower;
    for (const auto& p : panels) {
      if (p.hi <= 120.0 + 1e-9) lower.push_back(p);
    }
    const auto part = integrate_adaptive([&](double r) { return pdf(r); }, lower, 1e-12);
    CHECK(part.value == Approx(marginal_distance_cdf(hs, {60, -20}, 120.0)).epsilon(1e-8));
  }

  TEST_CASE("conditional geometry") {
    const auto full = conditional_geometry(hs, {30, 0}, {0, 0}, 100.0);
    CHECK(full.full_circle);
    const auto g = conditional_geometry(hs, {170, 0}, {0, 50}, 100.0);
    CHECK_FALSE(g.full_circle);
    const auto ref = circle_intersection({{0, 0}, 150}, {{170, 0}, 100});
    REQUIRE(g.endpoint_lo);
    REQUIRE(g.endpoint_hi);
    const double y_lo = g.endpoint_lo->y;
    const double y_hi = g.endpoint_hi->y;
    CHECK(std::min(y_lo, y_hi) == Approx(std::min(ref.points[0].y, ref.points[1].y)));
    CHECK(std::max(y_lo, y_hi) == Approx(std::max(ref.points[0].y, ref.points[1].y)));
    CHECK(g.endpoint_lo->x == Approx(121.76470588235294));
    CHECK(g.theta_u_anti == Approx(normalize_angle(std::numbers::pi + g.theta_u)));
    CHECK_THROWS_AS(conditional_geometry(hs, {170, 0}, {0, 0}, 10.0), GeometryError);
    CHECK_THROWS_AS(conditional_geometry(hs, {170, 0}, {0, 0}, 330.0), GeometryError);
  }

  TEST_CASE("conditional pdf normalisation, 50 random configurations") {
    Rng rng = make_stream(8, 0);
    for (int i = 0; i < 50; ++i) {
      const Point2 tbs{-300.0 + 600.0 * uniform01(rng), -300.0 + 600.0 * uniform01(rng)};
      const Point2 uav{-200.0 + 400.0 * uniform01(rng), -200.0 + 400.0 * uniform01(rng)};
      const auto marg = marginal_distance_pdf(hs, tbs);
      const double lo = marg.support_lo();
      const double hi = marg.support_hi();
      const double r_b = lo + (hi - lo) * (0.01 + 0.98 * uniform01(rng));
      const auto pdf = conditional_distance_pdf(conditional_geometry(hs, tbs, uav, r_b));
      CAPTURE(i);
      CHECK(total_mass(pdf) == Approx(1.0).epsilon(1e-5));
    }
  }

  TEST_CASE("conditional pdf degenerate cases") {
    const auto same = conditional_distance_pdf(conditional_geometry(hs, {170, 0}, {170, 0}, 100.0));
    REQUIRE(same.atoms().size() == 1);
    CHECK(same.atoms()[0].at == Approx(100.0));
    CHECK(same.atoms()[0].mass == 1.0);
    CHECK_FALSE(same.has_density());

    // Full circle: singular breakpoints at |d - r_b| and d + r_b.
    const auto full = conditional_distance_pdf(conditional_geometry(hs, {20, 0}, {80, 0}, 50.0));
    const auto bp = pdf_breakpoints(full);
    REQUIRE(bp.size() == 2);
    CHECK(bp[0].r == Approx(10.0));
    CHECK(bp[1].r == Approx(110.0));
    CHECK(bp[0].singular);
    CHECK(bp[1].singular);
  }

  TEST_CASE("conditional pdf is symmetric under y_u -> -y_u") {
    const Point2 tbs{170, 0};
    for (double r_b : {60.0, 120.0, 250.0}) {
      const auto a = conditional_distance_pdf(conditional_geometry(hs, tbs, {-20, 60}, r_b));
      const auto b = conditional_distance_pdf(conditional_geometry(hs, tbs, {-20, -60}, r_b));
      for (double r = 1.0; r < 400.0; r += 3.7) CHECK(a(r) == Approx(b(r)).epsilon(1e-9));
    }
  }

  TEST_CASE("hot-spot validation") {
    CHECK_THROWS_AS(HotSpot({{0, 0}, 0.0}).validate(), GeometryError);
    CHECK_THROWS_AS(marginal_distance_pdf(HotSpot{{0, 0}, -5.0}, {0, 0}), GeometryError);
  }
}
