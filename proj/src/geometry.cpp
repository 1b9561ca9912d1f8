#include "tethercov/geometry.hpp"

#include <algorithm>
#include <string>

namespace tethercov {

double clamped_acos(double x) {
  if (std::isnan(x) || x > 1.0 + 1e-9 || x < -1.0 - 1e-9) {
    throw GeometryError("arccos argument out of range: " + std::to_string(x));
  }
  return std::acos(std::clamp(x, -1.0, 1.0));
}

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below 0 can round back up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double angle_from_east(const Point2& at, const Point2& to) {
  const double dx = to.x - at.x;
  const double dy = to.y - at.y;
  if (dx == 0.0 && dy == 0.0) {
    throw GeometryError("angle_from_east: coincident points");
  }
  return normalize_angle(std::atan2(dy, dx));
}

AngularInterval AngularInterval::from_to(double from, double to) {
  const double s = normalize_angle(from);
  return {s, normalize_angle(to - s)};
}

bool AngularInterval::contains(double angle, double tol) const {
  if (sweep >= kTwoPi - tol) return true;
  const double off = offset_of(angle);
  return off <= sweep + tol || off >= kTwoPi - tol;
}

CircleIntersection circle_intersection(const Circle& c1, const Circle& c2) {
  if (c1.radius < 0.0 || c2.radius < 0.0) {
    throw GeometryError("circle_intersection: negative radius");
  }
  CircleIntersection out;
  const double dx = c2.center.x - c1.center.x;
  const double dy = c2.center.y - c1.center.y;
  const double d = std::hypot(dx, dy);
  const double r1 = c1.radius;
  const double r2 = c2.radius;

  if (d <= kGeomTol) {
    out.kind = std::abs(r1 - r2) <= kGeomTol ? IntersectionKind::Coincident
                                              : IntersectionKind::Contained;
    return out;
  }
  const double ux = dx / d;
  const double uy = dy / d;
  if (d > r1 + r2 + kGeomTol) {
    out.kind = IntersectionKind::Disjoint;
    return out;
  }
  if (d < std::abs(r1 - r2) - kGeomTol) {
    out.kind = IntersectionKind::Contained;
    return out;
  }
  if (std::abs(d - (r1 + r2)) <= kGeomTol || std::abs(d - std::abs(r1 - r2)) <= kGeomTol) {
    // Touching: the point lies on the center line.
    const double along = (std::abs(d - (r1 + r2)) <= kGeomTol || r1 >= r2) ? r1 : -r1;
    out.kind = IntersectionKind::Tangent;
    out.points[0] = {c1.center.x + along * ux, c1.center.y + along * uy};
    return out;
  }
  // Frame with c1 at the origin and c2 on the +x axis.
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double k = std::sqrt(std::max(0.0, r1 * r1 - a * a));
  const Point2 base{c1.center.x + a * ux, c1.center.y + a * uy};
  out.kind = IntersectionKind::Two;
  out.points[0] = {base.x - k * uy, base.y + k * ux};
  out.points[1] = {base.x + k * uy, base.y - k * ux};
  return out;
}

ArcInDisk arc_length_inside(const Circle& arc_of, const Circle& inside) {
  if (arc_of.radius < 0.0 || inside.radius < 0.0) {
    throw GeometryError("arc_length_inside: negative radius");
  }
  ArcInDisk out{arc_of, inside, 0.0, {}, std::nullopt, std::nullopt};
  const double r = arc_of.radius;
  const double big_r = inside.radius;
  const double d = distance2(arc_of.center, inside.center);

  if (d + r <= big_r + kGeomTol) {
    out.length = kTwoPi * r;
    out.span = AngularInterval::full();
    return out;
  }
  if (d >= r + big_r - kGeomTol || d + big_r <= r + kGeomTol) {
    return out;  // entirely outside, or the circle swallows the disk
  }
  const double half = clamped_acos((d * d + r * r - big_r * big_r) / (2.0 * d * r));
  const double toward = angle_from_east(arc_of.center, inside.center);
  out.length = 2.0 * r * half;
  out.span = {normalize_angle(toward - half), 2.0 * half};
  const double lo = toward - half;
  const double hi = toward + half;
  out.endpoint_lo = Point2{arc_of.center.x + r * std::cos(lo), arc_of.center.y + r * std::sin(lo)};
  out.endpoint_hi = Point2{arc_of.center.x + r * std::cos(hi), arc_of.center.y + r * std::sin(hi)};
  return out;
}

void SphericalCone::validate() const {
  if (!(tether_len > 0.0)) throw GeometryError("tether length must be positive");
  if (!(min_inclination >= 0.0 && min_inclination < std::numbers::pi / 2)) {
    throw GeometryError("minimum inclination must lie in [0, pi/2)");
  }
}

double cone_radius_at_height(const SphericalCone& cone, double h_u) {
  const double dh = h_u - cone.apex.h;
  const double t = cone.tether_len;
  // Small slack for heights produced by arithmetic on the bounds.
  const double slack = 1e-9 * std::max(1.0, t);
  if (dh < -slack || dh > t + slack) {
    throw GeometryError("cone_radius_at_height: height outside [h_n, h_n + T]");
  }
  const double z = std::clamp(dh, 0.0, t);
  // Below the junction the inclination bound is active: R = z / tan(phi).
  if (z < t * std::sin(cone.min_inclination)) {
    return z / std::tan(cone.min_inclination);
  }
  return std::sqrt(std::max(0.0, t * t - z * z));
}

bool cone_contains(const SphericalCone& cone, const Point3& p, double tol) {
  const double d = distance3(cone.apex, p);
  if (d > cone.tether_len + tol) return false;
  if (d <= tol) return true;
  const double s = std::clamp((p.h - cone.apex.h) / d, -1.0, 1.0);
  return std::asin(s) >= cone.min_inclination - tol / std::max(d, 1.0);
}

CroppedCone::CroppedCone(SphericalCone c) : cone(c) {
  cone.validate();
  if (cone.apex.y < 0.0) {
    throw GeometryError("CroppedCone: apex must have y >= 0 (mirror the scenario first)");
  }
}

double cropped_radius(const CroppedCone& cc, double h_u, double psi) {
  const double r = cone_radius_at_height(cc.cone, h_u);
  const double a = normalize_angle(psi);
  if (a <= std::numbers::pi) return r;
  const double s = std::sin(a);
  if (s >= 0.0) return r;
  return std::min(r, -cc.cone.apex.y / s);
}

}  // namespace tethercov
