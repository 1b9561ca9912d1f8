#pragma once

// Planar and 3-D primitives used by the distance distributions and the
// tether reachability model. Lengths are metres, angles radians.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace tethercov {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Absolute tolerance (metres) for tangency / containment classification.
inline constexpr double kGeomTol = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;  ///< altitude above the ground plane
};

inline Point2 project(const Point3& p) { return {p.x, p.y}; }

inline double distance2(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance3(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dh = a.h - b.h;
  return std::sqrt(dx * dx + dy * dy + dh * dh);
}

struct Circle {
  Point2 center;
  double radius = 0.0;
};

/// Thrown when a geometric quantity is requested for a configuration where it
/// is undefined (coincident points, out-of-range heights, ...).
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// arccos with roundoff clamping. Arguments further than 1e-9 outside
/// [-1, 1] indicate a logic error and throw.
double clamped_acos(double x);

/// Maps any angle onto [0, 2pi).
double normalize_angle(double a);

/// Counterclockwise angle of (to - at) from the +x ray, in [0, 2pi).
double angle_from_east(const Point2& at, const Point2& to);

/// Counterclockwise angular interval given by a start angle and a sweep.
/// Avoids the ambiguity of (lo, hi) pairs once the interval wraps 2pi.
struct AngularInterval {
  double start = 0.0;  ///< in [0, 2pi)
  double sweep = 0.0;  ///< in [0, 2pi]

  static AngularInterval from_to(double from, double to);
  static AngularInterval full() { return {0.0, kTwoPi}; }

  double end() const { return normalize_angle(start + sweep); }
  /// Offset of `angle` counterclockwise from `start`, in [0, 2pi).
  double offset_of(double angle) const { return normalize_angle(angle - start); }
  bool contains(double angle, double tol = 1e-12) const;
  /// Angle at a fraction t in [0, 1] along the interval.
  double at(double t) const { return normalize_angle(start + t * sweep); }
};

enum class IntersectionKind {
  Two,         ///< two crossing points
  Tangent,     ///< single touching point (internal or external)
  Disjoint,    ///< circles apart, no common point
  Contained,   ///< one circle strictly inside the other
  Coincident,  ///< identical circles
};

struct CircleIntersection {
  IntersectionKind kind = IntersectionKind::Disjoint;
  /// For Two: positive-y point (relative to the center line) first.
  /// For Tangent: points[0] only.
  std::array<Point2, 2> points{};
  int count() const {
    return kind == IntersectionKind::Two ? 2 : kind == IntersectionKind::Tangent ? 1 : 0;
  }
};

/// Intersection of two circle outlines.
///
/// The Two-point result is ordered so that the first point lies to the left of
/// the directed center line c1 -> c2 (for c2 on the +x side of c1 this is the
/// positive-y point).
CircleIntersection circle_intersection(const Circle& c1, const Circle& c2);

/// Portion of a circle outline lying inside a disk.
struct ArcInDisk {
  Circle arc_circle;
  Circle clip_disk;
  double length = 0.0;
  /// Angular extent (as seen from arc_circle.center) of the inside portion.
  AngularInterval span;
  /// Arc endpoints, absent when the arc is the full circle or empty.
  std::optional<Point2> endpoint_lo;
  std::optional<Point2> endpoint_hi;

  bool full() const { return span.sweep >= kTwoPi; }
  bool empty() const { return length <= 0.0; }
};

ArcInDisk arc_length_inside(const Circle& arc_of, const Circle& inside);

inline double arc_length_outside(const Circle& arc_of, const Circle& inside) {
  return kTwoPi * arc_of.radius - arc_length_inside(arc_of, inside).length;
}

/// Reachable set of a tethered drone anchored at a ground station: points
/// within the tether length whose inclination from the apex is at least the
/// minimum inclination.
struct SphericalCone {
  Point3 apex;
  double tether_len = 0.0;
  double min_inclination = 0.0;  ///< minimum tether elevation above horizontal, radians in [0, pi/2)

  void validate() const;
  /// Altitude where the inclination bound meets the tether sphere.
  double junction_height() const { return apex.h + tether_len * std::sin(min_inclination); }
};

/// Horizontal radius of the cone slice at altitude h_u: (h_u - h_n) / tan(phi)
/// below the junction, sqrt(T^2 - (h_u - h_n)^2) above it.
double cone_radius_at_height(const SphericalCone& cone, double h_u);

bool cone_contains(const SphericalCone& cone, const Point3& p, double tol = 1e-9);

/// Cone restricted to the half-space y >= 0. The apex must satisfy y >= 0.
struct CroppedCone {
  SphericalCone cone;

  explicit CroppedCone(SphericalCone c);
};

/// Radius of the cropped slice at altitude h_u along ground direction psi
/// (measured at the apex projection).
double cropped_radius(const CroppedCone& cone, double h_u, double psi);

}  // namespace tethercov
