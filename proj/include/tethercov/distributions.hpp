#pragma once

// Distance distributions for a user placed uniformly in a circular hot-spot:
// the marginal density of the distance to a fixed anchor, and the density of
// the distance to a second anchor given the distance to the first.

#include <optional>
#include <vector>

#include "tethercov/geometry.hpp"
#include "tethercov/quadrature.hpp"

namespace tethercov {

struct HotSpot {
  Point2 center;
  double radius = 150.0;

  void validate() const;
  Circle disk() const { return {center, radius}; }
};

/// Functional form of one density segment.
enum class PdfShape {
  /// scale * r
  DiskRamp,
  /// scale * r * acos((d^2 + r^2 - rho^2) / (2 d r)); distance from an anchor
  /// at distance d from the centre of a disk of radius rho.
  ArcFraction,
  /// scale * 4 r rho / sqrt((r^2 - (d - rho)^2)((d + rho)^2 - r^2)); distance
  /// from an anchor at distance d to a uniform point on a circle of radius rho.
  ChordJacobian,
};

struct PdfSegment {
  double lo = 0.0;
  double hi = 0.0;
  PdfShape shape = PdfShape::DiskRamp;
  double scale = 0.0;
  double d = 0.0;
  double rho = 0.0;
  bool singular_lo = false;  ///< density or its slope blows up at lo
  bool singular_hi = false;

  double eval(double r) const;
};

struct PdfAtom {
  double at = 0.0;
  double mass = 0.0;
};

/// One-dimensional density made of contiguous closed-form segments plus
/// optional point masses.
class PiecewisePdf {
 public:
  PiecewisePdf() = default;
  PiecewisePdf(std::vector<PdfSegment> segments, std::vector<PdfAtom> atoms);

  double operator()(double r) const;

  const std::vector<PdfSegment>& segments() const { return segments_; }
  const std::vector<PdfAtom>& atoms() const { return atoms_; }
  double support_lo() const;
  double support_hi() const;
  bool has_density() const { return !segments_.empty(); }

  /// Quadrature panels covering the continuous part.
  std::vector<Panel> panels() const;

 private:
  std::vector<PdfSegment> segments_;
  std::vector<PdfAtom> atoms_;
};

struct Breakpoint {
  double r = 0.0;
  bool singular = false;
};

/// Segment endpoints in increasing order, each flagged when an adjacent
/// segment has an integrable singularity there. Atom locations are included.
std::vector<Breakpoint> pdf_breakpoints(const PiecewisePdf& pdf);

/// Splits panels at the given cut points; new endpoints are regular.
std::vector<Panel> split_panels(const std::vector<Panel>& panels, const std::vector<double>& cuts);

/// Density of the distance from `anchor` to a uniform point of the hot-spot.
PiecewisePdf marginal_distance_pdf(const HotSpot& hs, const Point2& anchor);

/// Closed-form CDF (lens area over disk area) of the same distance.
double marginal_distance_cdf(const HotSpot& hs, const Point2& anchor, double r);

/// Where the circle of radius r_b about the TBS projection meets the hot-spot,
/// seen from both the TBS and the UAV projections.
struct ConditionalGeometry {
  HotSpot hotspot;
  Point2 tbs;
  Point2 uav;
  double r_b = 0.0;
  double d_bo = 0.0;  ///< TBS projection to hot-spot centre
  double d_bu = 0.0;  ///< TBS projection to UAV projection
  bool full_circle = false;
  /// Arc endpoints; the arc runs counterclockwise from lo to hi.
  std::optional<Point2> endpoint_lo;
  std::optional<Point2> endpoint_hi;
  /// Angular extent of the arc inside the hot-spot, as seen from the TBS.
  AngularInterval arc;
  double theta_b_lo = 0.0;
  double theta_b_hi = 0.0;
  double theta_u = 0.0;       ///< direction TBS -> UAV (0 when they coincide)
  double theta_u_anti = 0.0;  ///< theta_u + pi
  double arc_length = 0.0;
};

/// Throws GeometryError when r_b lies outside the support of the TBS distance.
/// A circle tangent to the boundary from inside is treated as an arc.
ConditionalGeometry conditional_geometry(const HotSpot& hs, const Point2& tbs, const Point2& uav,
                                         double r_b);

/// Density of the UAV-to-user distance given the TBS-to-user distance r_b.
/// Coincident TBS and UAV projections give a unit atom at r_b.
PiecewisePdf conditional_distance_pdf(const ConditionalGeometry& geom);

/// Integral of f(r) against the distribution (density plus atoms).
template <class F>
Integral integrate_against(const PiecewisePdf& pdf, F&& f, double abs_tol,
                           std::size_t max_evals = 100000) {
  Integral out;
  if (pdf.has_density()) {
    out = integrate_adaptive([&](double r) { return f(r) * pdf(r); }, pdf.panels(), abs_tol,
                             max_evals);
  }
  for (const auto& a : pdf.atoms()) out.value += a.mass * f(a.at);
  return out;
}

}  // namespace tethercov
