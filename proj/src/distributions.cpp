#include "tethercov/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace tethercov {

namespace {

constexpr double kPi = std::numbers::pi;

// Below this TBS-UAV or r_b separation the conditional law is a point mass.
constexpr double kAtomTol = 1e-9;

bool longer_than(double lo, double hi) { return hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); }

}  // namespace

void HotSpot::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("hot-spot radius must be positive");
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) throw GeometryError("hot-spot centre must be finite");
}

double PdfSegment::eval(double r) const {
  switch (shape) {
    case PdfShape::DiskRamp:
      return scale * r;
    case PdfShape::ArcFraction: {
      if (r <= 0.0) return 0.0;
      // acos((d^2 + r^2 - rho^2) / (2 d r)) from 1 - cos and 1 + cos in factored
      // form; the direct quotient loses all digits when rho << d.
      const double one_minus = std::max(0.0, (rho - r + d) * (rho + r - d));
      const double one_plus = std::max(0.0, (r + d - rho) * (r + d + rho));
      return scale * r * 2.0 * std::atan2(std::sqrt(one_minus), std::sqrt(one_plus));
    }
    case PdfShape::ChordJacobian: {
      const double a = std::abs(d - rho);
      const double b = d + rho;
      const double prod = (r - a) * (r + a) * (b - r) * (b + r);
      if (!(prod > 0.0)) return 0.0;
      return scale * 4.0 * r * rho / std::sqrt(prod);
    }
  }
  return 0.0;
}

PiecewisePdf::PiecewisePdf(std::vector<PdfSegment> segments, std::vector<PdfAtom> atoms)
    : segments_(std::move(segments)), atoms_(std::move(atoms)) {
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (segments_[i].lo < segments_[i - 1].hi - 1e-9 * std::max(1.0, segments_[i].lo)) {
      throw GeometryError("PiecewisePdf: overlapping segments");
    }
  }
}

double PiecewisePdf::operator()(double r) const {
  auto it = std::lower_bound(segments_.begin(), segments_.end(), r,
                             [](const PdfSegment& s, double v) { return s.hi < v; });
  if (it == segments_.end() || r < it->lo) return 0.0;
  return it->eval(r);
}

double PiecewisePdf::support_lo() const {
  double lo = segments_.empty() ? HUGE_VAL : segments_.front().lo;
  for (const auto& a : atoms_) lo = std::min(lo, a.at);
  return lo;
}

double PiecewisePdf::support_hi() const {
  double hi = segments_.empty() ? -HUGE_VAL : segments_.back().hi;
  for (const auto& a : atoms_) hi = std::max(hi, a.at);
  return hi;
}

std::vector<Panel> PiecewisePdf::panels() const {
  std::vector<Panel> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) out.push_back({s.lo, s.hi, s.singular_lo, s.singular_hi});
  return out;
}

std::vector<Breakpoint> pdf_breakpoints(const PiecewisePdf& pdf) {
  std::vector<Breakpoint> pts;
  for (const auto& s : pdf.segments()) {
    pts.push_back({s.lo, s.singular_lo});
    pts.push_back({s.hi, s.singular_hi});
  }
  for (const auto& a : pdf.atoms()) pts.push_back({a.at, false});
  std::sort(pts.begin(), pts.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.r < b.r; });
  std::vector<Breakpoint> out;
  for (const auto& p : pts) {
    if (!out.empty() && !longer_than(out.back().r, p.r)) {
      out.back().singular = out.back().singular || p.singular;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Panel> split_panels(const std::vector<Panel>& panels, const std::vector<double>& cuts) {
  std::vector<double> sorted(cuts);
  std::sort(sorted.begin(), sorted.end());
  std::vector<Panel> out;
  for (const auto& p : panels) {
    double lo = p.lo;
    bool sing_lo = p.singular_lo;
    for (double c : sorted) {
      if (longer_than(lo, c) && longer_than(c, p.hi)) {
        out.push_back({lo, c, sing_lo, false});
        lo = c;
        sing_lo = false;
      }
    }
    out.push_back({lo, p.hi, sing_lo, p.singular_hi});
  }
  return out;
}

PiecewisePdf marginal_distance_pdf(const HotSpot& hs, const Point2& anchor) {
  hs.validate();
  const double big_r = hs.radius;
  const double d = distance2(anchor, hs.center);
  const double ramp = 2.0 / (big_r * big_r);
  const double arc = 2.0 / (kPi * big_r * big_r);
  std::vector<PdfSegment> segs;
  if (d <= kGeomTol) {
    segs.push_back({0.0, big_r, PdfShape::DiskRamp, ramp});
  } else if (d < big_r) {
    segs.push_back({0.0, big_r - d, PdfShape::DiskRamp, ramp});
    segs.push_back({big_r - d, big_r + d, PdfShape::ArcFraction, arc, d, big_r, true, true});
  } else {
    segs.push_back({d - big_r, d + big_r, PdfShape::ArcFraction, arc, d, big_r, true, true});
  }
  return PiecewisePdf(std::move(segs), {});
}

double marginal_distance_cdf(const HotSpot& hs, const Point2& anchor, double r) {
  hs.validate();
  if (r <= 0.0) return 0.0;
  const double big_r = hs.radius;
  const double d = distance2(anchor, hs.center);
  const double disk_area = kPi * big_r * big_r;
  if (d >= r + big_r) return 0.0;
  if (d <= std::abs(big_r - r)) {
    const double m = std::min(r, big_r);
    return std::min(1.0, kPi * m * m / disk_area);
  }
  const double a1 = r * r * clamped_acos((d * d + r * r - big_r * big_r) / (2.0 * d * r));
  const double a2 = big_r * big_r * clamped_acos((d * d + big_r * big_r - r * r) / (2.0 * d * big_r));
  const double k = (-d + r + big_r) * (d + r - big_r) * (d - r + big_r) * (d + r + big_r);
  const double lens = a1 + a2 - 0.5 * std::sqrt(std::max(0.0, k));
  return std::clamp(lens / disk_area, 0.0, 1.0);
}

ConditionalGeometry conditional_geometry(const HotSpot& hs, const Point2& tbs, const Point2& uav,
                                         double r_b) {
  hs.validate();
  ConditionalGeometry g;
  g.hotspot = hs;
  g.tbs = tbs;
  g.uav = uav;
  g.r_b = r_b;
  g.d_bo = distance2(tbs, hs.center);
  g.d_bu = distance2(tbs, uav);
  const double big_r = hs.radius;
  const double lo = std::max(0.0, g.d_bo - big_r);
  const double hi = g.d_bo + big_r;
  const double slack = 1e-9 * std::max(1.0, hi);
  if (!(r_b >= lo - slack && r_b <= hi + slack)) {
    throw GeometryError("conditional_geometry: r_b = " + std::to_string(r_b) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  g.theta_u = g.d_bu > kAtomTol ? angle_from_east(tbs, uav) : 0.0;
  g.theta_u_anti = normalize_angle(g.theta_u + kPi);

  if (g.d_bo <= kGeomTol || r_b <= kAtomTol || r_b + g.d_bo < big_r - kGeomTol) {
    g.full_circle = true;
    g.arc = AngularInterval::full();
    g.arc_length = kTwoPi * r_b;
    return g;
  }
  const double half =
      clamped_acos(std::clamp((g.d_bo * g.d_bo + r_b * r_b - big_r * big_r) / (2.0 * g.d_bo * r_b), -1.0, 1.0));
  const double toward = angle_from_east(tbs, hs.center);
  g.arc = {normalize_angle(toward - half), 2.0 * half};
  g.theta_b_lo = g.arc.start;
  g.theta_b_hi = g.arc.end();
  g.arc_length = 2.0 * half * r_b;
  g.endpoint_lo = Point2{tbs.x + r_b * std::cos(toward - half), tbs.y + r_b * std::sin(toward - half)};
  g.endpoint_hi = Point2{tbs.x + r_b * std::cos(toward + half), tbs.y + r_b * std::sin(toward + half)};
  return g;
}

PiecewisePdf conditional_distance_pdf(const ConditionalGeometry& g) {
  const double rho = g.r_b;
  const double d = g.d_bu;
  if (rho <= kAtomTol) return PiecewisePdf({}, {{d, 1.0}});
  if (d <= kAtomTol) return PiecewisePdf({}, {{rho, 1.0}});
  const double lo = std::abs(d - rho);
  const double hi = d + rho;

  if (g.full_circle) {
    PdfSegment s{lo, hi, PdfShape::ChordJacobian, 1.0 / (kTwoPi * rho), d, rho, true, true};
    return PiecewisePdf({s}, {});
  }
  if (g.arc.sweep < 1e-12) {
    // Arc shrunk to the single tangent point.
    const double toward = g.arc.start;
    const Point2 p{g.tbs.x + rho * std::cos(toward), g.tbs.y + rho * std::sin(toward)};
    return PiecewisePdf({}, {{distance2(p, g.uav), 1.0}});
  }
  double c1 = std::clamp(distance2(*g.endpoint_lo, g.uav), lo, hi);
  double c2 = std::clamp(distance2(*g.endpoint_hi, g.uav), lo, hi);
  if (c1 > c2) std::swap(c1, c2);
  const std::array<double, 4> edges{lo, c1, c2, hi};
  std::vector<PdfSegment> segs;
  for (int i = 0; i < 3; ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    if (!longer_than(a, b)) continue;
    // Two ground points share each distance, mirrored about the TBS-UAV line.
    const double mid = 0.5 * (a + b);
    const double off = std::acos(std::clamp((d * d + rho * rho - mid * mid) / (2.0 * d * rho), -1.0, 1.0));
    const int count = static_cast<int>(g.arc.contains(g.theta_u + off)) +
                      static_cast<int>(g.arc.contains(g.theta_u - off));
    if (count == 0) continue;
    segs.push_back({a, b, PdfShape::ChordJacobian, count / (2.0 * g.arc_length), d, rho, a == lo,
                    b == hi});
  }
  return PiecewisePdf(std::move(segs), {});
}

}  // namespace tethercov
