#include "tethercov/coverage.hpp"

#include <algorithm>
#include <cmath>

namespace tethercov {

namespace {

double access_los(const EnvironmentParams& env, double r, double h) {
  return sigmoid_los(env.a_r, env.b_r, std::atan2(h, r) * kRadToDeg);
}

// Nakagami-m coverage for the normalised path loss x = m beta_u D^alpha eta.
double nakagami_ccdf(int m, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < m; ++k) {
    term *= x / k;
    sum += term;
  }
  return sum * std::exp(-x);
}

void require_airborne(const Point3& uav) {
  if (!(uav.h > 0.0) || !std::isfinite(uav.x) || !std::isfinite(uav.y)) {
    throw GeometryError("UAV must be finite and above the ground plane");
  }
}

}  // namespace

void Scenario::validate() const {
  hotspot.validate();
  env.validate();
  link.validate();
  threshold.validate(link);
  if (!(tbs.h >= 0.0) || !std::isfinite(tbs.x)) throw ConfigError("TBS location must be finite with h >= 0");
  if (tbs.y != 0.0) throw ConfigError("TBS must lie on the x-axis (y = 0)");
}

Scenario Scenario::dense_urban() {
  Scenario s;
  s.hotspot = {{0.0, 0.0}, 150.0};
  s.tbs = {170.0, 0.0, 10.0};
  s.env = EnvironmentParams::dense_urban();
  s.link = LinkParams{};
  s.threshold = SnrThreshold::make(15.0, s.link);
  return s;
}

Scenario Scenario::high_rise() {
  Scenario s = dense_urban();
  s.env = EnvironmentParams::high_rise();
  s.tbs.h = 30.0;
  return s;
}

void UavMode::validate() const {
  if (!(duty_cycle >= 0.0 && duty_cycle <= 1.0)) throw ConfigError("duty cycle must lie in [0, 1]");
}

AssociationBoundary::AssociationBoundary(const Scenario& s, double uav_height)
    : h_b_(s.tbs.h),
      h_u_(uav_height),
      alpha_b_(s.link.alpha_b),
      alpha_u_(s.link.alpha_u),
      ratio_(s.link.rho_u * s.link.mu / s.link.rho_b),
      eta_los_(s.link.eta_los),
      eta_nlos_(s.link.eta_nlos) {}

double AssociationBoundary::lambda(double r_b, double eta) const {
  const double d_b_pow = std::pow(r_b * r_b + h_b_ * h_b_, 0.5 * alpha_b_);
  const double d_u_sq = std::pow(ratio_ / eta * d_b_pow, 2.0 / alpha_u_);
  return std::sqrt(std::max(0.0, d_u_sq - h_u_ * h_u_));
}

AssociationBoundary association_boundary(const Scenario& s, double uav_height) {
  return AssociationBoundary(s, uav_height);
}

UserClass classify_user(const Scenario& s, const Point3& uav, const Point2& user) {
  const AssociationBoundary b(s, uav.h);
  const double r_b = distance2(user, project(s.tbs));
  const double r_u = distance2(user, project(uav));
  if (r_u < b.lambda_nlos(r_b)) return UserClass::UavAlways;
  if (r_u < b.lambda_los(r_b)) return UserClass::UavIfLos;
  return UserClass::TbsAlways;
}

double kernel_tbs(const SnrThreshold& th, const LinkParams& link, double r_b, double h_b) {
  return std::exp(-link.mu * th.beta_bar_b * std::pow(r_b * r_b + h_b * h_b, 0.5 * link.alpha_b));
}

double kernel_uav(const SnrThreshold& th, const LinkParams& link, double r, double dh, bool los) {
  const double eta = los ? link.eta_los : link.eta_nlos;
  return nakagami_ccdf(link.m, link.m * th.beta_bar_u * std::pow(r * r + dh * dh, 0.5 * link.alpha_u) * eta);
}

CoverageResult coverage_tbs(const Scenario& s, const CoverageOptions& opt) {
  s.validate();
  const auto pdf = marginal_distance_pdf(s.hotspot, project(s.tbs));
  const auto r = integrate_against(
      pdf, [&](double r_b) { return kernel_tbs(s.threshold, s.link, r_b, s.tbs.h); },
      opt.abs_tol_single, opt.max_evals);
  CoverageResult out;
  out.value = std::clamp(r.value, 0.0, 1.0);
  out.quad_error = r.error;
  out.breakdown.unavailable = out.value;
  return out;
}

CoverageResult coverage_uav_access(const Scenario& s, const Point3& uav, const CoverageOptions& opt) {
  s.validate();
  require_airborne(uav);
  const auto pdf = marginal_distance_pdf(s.hotspot, project(uav));
  auto f = [&](double r) {
    const double k = access_los(s.env, r, uav.h);
    const double w = pdf(r);
    return std::array<double, 2>{k * kernel_uav(s.threshold, s.link, r, uav.h, true) * w,
                                 (1.0 - k) * kernel_uav(s.threshold, s.link, r, uav.h, false) * w};
  };
  const auto r = integrate_adaptive_vec<2>(f, pdf.panels(), opt.abs_tol_single, opt.max_evals);
  CoverageResult out;
  out.breakdown.uav_los = r.value[0];
  out.breakdown.uav_nlos = r.value[1];
  out.value = std::clamp(r.value[0] + r.value[1], 0.0, 1.0);
  out.quad_error = r.error;
  return out;
}

double coverage_backhaul(const Scenario& s, const Point3& uav) {
  s.validate();
  const double d = distance3(s.tbs, uav);
  if (!(d > 0.0)) throw GeometryError("coverage_backhaul: UAV coincides with the TBS");
  const double ground = distance2(project(s.tbs), project(uav));
  const double dh = uav.h - s.tbs.h;
  const double k = los_probability_backhaul(s.env, s.tbs, uav);
  return k * kernel_uav(s.threshold, s.link, ground, dh, true) +
         (1.0 - k) * kernel_uav(s.threshold, s.link, ground, dh, false);
}

double coverage_end_to_end(const Scenario& s, const Point3& uav, const UavMode& mode,
                           const CoverageOptions& opt) {
  mode.validate();
  const double access = coverage_uav_access(s, uav, opt).value;
  if (mode.kind == UavMode::Kind::Tethered) return access;
  return coverage_backhaul(s, uav) * access;
}

SystemTerms system_terms(const Scenario& s, const Point3& uav, bool association_only,
                         const CoverageOptions& opt) {
  s.validate();
  require_airborne(uav);
  const AssociationBoundary bound(s, uav.h);
  const Point2 tbs = project(s.tbs);
  const Point2 uav_p = project(uav);
  const auto outer_pdf = marginal_distance_pdf(s.hotspot, tbs);
  const double inner_tol = 0.1 * opt.abs_tol_double;

  auto inner = [&](double r_b) {
    const auto geom = conditional_geometry(s.hotspot, tbs, uav_p, r_b);
    const auto pdf = conditional_distance_pdf(geom);
    const double p_b = association_only ? 0.0 : kernel_tbs(s.threshold, s.link, r_b, s.tbs.h);
    const double lam_los = bound.lambda_los(r_b);
    const double lam_nlos = bound.lambda_nlos(r_b);
    auto terms = [&](double r_u) {
      const double k = access_los(s.env, r_u, uav.h);
      const bool in_los = r_u < lam_los;
      const bool in_nlos = r_u < lam_nlos;
      std::array<double, 4> v{};
      if (association_only) {
        v[0] = in_los ? k : 0.0;
        v[1] = in_nlos ? 1.0 - k : 0.0;
      } else {
        const double base =
            s.link.m * s.threshold.beta_bar_u * std::pow(r_u * r_u + uav.h * uav.h, 0.5 * s.link.alpha_u);
        v[0] = in_los ? k * nakagami_ccdf(s.link.m, base * s.link.eta_los) : 0.0;
        v[1] = in_nlos ? (1.0 - k) * nakagami_ccdf(s.link.m, base * s.link.eta_nlos) : 0.0;
        v[2] = in_los ? 0.0 : k * p_b;
        v[3] = in_nlos ? 0.0 : (1.0 - k) * p_b;
      }
      return v;
    };
    std::array<double, 4> acc{};
    if (pdf.has_density()) {
      const auto panels = split_panels(pdf.panels(), {lam_los, lam_nlos});
      auto f = [&](double r_u) {
        auto v = terms(r_u);
        const double w = pdf(r_u);
        for (auto& c : v) c *= w;
        return v;
      };
      acc = integrate_adaptive_vec<4>(f, panels, inner_tol, opt.max_evals).value;
    }
    for (const auto& a : pdf.atoms()) {
      const auto v = terms(a.at);
      for (std::size_t c = 0; c < 4; ++c) acc[c] += a.mass * v[c];
    }
    return acc;
  };

  std::vector<double> cuts;
  const double d_bu = distance2(tbs, uav_p);
  if (d_bu > outer_pdf.support_lo() && d_bu < outer_pdf.support_hi()) cuts.push_back(d_bu);
  const auto panels = split_panels(outer_pdf.panels(), cuts);
  auto outer = [&](double r_b) {
    auto v = inner(r_b);
    const double w = outer_pdf(r_b);
    for (auto& c : v) c *= w;
    return v;
  };
  const auto r = integrate_adaptive_vec<4>(outer, panels, opt.abs_tol_double, opt.max_evals);
  return {r.value, r.error + inner_tol};
}

CoverageResult system_coverage_tuav(const Scenario& s, const Point3& uav, const CoverageOptions& opt) {
  const auto t = system_terms(s, uav, false, opt);
  CoverageResult out;
  out.breakdown.uav_los = t.value[0];
  out.breakdown.uav_nlos = t.value[1];
  out.breakdown.tbs_los_region = t.value[2];
  out.breakdown.tbs_nlos_region = t.value[3];
  out.value = std::clamp(out.breakdown.sum(), 0.0, 1.0);
  out.quad_error = t.error;
  return out;
}

CoverageResult system_coverage_uuav(const Scenario& s, const Point3& uav, double duty_cycle,
                                    const CoverageOptions& opt) {
  UavMode::untethered(duty_cycle).validate();
  const auto tbs_only = coverage_tbs(s, opt);
  CoverageResult out;
  if (duty_cycle == 0.0) return tbs_only;
  const auto t = system_terms(s, uav, false, opt);
  const double p_bu = coverage_backhaul(s, uav);
  const double a = duty_cycle;
  out.breakdown.uav_los = a * p_bu * t.value[0];
  out.breakdown.uav_nlos = a * p_bu * t.value[1];
  out.breakdown.tbs_los_region = a * t.value[2];
  out.breakdown.tbs_nlos_region = a * t.value[3];
  out.breakdown.unavailable = (1.0 - a) * tbs_only.value;
  out.value = std::clamp(out.breakdown.sum(), 0.0, 1.0);
  out.quad_error = a * t.error + (1.0 - a) * tbs_only.quad_error;
  return out;
}

CoverageResult system_coverage(const Scenario& s, const Point3& uav, const UavMode& mode,
                               const CoverageOptions& opt) {
  mode.validate();
  if (mode.kind == UavMode::Kind::Tethered) return system_coverage_tuav(s, uav, opt);
  return system_coverage_uuav(s, uav, mode.duty_cycle, opt);
}

double association_probability(const Scenario& s, const Point3& uav, const UavMode& mode,
                               const CoverageOptions& opt) {
  mode.validate();
  if (mode.kind == UavMode::Kind::Untethered && mode.duty_cycle == 0.0) return 0.0;
  const auto t = system_terms(s, uav, true, opt);
  const double p = std::clamp(t.value[0] + t.value[1], 0.0, 1.0);
  return mode.kind == UavMode::Kind::Tethered ? p : mode.duty_cycle * p;
}

}  // namespace tethercov
