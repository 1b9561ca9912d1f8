#include "tethercov/channel.hpp"

#include <algorithm>
#include <random>

namespace tethercov {

void EnvironmentParams::validate() const {
  if (!(gamma1 > 0.0)) throw ConfigError("gamma1 must be positive");
  if (!(gamma2 >= 0.0 && gamma2 <= 1.0)) throw ConfigError("gamma2 must lie in [0, 1]");
  if (!(gamma3 > 0.0)) throw ConfigError("gamma3 must be positive");
  if (!(b_b > 0.0) || !(b_r > 0.0)) throw ConfigError("sigmoid slopes b_b, b_r must be positive");
  if (!std::isfinite(a_b) || !std::isfinite(a_r)) throw ConfigError("sigmoid offsets must be finite");
}

EnvironmentParams EnvironmentParams::dense_urban() { return {}; }

EnvironmentParams EnvironmentParams::high_rise() {
  EnvironmentParams e;
  e.gamma1 = 50.0;
  e.gamma2 = 0.5;
  e.gamma3 = 300.0;
  e.a_r = 22.0;
  e.b_r = 0.18;
  e.a_b = 11.0;
  e.b_b = 0.16;
  return e;
}

void LinkParams::validate() const {
  if (!(rho_b > 0.0 && rho_u > 0.0 && sigma_n2 > 0.0)) {
    throw ConfigError("powers must be positive");
  }
  if (!(alpha_b > 2.0 && alpha_u > 2.0)) throw ConfigError("path-loss exponents must exceed 2");
  if (!(eta_los >= 1.0)) throw ConfigError("eta_los must be >= 1 (linear)");
  if (!(eta_los < eta_nlos)) throw ConfigError("eta_los must be strictly below eta_nlos");
  if (m < 1) throw ConfigError("Nakagami m must be a positive integer");
  if (!(mu > 0.0)) throw ConfigError("Rayleigh rate mu must be positive");
}

SnrThreshold SnrThreshold::make(double beta, const LinkParams& link) {
  SnrThreshold t;
  t.beta = beta;
  t.beta_bar_b = link.sigma_n2 * beta / link.rho_b;
  t.beta_bar_u = link.sigma_n2 * beta / link.rho_u;
  t.validate(link);
  return t;
}

void SnrThreshold::validate(const LinkParams& link) const {
  if (!(beta > 0.0)) throw ConfigError("SNR threshold must be positive");
  const double eb = link.sigma_n2 * beta / link.rho_b;
  const double eu = link.sigma_n2 * beta / link.rho_u;
  if (std::abs(beta_bar_b - eb) > 1e-12 * eb || std::abs(beta_bar_u - eu) > 1e-12 * eu) {
    throw ConfigError("cached normalised thresholds inconsistent with link parameters");
  }
}

double elevation_deg(const Point3& from, const Point3& to) {
  const double d = distance3(from, to);
  if (d == 0.0) return 90.0;
  return std::asin(std::clamp((to.h - from.h) / d, -1.0, 1.0)) * kRadToDeg;
}

double los_probability_exact(const EnvironmentParams& env, const Point3& high, const Point3& low) {
  if (high.h < low.h) throw GeometryError("los_probability_exact: first point must be the higher one");
  const double ground_km = distance2(project(high), project(low)) / 1000.0;
  const long k_max = static_cast<long>(std::floor(ground_km * std::sqrt(env.gamma2 * env.gamma3) - 1.0));
  if (k_max < 0) return 1.0;
  const double drop = high.h - low.h;
  double p = 1.0;
  for (long k = 0; k <= k_max; ++k) {
    const double ray_h = high.h - (static_cast<double>(k) + 0.5) * drop / static_cast<double>(k_max + 1);
    p *= 1.0 - std::exp(-(ray_h * ray_h) / (2.0 * env.gamma1 * env.gamma1));
  }
  return p;
}

double los_probability_access(const EnvironmentParams& env, const Point3& uav, const Point2& ground) {
  return sigmoid_los(env.a_r, env.b_r, elevation_deg({ground.x, ground.y, 0.0}, uav));
}

double los_probability_backhaul(const EnvironmentParams& env, const Point3& tbs, const Point3& uav) {
  return sigmoid_los(env.a_b, env.b_b, elevation_deg(tbs, uav));
}

double mean_snr_terrestrial(const LinkParams& link, const Point3& tbs, const Point2& user) {
  const double d = distance3(tbs, {user.x, user.y, 0.0});
  if (d == 0.0) throw GeometryError("mean_snr_terrestrial: zero link distance");
  return link.rho_b * std::pow(d, -link.alpha_b) / (link.mu * link.sigma_n2);
}

double mean_snr_aerial(const LinkParams& link, const Point3& uav, const Point2& user, bool los) {
  const double d = distance3(uav, {user.x, user.y, 0.0});
  if (d == 0.0) throw GeometryError("mean_snr_aerial: zero link distance");
  const double eta = los ? link.eta_los : link.eta_nlos;
  return link.rho_u * std::pow(d, -link.alpha_u) / (link.sigma_n2 * eta);
}

double sample_rayleigh_gain(Rng& rng, double mu) {
  return std::exponential_distribution<double>(mu)(rng);
}

double sample_nakagami_gain(Rng& rng, int m) {
  // Sum of m unit exponentials is Gamma(m, 1); scaling by 1/m gives unit mean.
  std::exponential_distribution<double> e(1.0);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += e(rng);
  return s / static_cast<double>(m);
}

}  // namespace tethercov
