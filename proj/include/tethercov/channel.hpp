#pragma once

// Radio environment: line-of-sight probabilities, mean SNRs, fading samplers
// and unit conversions. All SNR arithmetic is linear (mW, ratios).

#include <cmath>
#include <stdexcept>

#include "tethercov/geometry.hpp"
#include "tethercov/rng.hpp"

namespace tethercov {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// Urban environment description.
///
/// gamma1..gamma3 feed the exact building-crossing LoS model; the sigmoid
/// pairs (a_b, b_b) and (a_r, b_r) are the backhaul and access approximations
/// and take the elevation angle in degrees.
struct EnvironmentParams {
  double gamma1 = 20.0;   ///< Rayleigh scale of building heights (m)
  double gamma2 = 0.3;    ///< built-up land ratio; not used by the sigmoid model
  double gamma3 = 300.0;  ///< buildings per km^2
  double a_b = 7.0;
  double b_b = 0.2;
  double a_r = 13.0;
  double b_r = 0.22;

  void validate() const;

  static EnvironmentParams dense_urban();
  /// Sigmoid parameters for a high-rise city. Pair with a 30 m TBS.
  static EnvironmentParams high_rise();
};

struct LinkParams {
  double rho_b = dbm_to_mw(1.0);      ///< TBS transmit power (mW)
  double rho_u = dbm_to_mw(1.0);      ///< UAV transmit power (mW)
  double sigma_n2 = dbm_to_mw(-80.0); ///< noise power (mW)
  double alpha_b = 3.0;
  double alpha_u = 2.7;
  double eta_los = db_to_linear(1.6);
  double eta_nlos = db_to_linear(23.0);
  int m = 2;         ///< Nakagami shape of the aerial links
  double mu = 1.0;   ///< rate of the exponential terrestrial gain

  void validate() const;
};

/// SNR threshold with the noise-normalised forms used by the kernels.
struct SnrThreshold {
  double beta = 15.0;
  double beta_bar_b = 0.0;  ///< sigma_n^2 beta / rho_b
  double beta_bar_u = 0.0;  ///< sigma_n^2 beta / rho_u

  static SnrThreshold make(double beta, const LinkParams& link);
  void validate(const LinkParams& link) const;
};

/// Elevation of `to` seen from `from`, in degrees. Coincident points give 90.
double elevation_deg(const Point3& from, const Point3& to);

/// Building-crossing LoS model with K = floor(d_km sqrt(gamma2 gamma3) - 1)
/// buildings between the endpoints. `high` must not be lower than `low`.
double los_probability_exact(const EnvironmentParams& env, const Point3& high, const Point3& low);

/// Sigmoid LoS probability for a given elevation in degrees.
inline double sigmoid_los(double a, double b, double elevation_deg) {
  return 1.0 / (1.0 + a * std::exp(-b * (elevation_deg - a)));
}

double los_probability_access(const EnvironmentParams& env, const Point3& uav, const Point2& ground);
double los_probability_backhaul(const EnvironmentParams& env, const Point3& tbs, const Point3& uav);

double mean_snr_terrestrial(const LinkParams& link, const Point3& tbs, const Point2& user);
double mean_snr_aerial(const LinkParams& link, const Point3& uav, const Point2& user, bool los);

/// Exponential gain with rate mu.
double sample_rayleigh_gain(Rng& rng, double mu);
/// Gamma(m, rate m) gain: unit mean Nakagami-m power.
double sample_nakagami_gain(Rng& rng, int m);

}  // namespace tethercov
