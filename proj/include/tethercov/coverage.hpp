#pragma once

// Link and system coverage probabilities for a hot-spot served by a TBS and a
// tethered or untethered UAV.

#include <array>

#include "tethercov/channel.hpp"
#include "tethercov/distributions.hpp"

namespace tethercov {

struct Scenario {
  HotSpot hotspot;
  Point3 tbs{170.0, 0.0, 10.0};
  EnvironmentParams env;
  LinkParams link;
  SnrThreshold threshold = SnrThreshold::make(15.0, LinkParams{});

  void validate() const;

  /// Dense-urban defaults: R_o = 150 m, TBS at {170, 0, 10}.
  static Scenario dense_urban();
  /// High-rise preset with a 30 m TBS mast.
  static Scenario high_rise();
};

struct UavMode {
  enum class Kind { Tethered, Untethered } kind = Kind::Tethered;
  double duty_cycle = 1.0;  ///< availability A, untethered only

  static UavMode tethered() { return {}; }
  static UavMode untethered(double a) { return {Kind::Untethered, a}; }
  void validate() const;
};

struct CoverageBreakdown {
  double uav_los = 0.0;
  double uav_nlos = 0.0;
  double tbs_los_region = 0.0;   ///< TBS-served users with a LoS UAV link
  double tbs_nlos_region = 0.0;  ///< TBS-served users with a NLoS UAV link
  double unavailable = 0.0;      ///< TBS coverage with no UAV in service

  double sum() const { return uav_los + uav_nlos + tbs_los_region + tbs_nlos_region + unavailable; }
};

struct CoverageResult {
  double value = 0.0;
  double quad_error = 0.0;
  CoverageBreakdown breakdown;
};

struct CoverageOptions {
  double abs_tol_single = 1e-6;
  double abs_tol_double = 1e-5;
  std::size_t max_evals = 100000;
};

/// Horizontal user-to-UAV radius below which the user prefers the UAV, as a
/// function of the horizontal user-to-TBS distance r_b. Compares mean SNRs
/// using full 3-D distances.
class AssociationBoundary {
 public:
  AssociationBoundary(const Scenario& s, double uav_height);

  double lambda_los(double r_b) const { return lambda(r_b, eta_los_); }
  double lambda_nlos(double r_b) const { return lambda(r_b, eta_nlos_); }

 private:
  double lambda(double r_b, double eta) const;

  double h_b_;
  double h_u_;
  double alpha_b_;
  double alpha_u_;
  double ratio_;  ///< rho_u mu / rho_b
  double eta_los_;
  double eta_nlos_;
};

AssociationBoundary association_boundary(const Scenario& s, double uav_height);

enum class UserClass { UavAlways, UavIfLos, TbsAlways };

UserClass classify_user(const Scenario& s, const Point3& uav, const Point2& user);

/// P(SNR > beta) for a Rayleigh terrestrial link at horizontal distance r_b.
double kernel_tbs(const SnrThreshold& th, const LinkParams& link, double r_b, double h_b);

/// P(SNR > beta) for a Nakagami-m aerial link at horizontal distance r and
/// height difference dh.
double kernel_uav(const SnrThreshold& th, const LinkParams& link, double r, double dh, bool los);

CoverageResult coverage_tbs(const Scenario& s, const CoverageOptions& opt = {});
CoverageResult coverage_uav_access(const Scenario& s, const Point3& uav, const CoverageOptions& opt = {});
double coverage_backhaul(const Scenario& s, const Point3& uav);
double coverage_end_to_end(const Scenario& s, const Point3& uav, const UavMode& mode,
                           const CoverageOptions& opt = {});

/// Unscaled terms of the system integral: UAV-served coverage under LoS and
/// NLoS access, and TBS-served coverage of users in the LoS / NLoS
/// association regions.
struct SystemTerms {
  std::array<double, 4> value{};
  double error = 0.0;
};

/// Evaluates the double integral over (r_b, r_u). With `association_only`
/// every kernel is replaced by 1 and the TBS terms vanish, so the first two
/// entries sum to the UAV association probability.
SystemTerms system_terms(const Scenario& s, const Point3& uav, bool association_only,
                         const CoverageOptions& opt = {});

CoverageResult system_coverage_tuav(const Scenario& s, const Point3& uav, const CoverageOptions& opt = {});
CoverageResult system_coverage_uuav(const Scenario& s, const Point3& uav, double duty_cycle,
                                    const CoverageOptions& opt = {});
CoverageResult system_coverage(const Scenario& s, const Point3& uav, const UavMode& mode,
                               const CoverageOptions& opt = {});

/// Probability that the reference user is served by the UAV (availability
/// weighted for the untethered mode).
double association_probability(const Scenario& s, const Point3& uav, const UavMode& mode,
                               const CoverageOptions& opt = {});

}  // namespace tethercov
