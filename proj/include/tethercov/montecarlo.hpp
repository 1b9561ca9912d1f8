#pragma once

// Brute-force sampling estimators that mirror every analytic quantity.
// Samples are drawn in fixed-size batches, each with its own RNG stream, and
// batch sums are combined in batch order, so results are bit-identical for a
// given seed regardless of thread count.

#include <cstdint>
#include <variant>
#include <vector>

#include "tethercov/coverage.hpp"
#include "tethercov/rng.hpp"

namespace tethercov {

struct UniformUsers {};
struct GaussianUsers {
  double std_dev = 50.0;  ///< per-axis standard deviation (m), truncated to the disk
};
using UserDistribution = std::variant<UniformUsers, GaussianUsers>;

struct McConfig {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
  UserDistribution users = UniformUsers{};
  std::uint64_t batch_size = 1 << 15;

  void validate() const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

Point2 sample_user(Rng& rng, const HotSpot& hs, const UserDistribution& dist);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> mass;  ///< fraction of all samples in each bin
  double underflow = 0.0;
  double overflow = 0.0;
  std::uint64_t n = 0;

  double width() const { return (hi - lo) / static_cast<double>(mass.size()); }
  double density(std::size_t i) const { return mass[i] / width(); }
};

/// Histogram of user-to-anchor distances over [lo, hi].
Histogram estimate_distance_pdf(const McConfig& cfg, const HotSpot& hs, const Point2& anchor,
                                std::size_t bins, double lo, double hi);

/// Histogram of user-to-UAV distances among users whose TBS distance lies
/// within `band` of r_b. Users are drawn uniformly from the annulus about the
/// TBS and kept when inside the hot-spot, which is the same law as uniform
/// users conditioned on the band. `cfg.n_samples` counts kept users.
Histogram estimate_conditional_distance_pdf(const McConfig& cfg, const HotSpot& hs, const Point2& tbs,
                                            const Point2& uav, double r_b, double band,
                                            std::size_t bins, double lo, double hi);

struct TbsLink {};
struct UavAccessLink {
  Point3 uav;
};
struct BackhaulLink {
  Point3 uav;
};
using LinkKind = std::variant<TbsLink, UavAccessLink, BackhaulLink>;

McEstimate estimate_link_coverage(const McConfig& cfg, const Scenario& s, const LinkKind& link);

struct McSystemEstimate {
  McEstimate coverage;
  McEstimate association;  ///< fraction of users served by the UAV
  CoverageBreakdown shares;  ///< covered fraction split by serving path
};

McSystemEstimate estimate_system_coverage(const McConfig& cfg, const Scenario& s, const Point3& uav,
                                          const UavMode& mode);

McEstimate estimate_association_probability(const McConfig& cfg, const Scenario& s, const Point3& uav,
                                            const UavMode& mode);

}  // namespace tethercov
