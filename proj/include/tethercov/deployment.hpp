#pragma once

// UAV placement: the reduced search surface for tethered drones, the x-axis
// line search for untethered drones, simulated annealing, ground-station
// selection and randomized ground-station ensembles.

#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "tethercov/coverage.hpp"

namespace tethercov {

struct GroundStation {
  Point3 location;
  bool accessible = true;
};

struct TetherConfig {
  double length = 50.0;
  double min_inclination = std::numbers::pi / 6.0;  ///< radians

  void validate() const;
  SphericalCone cone_at(const Point3& apex) const { return {apex, length, min_inclination}; }
};

/// Maps locations found in the mirrored (y >= 0) frame back to the caller's.
struct MirrorTransform {
  bool flip_y = false;
  Point3 operator()(const Point3& p) const { return flip_y ? Point3{p.x, -p.y, p.h} : p; }
};

struct CanonicalGs {
  GroundStation gs;
  MirrorTransform unmirror;
};

/// Reflects a ground station with y < 0 into the upper half-plane. The
/// scenario is symmetric about the x-axis, so nothing else changes.
CanonicalGs mirror_canonicalize(const Scenario& s, const GroundStation& gs);

/// Part of the cropped cone boundary that contains the coverage-maximizing
/// tethered position: R = R_bar(h, psi) for psi swept counterclockwise from
/// the TBS->GS direction to the GS->hot-spot-centre direction.
struct OptimalSurface {
  GroundStation gs;
  TetherConfig tether;
  double psi1 = 0.0;
  double psi2 = 0.0;
  AngularInterval psi;
  double h_lo = 0.0;
  double h_hi = 0.0;

  CroppedCone cropped() const { return CroppedCone(tether.cone_at(gs.location)); }
  Point3 point(double h, double psi_angle) const;
};

/// Requires y_n >= 0. Throws GeometryError when the GS projection coincides
/// with the TBS projection or the hot-spot centre.
OptimalSurface optimal_surface(const Scenario& s, const GroundStation& gs, const TetherConfig& tether);

/// Smallest distance from p to the surface, by dense sampling of (h, psi).
double distance_to_surface(const OptimalSurface& surf, const Point3& p, int h_samples = 201,
                           int psi_samples = 721);

enum class SearchMethod { Grid, Anneal };

struct TracePoint {
  Point3 location;
  double value = 0.0;
};

struct OptimizationReport {
  Point3 best_location;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::vector<TracePoint> trace;
  SearchMethod method = SearchMethod::Grid;

  void record(const Point3& p, double v);
};

using Objective = std::function<double(const Point3&)>;

/// Tolerances used inside searches; well below the gaps the searches resolve.
CoverageOptions search_coverage_options();

Objective tuav_objective(const Scenario& s, const CoverageOptions& opt = search_coverage_options());
Objective uuav_objective(const Scenario& s, double duty_cycle,
                         const CoverageOptions& opt = search_coverage_options());

struct LineGrid {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double x_step = 8.0;
  double h_lo = 10.0;
  double h_hi = 300.0;
  double h_step = 2.0;

  /// x from -R_o (relative to the hot-spot centre) to the TBS.
  static LineGrid for_scenario(const Scenario& s);
};

/// Exhaustive search over the x-axis segment x <= x_b times a height range.
OptimizationReport grid_search_uuav(const Scenario& s, double duty_cycle, const LineGrid& grid,
                                    const CoverageOptions& opt = search_coverage_options());

/// Same grid with an arbitrary objective, used for the tethered free optimum.
OptimizationReport grid_search_line(const Objective& f, const LineGrid& grid);

struct SurfaceGrid {
  double psi_step = std::numbers::pi / 180.0;
  int h_divisions = 50;  ///< h step = T / h_divisions
};

OptimizationReport grid_search_surface(const OptimalSurface& surf, const Objective& f,
                                       const SurfaceGrid& grid = {});

/// Grid over the surface for a GS given in any half-plane.
OptimizationReport grid_search_tuav(const Scenario& s, const GroundStation& gs, const TetherConfig& tether,
                                    const SurfaceGrid& grid = {}, const Objective& f = {});

struct ConeGrid {
  double psi_step = std::numbers::pi / 90.0;
  int h_divisions = 25;
  int r_divisions = 10;  ///< radial step = T / r_divisions, plus the boundary itself
};

/// Exhaustive search over the whole cropped cone (reference for the surface
/// reduction). The GS must satisfy y_n >= 0.
OptimizationReport grid_search_cone(const Scenario& s, const GroundStation& gs, const TetherConfig& tether,
                                    const ConeGrid& grid, const Objective& f);

struct AnnealParams {
  double initial_temperature = 0.05;
  double cooling = 0.9;
  int steps = 40;
  int moves_per_step = 10;
  double sigma_h_fraction = 0.1;  ///< proposal std in h, as a fraction of T
  double sigma_psi = 0.2;         ///< proposal std in psi (radians)

  void validate() const;
};

/// Simulated annealing over (h, psi) on the surface with Gaussian proposals
/// clamped to the surface bounds. Returns the best state visited.
OptimizationReport anneal_surface(const OptimalSurface& surf, const Objective& f, const AnnealParams& params,
                                  std::uint64_t seed);

OptimizationReport anneal_tuav(const Scenario& s, const GroundStation& gs, const TetherConfig& tether,
                               const AnnealParams& params, std::uint64_t seed, const Objective& f = {});

struct GsSelection {
  std::size_t index = 0;
  OptimizationReport report;
};

/// Optimizes every accessible GS and returns the best. Ties go to the
/// lexicographically smallest location, so the result does not depend on the
/// order of gs_list. Throws ConfigError when no GS is accessible.
GsSelection best_gs_selection(const Scenario& s, const std::vector<GroundStation>& gs_list,
                              const TetherConfig& tether, const SurfaceGrid& grid = {},
                              const Objective& f = {});

/// Tabulated objective on a regular (x, y >= 0, h) lattice with trilinear
/// interpolation. Queries with y < 0 use the x-axis reflection; queries
/// outside the box fall back to the exact objective.
class CoverageField {
 public:
  struct Box {
    double x_lo, x_hi, y_hi, h_lo, h_hi, step;
  };

  CoverageField(const Objective& exact, const Box& box);

  double operator()(const Point3& p) const;
  const Box& box() const { return box_; }

 private:
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values_[(i * ny_ + j) * nh_ + k]; }

  Objective exact_;
  Box box_;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::size_t nh_ = 0;
  std::vector<double> values_;
};

struct EnsembleConfig {
  double gamma1 = 20.0;         ///< Rayleigh scale of rooftop heights (m)
  double gamma3 = 300.0;        ///< buildings per km^2
  double delta_a = 0.3;         ///< fraction of accessible rooftops
  TetherConfig tether;
  std::size_t n_trials = 200;
  std::uint64_t seed = 1;
  /// Half side of the square sampling region about the hot-spot centre.
  /// Defaults to R_o + T when unset.
  std::optional<double> region_half_side;
  SurfaceGrid grid;
};

struct EnsembleResult {
  double mean = 0.0;
  double ci_half_width = 0.0;  ///< 95 % normal interval
  std::vector<double> trial_values;
  std::size_t trials_without_gs = 0;
};

/// Random rooftop layouts: Poisson count, uniform positions, Rayleigh heights,
/// each rooftop accessible with probability delta_a. Every trial picks the
/// best accessible GS and surface point using `search` (typically a
/// CoverageField) and scores that point with `exact`. Trials without an
/// accessible GS score the TBS-only coverage. Rooftop draws depend only on
/// (seed, trial, region), so sweeps over delta_a and T with a fixed region
/// share their random numbers.
EnsembleResult random_gs_ensemble(const Scenario& s, const EnsembleConfig& cfg, const Objective& search,
                                  const Objective& exact);

}  // namespace tethercov
