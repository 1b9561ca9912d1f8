#include "tethercov/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tethercov/parallel.hpp"
#include "tethercov/rng.hpp"

namespace tethercov {

namespace {

// Evaluates f at every point (in parallel) and records them in input order.
OptimizationReport evaluate_all(const std::vector<Point3>& pts, const Objective& f, SearchMethod method) {
  if (pts.empty()) throw ConfigError("search grid is empty");
  std::vector<double> values(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { values[i] = f(pts[i]); });
  OptimizationReport r;
  r.method = method;
  r.trace.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) r.record(pts[i], values[i]);
  return r;
}

std::vector<double> steps_between(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  if (!(hi >= lo)) throw ConfigError("grid bounds are empty");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

// Offsets along an angular interval at the given step, always including both
// ends.
std::vector<double> sweep_offsets(double sweep, double step) {
  std::vector<double> out{0.0};
  if (sweep <= 0.0) return out;
  const auto n = static_cast<std::size_t>(std::ceil(sweep / step - 1e-9));
  for (std::size_t i = 1; i <= n; ++i) out.push_back(std::min(sweep, static_cast<double>(i) * step));
  return out;
}

OptimizationReport unmirrored(OptimizationReport r, const MirrorTransform& t) {
  r.best_location = t(r.best_location);
  for (auto& p : r.trace) p.location = t(p.location);
  return r;
}

bool location_less(const Point3& a, const Point3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.h < b.h;
}

}  // namespace

void TetherConfig::validate() const { cone_at({}).validate(); }

CanonicalGs mirror_canonicalize(const Scenario& /*s*/, const GroundStation& gs) {
  CanonicalGs out{gs, {}};
  if (gs.location.y < 0.0) {
    out.gs.location.y = -gs.location.y;
    out.unmirror.flip_y = true;
  }
  return out;
}

Point3 OptimalSurface::point(double h, double psi_angle) const {
  const double r = cropped_radius(cropped(), h, psi_angle);
  return {gs.location.x + r * std::cos(psi_angle), gs.location.y + r * std::sin(psi_angle), h};
}

OptimalSurface optimal_surface(const Scenario& s, const GroundStation& gs, const TetherConfig& tether) {
  tether.validate();
  if (gs.location.y < 0.0) throw GeometryError("optimal_surface: mirror the GS to y >= 0 first");
  OptimalSurface out;
  out.gs = gs;
  out.tether = tether;
  const Point2 n = project(gs.location);
  out.psi1 = angle_from_east(project(s.tbs), n);
  out.psi2 = angle_from_east(n, s.hotspot.center);
  out.psi = AngularInterval::from_to(out.psi1, out.psi2);
  out.h_lo = gs.location.h;
  out.h_hi = gs.location.h + tether.length;
  return out;
}

double distance_to_surface(const OptimalSurface& surf, const Point3& p, int h_samples, int psi_samples) {
  double best = std::numeric_limits<double>::infinity();
  const int np = surf.psi.sweep > 0.0 ? psi_samples : 1;
  for (int i = 0; i < h_samples; ++i) {
    const double h = surf.h_lo + (surf.h_hi - surf.h_lo) * i / (h_samples - 1);
    for (int j = 0; j < np; ++j) {
      const double t = np == 1 ? 0.0 : static_cast<double>(j) / (np - 1);
      best = std::min(best, distance3(surf.point(h, surf.psi.at(t)), p));
    }
  }
  return best;
}

void OptimizationReport::record(const Point3& p, double v) {
  ++evaluations;
  trace.push_back({p, v});
  if (v > best_value) {
    best_value = v;
    best_location = p;
  }
}

CoverageOptions search_coverage_options() {
  CoverageOptions o;
  o.abs_tol_single = 1e-5;
  o.abs_tol_double = 1e-4;
  return o;
}

Objective tuav_objective(const Scenario& s, const CoverageOptions& opt) {
  return [s, opt](const Point3& p) { return system_coverage_tuav(s, p, opt).value; };
}

Objective uuav_objective(const Scenario& s, double duty_cycle, const CoverageOptions& opt) {
  return [s, duty_cycle, opt](const Point3& p) { return system_coverage_uuav(s, p, duty_cycle, opt).value; };
}

LineGrid LineGrid::for_scenario(const Scenario& s) {
  LineGrid g;
  g.x_lo = s.hotspot.center.x - s.hotspot.radius;
  g.x_hi = s.tbs.x;
  return g;
}

namespace {

std::vector<Point3> line_points(const LineGrid& grid) {
  if (!(grid.h_lo > 0.0)) throw ConfigError("line grid heights must be positive");
  std::vector<Point3> pts;
  for (double x : steps_between(grid.x_lo, grid.x_hi, grid.x_step)) {
    for (double h : steps_between(grid.h_lo, grid.h_hi, grid.h_step)) pts.push_back({x, 0.0, h});
  }
  return pts;
}

}  // namespace

OptimizationReport grid_search_line(const Objective& f, const LineGrid& grid) {
  return evaluate_all(line_points(grid), f, SearchMethod::Grid);
}

OptimizationReport grid_search_uuav(const Scenario& s, double duty_cycle, const LineGrid& grid,
                                    const CoverageOptions& opt) {
  UavMode::untethered(duty_cycle).validate();
  auto pts = line_points(grid);
  // The backhaul is undefined with the UAV sitting on the TBS antenna.
  std::erase_if(pts, [&](const Point3& p) { return distance3(p, s.tbs) <= kGeomTol; });
  return evaluate_all(pts, uuav_objective(s, duty_cycle, opt), SearchMethod::Grid);
}

OptimizationReport grid_search_surface(const OptimalSurface& surf, const Objective& f, const SurfaceGrid& grid) {
  if (grid.h_divisions < 1) throw ConfigError("surface grid needs at least one height division");
  const auto cone = surf.cropped().cone;
  const auto offsets = sweep_offsets(surf.psi.sweep, grid.psi_step);
  std::vector<Point3> pts;
  for (int k = 0; k <= grid.h_divisions; ++k) {
    const double h = surf.h_lo + (surf.h_hi - surf.h_lo) * k / grid.h_divisions;
    if (h <= 0.0) continue;  // a GS at ground level: the apex is not a flight position
    if (cone_radius_at_height(cone, h) <= 0.0) {
      pts.push_back({surf.gs.location.x, surf.gs.location.y, h});
      continue;
    }
    for (double off : offsets) pts.push_back(surf.point(h, surf.psi.start + off));
  }
  return evaluate_all(pts, f, SearchMethod::Grid);
}

OptimizationReport grid_search_tuav(const Scenario& s, const GroundStation& gs, const TetherConfig& tether,
                                    const SurfaceGrid& grid, const Objective& f) {
  const auto c = mirror_canonicalize(s, gs);
  const auto surf = optimal_surface(s, c.gs, tether);
  return unmirrored(grid_search_surface(surf, f ? f : tuav_objective(s), grid), c.unmirror);
}

OptimizationReport grid_search_cone(const Scenario& /*s*/, const GroundStation& gs, const TetherConfig& tether,
                                    const ConeGrid& grid, const Objective& f) {
  if (grid.h_divisions < 1 || grid.r_divisions < 1 || !(grid.psi_step > 0.0)) {
    throw ConfigError("cone grid needs positive divisions and angular step");
  }
  const CroppedCone cc(tether.cone_at(gs.location));
  const double dr = tether.length / grid.r_divisions;
  const auto n_psi = static_cast<int>(std::ceil(kTwoPi / grid.psi_step - 1e-9));
  std::vector<Point3> pts;
  for (int k = 0; k <= grid.h_divisions; ++k) {
    const double h = gs.location.h + tether.length * k / grid.h_divisions;
    if (h <= 0.0) continue;
    pts.push_back({gs.location.x, gs.location.y, h});
    for (int j = 0; j < n_psi; ++j) {
      const double psi = j * grid.psi_step;
      const double r_max = cropped_radius(cc, h, psi);
      for (int i = 1; i * dr < r_max - 1e-9; ++i) {
        pts.push_back({gs.location.x + i * dr * std::cos(psi), gs.location.y + i * dr * std::sin(psi), h});
      }
      if (r_max > 1e-9) {
        pts.push_back({gs.location.x + r_max * std::cos(psi), gs.location.y + r_max * std::sin(psi), h});
      }
    }
  }
  return evaluate_all(pts, f, SearchMethod::Grid);
}

void AnnealParams::validate() const {
  if (!(initial_temperature > 0.0)) throw ConfigError("anneal temperature must be positive");
  if (!(cooling > 0.0 && cooling < 1.0)) throw ConfigError("anneal cooling must lie in (0, 1)");
  if (steps < 1 || moves_per_step < 1) throw ConfigError("anneal needs at least one step and move");
  if (!(sigma_h_fraction > 0.0) || !(sigma_psi > 0.0)) throw ConfigError("anneal proposal widths must be positive");
}

OptimizationReport anneal_surface(const OptimalSurface& surf, const Objective& f, const AnnealParams& params,
                                  std::uint64_t seed) {
  params.validate();
  Rng rng = make_stream(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h_min = std::max(surf.h_lo, 1e-6 * surf.tether.length);
  auto at = [&](double h, double off) { return surf.point(h, surf.psi.start + off); };

  OptimizationReport r;
  r.method = SearchMethod::Anneal;
  double h = 0.5 * (h_min + surf.h_hi);
  double off = 0.5 * surf.psi.sweep;
  double value = f(at(h, off));
  r.record(at(h, off), value);
  double temp = params.initial_temperature;
  for (int step = 0; step < params.steps; ++step) {
    for (int m = 0; m < params.moves_per_step; ++m) {
      const double h_new =
          std::clamp(h + params.sigma_h_fraction * surf.tether.length * normal(rng), h_min, surf.h_hi);
      const double off_new = std::clamp(off + params.sigma_psi * normal(rng), 0.0, surf.psi.sweep);
      const double v_new = f(at(h_new, off_new));
      r.record(at(h_new, off_new), v_new);
      if (v_new >= value || uniform01(rng) < std::exp((v_new - value) / temp)) {
        h = h_new;
        off = off_new;
        value = v_new;
      }
    }
    temp *= params.cooling;
  }
  return r;
}

OptimizationReport anneal_tuav(const Scenario& s, const GroundStation& gs, const TetherConfig& tether,
                               const AnnealParams& params, std::uint64_t seed, const Objective& f) {
  const auto c = mirror_canonicalize(s, gs);
  const auto surf = optimal_surface(s, c.gs, tether);
  return unmirrored(anneal_surface(surf, f ? f : tuav_objective(s), params, seed), c.unmirror);
}

GsSelection best_gs_selection(const Scenario& s, const std::vector<GroundStation>& gs_list,
                              const TetherConfig& tether, const SurfaceGrid& grid, const Objective& f) {
  const Objective obj = f ? f : tuav_objective(s);
  std::optional<GsSelection> best;
  for (std::size_t i = 0; i < gs_list.size(); ++i) {
    if (!gs_list[i].accessible) continue;
    auto rep = grid_search_tuav(s, gs_list[i], tether, grid, obj);
    const bool better = !best || rep.best_value > best->report.best_value ||
                        (rep.best_value == best->report.best_value &&
                         location_less(rep.best_location, best->report.best_location));
    if (better) best = GsSelection{i, std::move(rep)};
  }
  if (!best) throw ConfigError("best_gs_selection: no accessible ground station");
  return *best;
}

CoverageField::CoverageField(const Objective& exact, const Box& box) : exact_(exact), box_(box) {
  if (!(box.step > 0.0) || !(box.x_hi > box.x_lo) || !(box.y_hi > 0.0) || !(box.h_hi > box.h_lo) ||
      !(box.h_lo > 0.0)) {
    throw ConfigError("CoverageField: invalid box");
  }
  auto count = [&](double span) { return static_cast<std::size_t>(std::ceil(span / box.step - 1e-9)) + 1; };
  nx_ = count(box.x_hi - box.x_lo);
  ny_ = count(box.y_hi);
  nh_ = count(box.h_hi - box.h_lo);
  box_.x_hi = box.x_lo + static_cast<double>(nx_ - 1) * box.step;
  box_.y_hi = static_cast<double>(ny_ - 1) * box.step;
  box_.h_hi = box.h_lo + static_cast<double>(nh_ - 1) * box.step;
  values_.resize(nx_ * ny_ * nh_);
  parallel_for(values_.size(), [&](std::size_t idx) {
    const std::size_t k = idx % nh_;
    const std::size_t j = (idx / nh_) % ny_;
    const std::size_t i = idx / (nh_ * ny_);
    values_[idx] = exact_({box_.x_lo + static_cast<double>(i) * box_.step, static_cast<double>(j) * box_.step,
                           box_.h_lo + static_cast<double>(k) * box_.step});
  });
}

double CoverageField::operator()(const Point3& p) const {
  const double y = std::abs(p.y);
  if (p.x < box_.x_lo || p.x > box_.x_hi || y > box_.y_hi || p.h < box_.h_lo || p.h > box_.h_hi) {
    return exact_(p);
  }
  auto locate = [&](double v, double lo, std::size_t n, std::size_t& i, double& t) {
    const double u = (v - lo) / box_.step;
    i = std::min(static_cast<std::size_t>(u), n - 2);
    t = u - static_cast<double>(i);
  };
  std::size_t i, j, k;
  double tx, ty, th;
  locate(p.x, box_.x_lo, nx_, i, tx);
  locate(y, 0.0, ny_, j, ty);
  locate(p.h, box_.h_lo, nh_, k, th);
  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const double w = (a ? tx : 1.0 - tx) * (b ? ty : 1.0 - ty) * (c ? th : 1.0 - th);
        acc += w * at(i + a, j + b, k + c);
      }
    }
  }
  return acc;
}

EnsembleResult random_gs_ensemble(const Scenario& s, const EnsembleConfig& cfg, const Objective& search,
                                  const Objective& exact) {
  cfg.tether.validate();
  if (cfg.n_trials < 1) throw ConfigError("ensemble needs at least one trial");
  if (!(cfg.delta_a >= 0.0 && cfg.delta_a <= 1.0)) throw ConfigError("delta_A must lie in [0, 1]");
  if (!(cfg.gamma1 > 0.0 && cfg.gamma3 > 0.0)) throw ConfigError("gamma1 and gamma3 must be positive");
  const double half = cfg.region_half_side.value_or(s.hotspot.radius + cfg.tether.length);
  const double area_km2 = 4.0 * half * half / 1e6;
  const double p_br = coverage_tbs(s).value;

  EnsembleResult out;
  out.trial_values.assign(cfg.n_trials, 0.0);
  std::vector<char> no_gs(cfg.n_trials, 0);
  parallel_for(cfg.n_trials, [&](std::size_t t) {
    Rng rng = make_stream(cfg.seed, t);
    const auto count = std::poisson_distribution<long>(cfg.gamma3 * area_km2)(rng);
    std::vector<GroundStation> gs;
    for (long n = 0; n < count; ++n) {
      const double x = s.hotspot.center.x + half * (2.0 * uniform01(rng) - 1.0);
      const double y = s.hotspot.center.y + half * (2.0 * uniform01(rng) - 1.0);
      const double h = cfg.gamma1 * std::sqrt(-2.0 * std::log1p(-uniform01(rng)));
      const bool accessible = uniform01(rng) < cfg.delta_a;
      if (accessible && h > 0.0) gs.push_back({{x, y, h}, true});
    }
    std::optional<OptimizationReport> best;
    for (const auto& g : gs) {
      OptimizationReport rep;
      try {
        rep = grid_search_tuav(s, g, cfg.tether, cfg.grid, search);
      } catch (const GeometryError&) {
        continue;  // GS exactly over the TBS or the hot-spot centre
      }
      if (!best || rep.best_value > best->best_value) best = std::move(rep);
    }
    if (!best) {
      no_gs[t] = 1;
      out.trial_values[t] = p_br;
    } else {
      out.trial_values[t] = exact(best->best_location);
    }
  });
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t t = 0; t < cfg.n_trials; ++t) {
    sum += out.trial_values[t];
    sq += out.trial_values[t] * out.trial_values[t];
    out.trials_without_gs += static_cast<std::size_t>(no_gs[t]);
  }
  const double n = static_cast<double>(cfg.n_trials);
  out.mean = sum / n;
  if (cfg.n_trials > 1) {
    const double var = std::max(0.0, (sq - n * out.mean * out.mean) / (n - 1.0));
    out.ci_half_width = 1.96 * std::sqrt(var / n);
  }
  return out;
}

}  // namespace tethercov
