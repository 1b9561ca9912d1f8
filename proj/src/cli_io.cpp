#include "tethercov/cli_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "tethercov/montecarlo.hpp"
#include "tethercov/parallel.hpp"

namespace tethercov {

namespace {

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_->contains(key); }

  const Json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    return v->get<std::int64_t>();
  }

  std::optional<std::string> string(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v->get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key, std::size_t n) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_array() || (n != 0 && v->size() != n)) {
      throw ConfigError(where(key) + ": expected an array of " + (n ? std::to_string(n) + " " : "") + "numbers");
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<Section> section(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    return Section(*v, where(key));
  }

  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw ConfigError(where(it.key()) + ": unknown key (units go in the key name, e.g. rho_b_dbm)");
      }
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

 private:
  const Json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

Point3 to_point3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

void parse_environment(Section sec, EnvironmentParams& env) {
  if (auto v = sec.number("gamma1_m")) env.gamma1 = *v;
  if (auto v = sec.number("gamma2")) env.gamma2 = *v;
  if (auto v = sec.number("gamma3_per_km2")) env.gamma3 = *v;
  if (auto v = sec.number("a_r")) env.a_r = *v;
  if (auto v = sec.number("b_r")) env.b_r = *v;
  if (auto v = sec.number("a_b")) env.a_b = *v;
  if (auto v = sec.number("b_b")) env.b_b = *v;
  sec.finish();
}

void parse_link(Section sec, LinkParams& link) {
  if (auto v = sec.number("rho_b_dbm")) link.rho_b = dbm_to_mw(*v);
  if (auto v = sec.number("rho_u_dbm")) link.rho_u = dbm_to_mw(*v);
  if (auto v = sec.number("noise_dbm")) link.sigma_n2 = dbm_to_mw(*v);
  if (auto v = sec.number("alpha_b")) link.alpha_b = *v;
  if (auto v = sec.number("alpha_u")) link.alpha_u = *v;
  if (auto v = sec.number("eta_los_db")) link.eta_los = db_to_linear(*v);
  if (auto v = sec.number("eta_nlos_db")) link.eta_nlos = db_to_linear(*v);
  if (auto v = sec.integer("nakagami_m")) link.m = static_cast<int>(*v);
  if (auto v = sec.number("mu")) link.mu = *v;
  sec.finish();
}

Scenario parse_scenario(Section sec) {
  Scenario s = Scenario::dense_urban();
  if (auto p = sec.string("preset")) {
    if (*p == "dense_urban") {
      s = Scenario::dense_urban();
    } else if (*p == "high_rise") {
      s = Scenario::high_rise();
    } else {
      throw ConfigError(sec.where("preset") + ": expected dense_urban or high_rise");
    }
  }
  if (auto hs = sec.section("hotspot")) {
    if (auto c = hs->numbers("center_m", 2)) s.hotspot.center = {(*c)[0], (*c)[1]};
    if (auto r = hs->number("radius_m")) s.hotspot.radius = *r;
    hs->finish();
  }
  if (auto tbs = sec.section("tbs")) {
    if (auto p = tbs->numbers("position_m", 3)) s.tbs = to_point3(*p);
    tbs->finish();
  }
  if (auto env = sec.section("environment")) parse_environment(*env, s.env);
  if (auto link = sec.section("link")) parse_link(*link, s.link);
  double beta = s.threshold.beta;
  const auto beta_lin = sec.number("beta");
  const auto beta_db = sec.number("beta_db");
  if (beta_lin && beta_db) throw ConfigError(sec.where("beta") + ": give beta or beta_db, not both");
  if (beta_lin) beta = *beta_lin;
  if (beta_db) beta = db_to_linear(*beta_db);
  sec.finish();
  s.env.validate();
  s.link.validate();
  s.threshold = SnrThreshold::make(beta, s.link);
  s.validate();
  return s;
}

void parse_uav(Section sec, RunConfig& cfg) {
  if (auto m = sec.string("mode")) {
    if (*m == "tethered") {
      cfg.mode = UavMode::tethered();
    } else if (*m == "untethered") {
      cfg.mode = UavMode::untethered(1.0);
    } else {
      throw ConfigError(sec.where("mode") + ": expected tethered or untethered");
    }
  }
  if (auto a = sec.number("duty_cycle")) cfg.mode.duty_cycle = *a;
  if (auto p = sec.numbers("position_m", 3)) cfg.uav = to_point3(*p);
  if (auto t = sec.section("tether")) {
    if (auto v = t->number("length_m")) cfg.tether.length = *v;
    if (auto v = t->number("min_inclination_deg")) cfg.tether.min_inclination = *v * kDegToRad;
    t->finish();
  }
  if (const Json* list = sec.raw("ground_stations")) {
    if (!list->is_array()) throw ConfigError(sec.where("ground_stations") + ": expected an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      Section g((*list)[i], sec.where("ground_stations") + "[" + std::to_string(i) + "]");
      GroundStation gs;
      auto p = g.numbers("position_m", 3);
      if (!p) throw ConfigError(g.where("position_m") + ": required");
      gs.location = to_point3(*p);
      if (gs.location.h < 0.0) throw ConfigError(g.where("position_m") + ": rooftop height must be >= 0");
      if (auto a = g.boolean("accessible")) gs.accessible = *a;
      g.finish();
      cfg.ground_stations.push_back(gs);
    }
  }
  sec.finish();
  cfg.mode.validate();
  cfg.tether.validate();
}

std::vector<double> range_values(const std::vector<double>& r, const std::string& where) {
  const double lo = r[0];
  const double hi = r[1];
  const double step = r[2];
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError(where + ": expected [lo, hi, step] with lo <= hi, step > 0");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

// Metric names shared by coverage-map and sweep.
const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"P_t", "P_u", "P_br", "P_ur", "P_bu", "P_bur", "assoc_t", "assoc_u"};
  return names;
}

void check_metric(const std::string& m) {
  for (const auto& n : metric_names()) {
    if (n == m) return;
  }
  throw ConfigError("unknown metric '" + m + "'");
}

double eval_metric(const std::string& m, const Scenario& s, const Point3& uav, double duty) {
  if (m == "P_t") return system_coverage_tuav(s, uav).value;
  if (m == "P_u") return system_coverage_uuav(s, uav, duty).value;
  if (m == "P_br") return coverage_tbs(s).value;
  if (m == "P_ur") return coverage_uav_access(s, uav).value;
  if (m == "P_bu") return coverage_backhaul(s, uav);
  if (m == "P_bur") return coverage_end_to_end(s, uav, UavMode::untethered(1.0));
  if (m == "assoc_t") return association_probability(s, uav, UavMode::tethered());
  if (m == "assoc_u") return association_probability(s, uav, UavMode::untethered(duty));
  throw ConfigError("unknown metric '" + m + "'");
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<std::string> parse_metrics(Section& sec, std::vector<std::string> fallback) {
  const Json* v = sec.raw("metrics");
  if (!v) return fallback;
  if (!v->is_array() || v->empty()) throw ConfigError(sec.where("metrics") + ": expected a non-empty array");
  std::vector<std::string> out;
  for (const auto& e : *v) {
    if (!e.is_string()) throw ConfigError(sec.where("metrics") + ": expected metric names");
    check_metric(e.get<std::string>());
    out.push_back(e.get<std::string>());
  }
  return out;
}

const char* class_name(UserClass c) {
  switch (c) {
    case UserClass::UavAlways:
      return "UAV";
    case UserClass::UavIfLos:
      return "UAV_IF_LOS";
    case UserClass::TbsAlways:
      return "TBS";
  }
  return "?";
}

std::string format_cell(const Json& v) {
  if (v.is_null()) return "nan";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
  return buf;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const Json& doc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a64(doc.dump()));
  return buf;
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("unknown output format '" + name + "' (csv or json)");
}

RunConfig parse_config(const Json& doc) {
  Section root(doc, "config");
  RunConfig cfg;
  if (auto s = root.section("scenario")) cfg.scenario = parse_scenario(*s);
  if (auto u = root.section("uav")) parse_uav(*u, cfg);
  if (const Json* e = root.raw("experiment")) {
    if (!e->is_object()) throw ConfigError("config.experiment: expected an object");
    cfg.experiment = *e;
  }
  if (auto o = root.section("output")) {
    if (auto f = o->string("format")) cfg.format = parse_format(*f);
    if (auto p = o->string("path")) cfg.out_path = *p;
    o->finish();
  }
  if (const Json* seed = root.raw("seed")) {
    if (!seed->is_number_integer() || (!seed->is_number_unsigned() && seed->get<std::int64_t>() < 0)) {
      throw ConfigError("config.seed: expected a non-negative integer");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }
  root.finish();
  cfg.hash = config_hash(doc);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(doc);
}

Json dense_urban_config_json() {
  return Json{
      {"scenario",
       {{"preset", "dense_urban"},
        {"hotspot", {{"center_m", {0.0, 0.0}}, {"radius_m", 150.0}}},
        {"tbs", {{"position_m", {170.0, 0.0, 10.0}}}},
        {"environment",
         {{"gamma1_m", 20.0},
          {"gamma2", 0.3},
          {"gamma3_per_km2", 300.0},
          {"a_r", 13.0},
          {"b_r", 0.22},
          {"a_b", 7.0},
          {"b_b", 0.2}}},
        {"link",
         {{"rho_b_dbm", 1.0},
          {"rho_u_dbm", 1.0},
          {"noise_dbm", -80.0},
          {"alpha_b", 3.0},
          {"alpha_u", 2.7},
          {"eta_los_db", 1.6},
          {"eta_nlos_db", 23.0},
          {"nakagami_m", 2},
          {"mu", 1.0}}},
        {"beta", 15.0}}},
      {"uav",
       {{"mode", "tethered"},
        {"duty_cycle", 1.0},
        {"position_m", {0.0, 0.0, 100.0}},
        {"tether", {{"length_m", 50.0}, {"min_inclination_deg", 30.0}}}}},
      {"output", {{"format", "csv"}}},
      {"seed", 1}};
}

SweepSpec parse_sweep(const Json& j) {
  Section sec(j, "sweep");
  SweepSpec spec;
  auto var = sec.string("variable");
  if (!var) throw ConfigError("sweep.variable: required");
  static const std::set<std::string> allowed{"uav_x", "uav_h", "tbs_x", "tether_T", "delta_A", "duty_A", "beta"};
  if (!allowed.contains(*var)) throw ConfigError("sweep.variable: unknown variable '" + *var + "'");
  spec.variable = *var;
  auto values = sec.numbers("values", 0);
  auto range = sec.numbers("range", 3);
  if (values && range) throw ConfigError("sweep: give values or range, not both");
  if (range) values = range_values(*range, "sweep.range");
  if (!values || values->empty()) throw ConfigError("sweep: values must be non-empty");
  const auto& v = *values;
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    up = up && v[i] > v[i - 1];
    down = down && v[i] < v[i - 1];
  }
  if (!up && !down) throw ConfigError("sweep: values must be strictly monotone");
  spec.values = v;
  return spec;
}

CommandOutput run_validate(const RunConfig& cfg) {
  Section ex(cfg.experiment, "experiment");
  McConfig mc;
  mc.seed = cfg.seed;
  mc.n_samples = static_cast<std::uint64_t>(ex.integer("mc_samples").value_or(100000));
  const double tol_link = ex.number("tolerance_link").value_or(0.005);
  const double tol_system = ex.number("tolerance_system").value_or(0.01);
  ex.finish();
  mc.validate();

  const Scenario& s = cfg.scenario;
  const Point3 uav = cfg.uav;
  const double duty = cfg.mode.kind == UavMode::Kind::Untethered ? cfg.mode.duty_cycle : 0.8;

  CommandOutput out;
  out.command = "validate";
  out.table.columns = {"check", "analytic", "monte_carlo", "std_error", "tolerance", "pass"};
  auto add = [&](const std::string& name, double analytic, const McEstimate& est, double tol) {
    const double allowed = std::max(tol, 4.0 * est.std_error);
    const bool pass = std::abs(analytic - est.mean) <= allowed;
    out.ok = out.ok && pass;
    out.table.rows.push_back({name, analytic, est.mean, est.std_error, allowed, pass});
  };
  add("tbs_link", coverage_tbs(s).value, estimate_link_coverage(mc, s, TbsLink{}), tol_link);
  add("uav_access_link", coverage_uav_access(s, uav).value, estimate_link_coverage(mc, s, UavAccessLink{uav}),
      tol_link);
  add("backhaul_link", coverage_backhaul(s, uav), estimate_link_coverage(mc, s, BackhaulLink{uav}), tol_link);
  const auto sys_t = estimate_system_coverage(mc, s, uav, UavMode::tethered());
  add("system_tethered", system_coverage_tuav(s, uav).value, sys_t.coverage, tol_system);
  add("association_tethered", association_probability(s, uav, UavMode::tethered()), sys_t.association,
      tol_system);
  const auto sys_u = estimate_system_coverage(mc, s, uav, UavMode::untethered(duty));
  add("system_untethered", system_coverage_uuav(s, uav, duty).value, sys_u.coverage, tol_system);
  add("association_untethered", association_probability(s, uav, UavMode::untethered(duty)), sys_u.association,
      tol_system);

  // Same seed, same estimate, bit for bit.
  const auto again = estimate_link_coverage(mc, s, TbsLink{});
  const auto first = estimate_link_coverage(mc, s, TbsLink{});
  const bool same = again.mean == first.mean && again.std_error == first.std_error;
  out.ok = out.ok && same;
  out.table.rows.push_back({"seed_replay", first.mean, again.mean, 0.0, 0.0, same});

  Json checks = Json::array();
  for (const auto& r : out.table.rows) {
    Json c;
    for (std::size_t i = 0; i < out.table.columns.size(); ++i) c[out.table.columns[i]] = r[i];
    checks.push_back(c);
  }
  out.report = Json{{"mc_samples", mc.n_samples}, {"checks", checks}, {"all_pass", out.ok}};
  return out;
}

CommandOutput run_coverage_map(const RunConfig& cfg) {
  Section ex(cfg.experiment, "experiment");
  const auto xs = range_values(ex.numbers("x_m", 3).value_or(std::vector<double>{-200.0, 200.0, 8.0}),
                               "experiment.x_m");
  const auto ys = range_values(ex.numbers("y_m", 3).value_or(std::vector<double>{-200.0, 200.0, 8.0}),
                               "experiment.y_m");
  const double h = ex.number("h_m").value_or(cfg.uav.h);
  const std::string metric =
      ex.string("metric").value_or(cfg.mode.kind == UavMode::Kind::Tethered ? "P_t" : "P_u");
  ex.finish();
  check_metric(metric);
  if (!(h > 0.0)) throw ConfigError("experiment.h_m must be positive");

  std::vector<double> values(xs.size() * ys.size());
  parallel_for(values.size(), [&](std::size_t i) {
    const Point3 p{xs[i % xs.size()], ys[i / xs.size()], h};
    try {
      values[i] = eval_metric(metric, cfg.scenario, p, cfg.mode.duty_cycle);
    } catch (const GeometryError&) {
      values[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  CommandOutput out;
  out.command = "coverage-map";
  out.table.columns = {"x", "y", "h", metric};
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.table.rows.push_back({xs[i % xs.size()], ys[i / xs.size()], h, number_or_null(values[i])});
  }
  return out;
}

Json report_to_json(const OptimizationReport& r) {
  Json trace = Json::array();
  for (const auto& t : r.trace) trace.push_back({t.location.x, t.location.y, t.location.h, t.value});
  return Json{{"method", r.method == SearchMethod::Grid ? "grid" : "anneal"},
              {"best_location_m", {r.best_location.x, r.best_location.y, r.best_location.h}},
              {"best_value", r.best_value},
              {"evaluations", r.evaluations},
              {"trace", trace}};
}

OptimizationReport report_from_json(const Json& j) {
  Section sec(j, "report");
  OptimizationReport r;
  const auto method = sec.string("method");
  if (!method || (*method != "grid" && *method != "anneal")) throw ConfigError("report.method: grid or anneal");
  r.method = *method == "grid" ? SearchMethod::Grid : SearchMethod::Anneal;
  const auto best = sec.numbers("best_location_m", 3);
  const auto value = sec.number("best_value");
  const auto evals = sec.integer("evaluations");
  if (!best || !value || !evals) throw ConfigError("report: missing best_location_m, best_value or evaluations");
  const Json* trace = sec.raw("trace");
  // Command-specific extras written by the optimize command.
  for (const char* extra : {"gs_index", "distance_to_surface_m", "duty_cycle"}) sec.raw(extra);
  sec.finish();
  if (trace) {
    for (const auto& t : *trace) {
      if (!t.is_array() || t.size() != 4) throw ConfigError("report.trace: expected [x, y, h, value] rows");
      r.trace.push_back({{t[0].get<double>(), t[1].get<double>(), t[2].get<double>()}, t[3].get<double>()});
    }
  }
  r.best_location = to_point3(*best);
  r.best_value = *value;
  r.evaluations = static_cast<std::size_t>(*evals);
  return r;
}

CommandOutput run_optimize(const RunConfig& cfg) {
  Section ex(cfg.experiment, "experiment");
  const std::string method = ex.string("method").value_or("grid");
  if (method != "grid" && method != "anneal") throw ConfigError("experiment.method: grid or anneal");
  const bool include_trace = ex.boolean("include_trace").value_or(true);
  const Scenario& s = cfg.scenario;

  OptimizationReport report;
  Json extra = Json::object();
  if (cfg.mode.kind == UavMode::Kind::Untethered) {
    if (method != "grid") throw ConfigError("experiment.method: the untethered search is a grid search");
    LineGrid grid = LineGrid::for_scenario(s);
    if (auto l = ex.section("line")) {
      if (auto v = l->numbers("x_m", 2)) grid.x_lo = (*v)[0], grid.x_hi = (*v)[1];
      if (auto v = l->number("x_step_m")) grid.x_step = *v;
      if (auto v = l->numbers("h_m", 2)) grid.h_lo = (*v)[0], grid.h_hi = (*v)[1];
      if (auto v = l->number("h_step_m")) grid.h_step = *v;
      l->finish();
    }
    report = grid_search_uuav(s, cfg.mode.duty_cycle, grid);
    extra["duty_cycle"] = cfg.mode.duty_cycle;
  } else {
    if (cfg.ground_stations.empty()) throw ConfigError("tethered optimize needs uav.ground_stations");
    SurfaceGrid grid;
    if (auto g = ex.section("surface")) {
      if (auto v = g->number("psi_step_deg")) grid.psi_step = *v * kDegToRad;
      if (auto v = g->integer("h_divisions")) grid.h_divisions = static_cast<int>(*v);
      g->finish();
    }
    AnnealParams ap;
    if (auto a = ex.section("anneal")) {
      if (auto v = a->number("initial_temperature")) ap.initial_temperature = *v;
      if (auto v = a->number("cooling")) ap.cooling = *v;
      if (auto v = a->integer("steps")) ap.steps = static_cast<int>(*v);
      if (auto v = a->integer("moves_per_step")) ap.moves_per_step = static_cast<int>(*v);
      if (auto v = a->number("sigma_h_fraction")) ap.sigma_h_fraction = *v;
      if (auto v = a->number("sigma_psi_rad")) ap.sigma_psi = *v;
      a->finish();
    }
    std::size_t index = 0;
    if (method == "grid") {
      auto sel = best_gs_selection(s, cfg.ground_stations, cfg.tether, grid);
      index = sel.index;
      report = std::move(sel.report);
    } else {
      std::optional<GsSelection> best;
      for (std::size_t i = 0; i < cfg.ground_stations.size(); ++i) {
        if (!cfg.ground_stations[i].accessible) continue;
        auto r = anneal_tuav(s, cfg.ground_stations[i], cfg.tether, ap, cfg.seed);
        if (!best || r.best_value > best->report.best_value) best = GsSelection{i, std::move(r)};
      }
      if (!best) throw ConfigError("no accessible ground station");
      index = best->index;
      report = std::move(best->report);
    }
    const auto c = mirror_canonicalize(s, cfg.ground_stations[index]);
    const auto surf = optimal_surface(s, c.gs, cfg.tether);
    extra["gs_index"] = index;
    extra["distance_to_surface_m"] = distance_to_surface(surf, c.unmirror(report.best_location));
  }
  ex.finish();

  CommandOutput out;
  out.command = "optimize";
  out.report = report_to_json(report);
  if (!include_trace) (*out.report)["trace"] = Json::array();
  for (auto it = extra.begin(); it != extra.end(); ++it) (*out.report)[it.key()] = it.value();
  out.table.columns = {"x", "y", "h", "value", "is_best"};
  const auto& b = report.best_location;
  for (const auto& t : include_trace ? report.trace : std::vector<TracePoint>{}) {
    const bool is_best = t.value == report.best_value && t.location.x == b.x && t.location.y == b.y &&
                         t.location.h == b.h;
    out.table.rows.push_back({t.location.x, t.location.y, t.location.h, t.value, is_best});
  }
  if (!include_trace) out.table.rows.push_back({b.x, b.y, b.h, report.best_value, true});
  return out;
}

CommandOutput run_sweep(const RunConfig& cfg) {
  Section ex(cfg.experiment, "experiment");
  const Json* sweep_json = ex.raw("sweep");
  if (!sweep_json) throw ConfigError("experiment.sweep: required");
  const SweepSpec spec = parse_sweep(*sweep_json);
  const auto metrics = parse_metrics(ex, metric_names());
  EnsembleConfig ens;
  ens.tether = cfg.tether;
  ens.seed = cfg.seed;
  ens.gamma1 = cfg.scenario.env.gamma1;
  ens.gamma3 = cfg.scenario.env.gamma3;
  double field_step = 10.0;
  if (auto e = ex.section("ensemble")) {
    if (auto v = e->integer("n_trials")) ens.n_trials = static_cast<std::size_t>(*v);
    if (auto v = e->number("delta_a")) ens.delta_a = *v;
    if (auto v = e->number("field_step_m")) field_step = *v;
    e->finish();
  }
  ex.finish();

  CommandOutput out;
  out.command = "sweep";
  const bool ensemble = spec.variable == "tether_T" || spec.variable == "delta_A";
  if (ensemble) {
    const Scenario& s = cfg.scenario;
    double t_max = cfg.tether.length;
    if (spec.variable == "tether_T") {
      for (double v : spec.values) {
        if (!(v > 0.0)) throw ConfigError("tether_T values must be positive");
        t_max = std::max(t_max, v);
      }
    }
    // Fixed sampling region so every sweep value sees the same rooftops.
    ens.region_half_side = s.hotspot.radius + t_max;
    const double reach = s.hotspot.radius + 2.0 * t_max;
    const double h_top = 6.0 * ens.gamma1 + t_max + field_step;
    const Objective exact = tuav_objective(s, CoverageOptions{});
    const CoverageField field(tuav_objective(s),
                              {s.hotspot.center.x - reach, s.hotspot.center.x + reach,
                               std::abs(s.hotspot.center.y) + reach, 1.0, h_top, field_step});
    const Objective search = [&field](const Point3& p) { return field(p); };
    out.table.columns = {spec.variable, "P_t_mean", "P_t_ci95", "trials_without_gs"};
    for (double v : spec.values) {
      EnsembleConfig c = ens;
      if (spec.variable == "tether_T") c.tether.length = v;
      if (spec.variable == "delta_A") c.delta_a = v;
      const auto r = random_gs_ensemble(s, c, search, exact);
      out.table.rows.push_back({v, r.mean, r.ci_half_width, r.trials_without_gs});
    }
    return out;
  }

  out.table.columns = {spec.variable};
  for (const auto& m : metrics) out.table.columns.push_back(m);
  std::vector<std::vector<double>> values(spec.values.size(), std::vector<double>(metrics.size()));
  parallel_for(spec.values.size() * metrics.size(), [&](std::size_t idx) {
    const std::size_t i = idx / metrics.size();
    const std::size_t k = idx % metrics.size();
    const double v = spec.values[i];
    Scenario s = cfg.scenario;
    Point3 uav = cfg.uav;
    double duty = cfg.mode.duty_cycle;
    if (spec.variable == "uav_x") uav.x = v;
    if (spec.variable == "uav_h") uav.h = v;
    if (spec.variable == "tbs_x") s.tbs.x = v;
    if (spec.variable == "duty_A") duty = v;
    if (spec.variable == "beta") s.threshold = SnrThreshold::make(v, s.link);
    try {
      values[i][k] = eval_metric(metrics[k], s, uav, duty);
    } catch (const GeometryError&) {
      values[i][k] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    std::vector<Json> row{spec.values[i]};
    for (double x : values[i]) row.push_back(number_or_null(x));
    out.table.rows.push_back(std::move(row));
  }
  return out;
}

CommandOutput run_association_map(const RunConfig& cfg) {
  Section ex(cfg.experiment, "experiment");
  const auto& hs = cfg.scenario.hotspot;
  const double r = hs.radius;
  const auto xs = range_values(
      ex.numbers("x_m", 3).value_or(std::vector<double>{hs.center.x - r, hs.center.x + r, 2.0}), "experiment.x_m");
  const auto ys = range_values(
      ex.numbers("y_m", 3).value_or(std::vector<double>{hs.center.y - r, hs.center.y + r, 2.0}), "experiment.y_m");
  std::size_t n_users = 0;
  UserDistribution dist = UniformUsers{};
  if (auto u = ex.section("users")) {
    const std::string d = u->string("distribution").value_or("uniform");
    if (d == "gaussian") {
      dist = GaussianUsers{u->number("std_m").value_or(50.0)};
    } else if (d != "uniform") {
      throw ConfigError("experiment.users.distribution: uniform or gaussian");
    }
    const auto count = u->integer("count").value_or(1000);
    if (count < 0) throw ConfigError("experiment.users.count must be >= 0");
    n_users = static_cast<std::size_t>(count);
    u->finish();
  }
  ex.finish();

  CommandOutput out;
  out.command = "association-map";
  out.table.columns = {"kind", "x", "y", "in_hotspot", "class"};
  const Scenario& s = cfg.scenario;
  for (double y : ys) {
    for (double x : xs) {
      const Point2 p{x, y};
      const bool inside = distance2(p, hs.center) <= r;
      out.table.rows.push_back({"grid", x, y, inside, class_name(classify_user(s, cfg.uav, p))});
    }
  }
  Rng rng = make_stream(cfg.seed, 0);
  for (std::size_t i = 0; i < n_users; ++i) {
    const Point2 p = sample_user(rng, hs, dist);
    out.table.rows.push_back({"user", p.x, p.y, true, class_name(classify_user(s, cfg.uav, p))});
  }
  return out;
}

void write_output(std::ostream& os, const CommandOutput& out, OutputFormat format, const RunConfig& cfg) {
  if (format == OutputFormat::Json) {
    Json rows = Json::array();
    for (const auto& r : out.table.rows) rows.push_back(r);
    Json doc{{"schema_version", kSchemaVersion},
             {"command", out.command},
             {"config_hash", cfg.hash},
             {"seed", cfg.seed},
             {"ok", out.ok},
             {"columns", out.table.columns},
             {"rows", rows}};
    if (out.report) doc["report"] = *out.report;
    os << doc.dump(2) << '\n';
    return;
  }
  os << "# tethercov " << out.command << '\n'
     << "# schema_version " << kSchemaVersion << '\n'
     << "# config_hash " << cfg.hash << '\n'
     << "# seed " << cfg.seed << '\n';
  for (std::size_t i = 0; i < out.table.columns.size(); ++i) {
    os << (i ? "," : "") << out.table.columns[i];
  }
  os << '\n';
  for (const auto& r : out.table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_cell(r[i]);
    os << '\n';
  }
}

}  // namespace tethercov
