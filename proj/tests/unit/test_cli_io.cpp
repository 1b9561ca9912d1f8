#include <doctest.h>

#include <set>
#include <sstream>

#include "tethercov/cli_io.hpp"

using namespace tethercov;
using doctest::Approx;

namespace {

std::string render(const CommandOutput& out, OutputFormat f, const RunConfig& cfg) {
  std::ostringstream os;
  write_output(os, out, f, cfg);
  return os.str();
}

}  // namespace

TEST_SUITE("cli_io") {
  TEST_CASE("default config is the dense-urban table") {
    const auto cfg = parse_config(dense_urban_config_json());
    const Scenario ref = Scenario::dense_urban();
    CHECK(cfg.scenario.hotspot.radius == 150.0);
    CHECK(cfg.scenario.tbs.x == 170.0);
    CHECK(cfg.scenario.tbs.h == 10.0);
    CHECK(cfg.scenario.link.rho_b == Approx(ref.link.rho_b));
    CHECK(cfg.scenario.link.sigma_n2 == Approx(1e-8));
    CHECK(cfg.scenario.link.eta_los == Approx(ref.link.eta_los));
    CHECK(cfg.scenario.threshold.beta == 15.0);
    CHECK(cfg.scenario.threshold.beta_bar_b == Approx(ref.threshold.beta_bar_b));
    CHECK(cfg.tether.length == 50.0);
    CHECK(cfg.tether.min_inclination == Approx(std::numbers::pi / 6.0));
    CHECK(cfg.seed == 1);
  }

  TEST_CASE("schema errors") {
    auto doc = dense_urban_config_json();
    doc["scenario"]["link"]["rho_b"] = 1.0;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = dense_urban_config_json();
    doc["scenario"]["link"]["eta_los_db"] = 30.0;  // above eta_nlos
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = dense_urban_config_json();
    doc["surprise"] = 1;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = dense_urban_config_json();
    doc["scenario"]["hotspot"]["radius_m"] = "big";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = dense_urban_config_json();
    doc["scenario"]["preset"] = "suburban";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = dense_urban_config_json();
    doc["seed"] = -3;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = dense_urban_config_json();
    doc["uav"]["duty_cycle"] = 1.5;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }

  TEST_CASE("preset with field-by-field override") {
    Json doc = {{"scenario", {{"preset", "high_rise"}, {"environment", {{"gamma1_m", 35.0}}}}}};
    const auto cfg = parse_config(doc);
    CHECK(cfg.scenario.env.gamma1 == 35.0);
    CHECK(cfg.scenario.env.a_r == 22.0);
    CHECK(cfg.scenario.tbs.h == 30.0);
    Json db = {{"scenario", {{"beta_db", 10.0}}}};
    CHECK(parse_config(db).scenario.threshold.beta == Approx(10.0));
  }

  TEST_CASE("config hash") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    const auto a = parse_config(dense_urban_config_json());
    const auto b = parse_config(dense_urban_config_json());
    CHECK(a.hash == b.hash);
    auto doc = dense_urban_config_json();
    doc["seed"] = 2;
    CHECK(parse_config(doc).hash != a.hash);
  }

  TEST_CASE("coverage map") {
    auto doc = dense_urban_config_json();
    doc["experiment"] = {{"x_m", {-200, 200, 8}}, {"y_m", {-200, 200, 8}}, {"h_m", 100}, {"metric", "P_br"}};
    const auto cfg = parse_config(doc);
    const auto out = run_coverage_map(cfg);
    REQUIRE(out.table.rows.size() == 51 * 51);
    CHECK(out.table.rows[1][0].get<double>() == -192.0);
    CHECK(out.table.rows[1][1].get<double>() == -200.0);
    for (const auto& r : out.table.rows) {
      const double v = r[3].get<double>();
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    const auto text = render(out, OutputFormat::Csv, cfg);
    CHECK(text.rfind("# tethercov coverage-map\n", 0) == 0);
    CHECK(text.find("# config_hash " + cfg.hash) != std::string::npos);
    CHECK(text.find("# seed 1\n") != std::string::npos);
    CHECK(text.find("\nx,y,h,P_br\n") != std::string::npos);

    auto bad = dense_urban_config_json();
    bad["experiment"] = {{"metric", "P_q"}};
    CHECK_THROWS_AS(run_coverage_map(parse_config(bad)), ConfigError);
  }

  TEST_CASE("optimize tethered: result on the surface, report round-trips") {
    auto doc = dense_urban_config_json();
    doc["uav"]["ground_stations"] = Json::array({{{"position_m", {-60, 40, 20}}}});
    doc["experiment"] = {{"method", "grid"}, {"surface", {{"psi_step_deg", 4}, {"h_divisions", 10}}}};
    const auto cfg = parse_config(doc);
    const auto out = run_optimize(cfg);
    REQUIRE(out.report);
    CHECK((*out.report)["distance_to_surface_m"].get<double>() < 0.5);
    const auto back = report_from_json(*out.report);
    CHECK(back.best_value == (*out.report)["best_value"].get<double>());
    Json core = *out.report;
    core.erase("gs_index");
    core.erase("distance_to_surface_m");
    CHECK(report_to_json(back) == core);
    const auto json_text = render(out, OutputFormat::Json, cfg);
    const auto parsed = Json::parse(json_text);
    CHECK(parsed["schema_version"] == kSchemaVersion);
    CHECK(report_to_json(report_from_json(parsed["report"])) == core);

    auto none = dense_urban_config_json();
    CHECK_THROWS_AS(run_optimize(parse_config(none)), ConfigError);
  }

  TEST_CASE("sweep") {
    auto doc = dense_urban_config_json();
    doc["uav"]["position_m"] = {30, 0, 100};
    doc["experiment"] = {{"sweep", {{"variable", "duty_A"}, {"range", {0.0, 1.0, 0.25}}}}, {"metrics", {"P_u"}}};
    const auto out = run_sweep(parse_config(doc));
    REQUIRE(out.table.rows.size() == 5);
    const double p0 = out.table.rows[0][1].get<double>();
    const double p1 = out.table.rows[4][1].get<double>();
    for (const auto& r : out.table.rows) {
      const double a = r[0].get<double>();
      CHECK(r[1].get<double>() == Approx(p0 + a * (p1 - p0)).epsilon(1e-9));
    }

    CHECK_THROWS_AS(parse_sweep({{"variable", "uav_x"}, {"values", {1, 3, 2}}}), ConfigError);
    CHECK_THROWS_AS(parse_sweep({{"variable", "colour"}, {"values", {1}}}), ConfigError);
    CHECK_THROWS_AS(parse_sweep({{"variable", "uav_x"}, {"values", Json::array()}}), ConfigError);
    auto bad = doc;
    bad["experiment"]["metrics"] = {"P_zz"};
    CHECK_THROWS_AS(run_sweep(parse_config(bad)), ConfigError);
  }

  TEST_CASE("association map") {
    auto doc = dense_urban_config_json();
    doc["uav"]["position_m"] = {-75, 75, 50};
    doc["experiment"] = {{"x_m", {-150, 150, 5}},
                         {"y_m", {-150, 150, 5}},
                         {"users", {{"distribution", "gaussian"}, {"std_m", 50}, {"count", 200}}}};
    const auto cfg = parse_config(doc);
    const auto out = run_association_map(cfg);
    std::set<std::string> classes;
    std::size_t users = 0;
    for (const auto& r : out.table.rows) {
      if (r[3].get<bool>()) classes.insert(r[4].get<std::string>());
      users += r[0] == "user";
    }
    CHECK(classes == std::set<std::string>{"UAV", "UAV_IF_LOS", "TBS"});
    CHECK(users == 200);
    CHECK(render(out, OutputFormat::Csv, cfg) == render(run_association_map(cfg), OutputFormat::Csv, cfg));
  }

  TEST_CASE("validate command") {
    auto doc = dense_urban_config_json();
    doc["experiment"] = {{"mc_samples", 100000}};
    const auto cfg = parse_config(doc);
    const auto out = run_validate(cfg);
    CHECK(out.ok);
    CHECK(render(out, OutputFormat::Csv, cfg) == render(run_validate(cfg), OutputFormat::Csv, cfg));
  }
}
