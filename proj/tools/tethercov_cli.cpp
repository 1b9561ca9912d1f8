#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tethercov/cli_io.hpp"
#include "tethercov/parallel.hpp"

using namespace tethercov;

int main(int argc, char** argv) {
  CLI::App app{"Coverage analysis and placement for tethered and untethered UAVs serving a hot-spot"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format;
  std::size_t threads = 0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "analytic vs Monte Carlo cross-checks; exit code 1 on any mismatch"},
      {"coverage-map", "coverage metric over an (x, y) grid at fixed height"},
      {"optimize", "UAV placement by grid search or annealing"},
      {"sweep", "metrics against one swept variable"},
      {"association-map", "user association class over a grid, with optional user samples"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration (defaults to the dense-urban table)");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_path, "output file (stdout when omitted)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    parallel_workers() = threads;
    RunConfig cfg = config_path.empty() ? parse_config(dense_urban_config_json()) : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!format.empty()) cfg.format = parse_format(format);
    if (!out_path.empty()) cfg.out_path = out_path;

    CommandOutput out;
    if (command == "validate") out = run_validate(cfg);
    if (command == "coverage-map") out = run_coverage_map(cfg);
    if (command == "optimize") out = run_optimize(cfg);
    if (command == "sweep") out = run_sweep(cfg);
    if (command == "association-map") out = run_association_map(cfg);

    if (cfg.out_path) {
      std::ofstream file(*cfg.out_path);
      if (!file) throw std::runtime_error("cannot write " + *cfg.out_path);
      write_output(file, out, cfg.format, cfg);
      if (!file) throw std::runtime_error("write failed: " + *cfg.out_path);
    } else {
      write_output(std::cout, out, cfg.format, cfg);
    }
    if (!out.ok) {
      std::cerr << command << ": checks failed\n";
      return 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
