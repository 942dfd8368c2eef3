#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "finslerkit/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for spherically symmetric Finsler metrics"};
  std::string config_path;
  finslerkit::CliOverrides overrides;
  std::uint64_t seed = 0;
  int samples = 0;
  std::string dump_dir;
  app.add_option("config", config_path, "JSON config file")->required();
  app.add_flag("--json", overrides.json, "Emit the machine-readable JSON report");
  auto* seed_opt = app.add_option("--seed", seed, "Override the sampling seed");
  auto* samples_opt = app.add_option("--samples", samples, "Override the sample count")
                          ->check(CLI::PositiveNumber);
  auto* dump_opt =
      app.add_option("--dump-geodesics", dump_dir, "Write geodesic CSV files to DIR");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : finslerkit::kExitConfigError;
  }
  if (*seed_opt) overrides.seed = seed;
  if (*samples_opt) overrides.samples = samples;
  if (*dump_opt) overrides.dump_geodesics_dir = dump_dir;

  std::string out, err;
  const int code = finslerkit::run_config(config_path, overrides, out, err);
  std::cout << out;
  std::cerr << err;
  return code;
}
