#include "dampedwave/config.hpp"
#include "dampedwave/driver.hpp"
#include "dampedwave/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace dampedwave;

namespace {

/// Defaults depend on beta, so the file is read twice: once to learn beta, then on top of the
/// matching defaults.
RunConfig resolve_config(const std::string& path, std::optional<double> beta_override)
{
  double beta = 1.0;
  if (!path.empty())
    beta = load_config(path).beta;
  if (beta_override)
    beta = *beta_override;
  RunConfig config = default_config(beta);
  if (!path.empty())
    config = load_config(path, config);
  if (beta_override)
    config.beta = *beta_override;
  return config;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Quasimodes and energy decay of the damped wave equation on a strip"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string tolerance_path;
  int jobs = 1;
  std::optional<double> beta_override;

  app.add_option("--config", config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "directory for CSVs, manifest.json and summary.txt");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--beta-override", beta_override, "replace beta from the configuration");
  app.add_option("--tolerance-file", tolerance_path, "acceptance thresholds, key = value")
      ->check(CLI::ExistingFile);

  for (const auto& name : subcommands())
    app.add_subcommand(name, "run the " + name + " stage")->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    const auto config = resolve_config(config_path, beta_override);
    const auto tolerances =
        tolerance_path.empty() ? Tolerances{} : load_tolerances(tolerance_path);
    Driver driver(config, tolerances, out_dir, jobs);
    const int status = driver.run(subcommand);
    for (const auto& r : driver.reports()) {
      std::cout << "[" << r.stage << "] " << (r.error.empty() ? (r.failed() ? "fail" : "pass") : "error");
      if (!r.error.empty())
        std::cout << ": " << r.error;
      std::cout << '\n';
    }
    std::cout << "summary: " << out_dir << "/summary.txt\n";
    return status;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
