#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bbq/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral damped Boussinesq simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Integrate one trajectory from a config");
  run->add_option("config", config_path, "JSON run configuration")->required();

  std::uint64_t seed = 20240601;
  bool corrupt = false;
  auto* check = app.add_subcommand("check", "Deterministic property suite");
  check->add_option("--seed", seed, "Seed for the randomized properties");
  check->add_flag("--corrupt-partition", corrupt,
                  "Fault-injection hook: damage the dyadic profile");

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep (boundary mapping)");
  sweep->add_option("config", sweep_path, "JSON run configuration with a sweep block")
      ->required();

  std::string run_dir;
  std::vector<double> qs;
  auto* analyze = app.add_subcommand("analyze", "Re-derive reports from a stored run");
  analyze->add_option("dir", run_dir, "Run output directory")->required();
  analyze->add_option("--q", qs, "Besov exponents to analyze (must be recorded)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return bbq::cmd_run(config_path);
  if (check->parsed()) return bbq::cmd_check(seed, corrupt);
  if (sweep->parsed()) return bbq::cmd_sweep(sweep_path);
  if (analyze->parsed()) {
    std::optional<std::vector<double>> q_override;
    if (!qs.empty()) q_override = qs;
    return bbq::cmd_analyze(run_dir, q_override);
  }
  return 3;
}
