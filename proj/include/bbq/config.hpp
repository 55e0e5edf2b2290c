#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bbq/diagnostics.hpp"
#include "bbq/solver.hpp"

namespace bbq {

// Run configuration. JSON file with sections grid / model / stepper / init /
// diagnostics / output and an optional sweep block; parse validates
// everything and echo() emits the canonical form runs are keyed on.
struct RunConfig {
  GridSpec grid;
  double nu = 1.0;
  double lambda = 1.0;
  std::optional<double> cutoff_N;  // absent: dealias radius

  double dt = 1e-3;
  double t_end = 1.0;
  int sample_every = 10;

  InitSpec init;

  RecorderOptions diagnostics;
  std::optional<double> c0_override;

  struct Sweep {
    std::string param;  // model.nu | model.lambda | init.amplitude
    std::vector<double> values;
  };
  std::optional<Sweep> sweep;

  std::string output_dir = "out";
  int snapshot_every = 0;  // in samples; 0 disables snapshots

  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_json_text(const std::string& text);

  std::string echo() const;  // canonical pretty JSON

  ModelParams model() const {
    return ModelParams{nu, lambda,
                       cutoff_N ? *cutoff_N : grid.dealias_radius()};
  }
  StepperConfig stepper() const {
    StepperConfig s;
    s.dt = dt;
    s.t_end = t_end;
    s.sample_every = sample_every;
    return s;
  }
};

}  // namespace bbq
