#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bbq {

// Exit codes: 0 all checks pass, 1 a check failed its pinned tolerance,
// 2 blow-up / stability truncation, 3 configuration or input error.
int cmd_run(const std::string& config_path);

// Deterministic seeded property suite; one line per property. Exit 0 iff all
// pass. corrupt_partition is a fault-injection hook used by the tests.
int cmd_check(std::uint64_t seed = 20240601, bool corrupt_partition = false);

// Independent trajectories over the sweep values; per-row failures are
// recorded in the boundary table, not fatal.
int cmd_sweep(const std::string& config_path);

// Re-derives the summary report and residual tables from a stored run
// directory without re-simulation.
int cmd_analyze(const std::string& run_dir,
                const std::optional<std::vector<double>>& q_override = {});

}  // namespace bbq
