#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bbq/diagnostics.hpp"

namespace bbq {

// Column-labelled numeric table backing the time-series CSV.
struct SeriesTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const;  // DataError when absent
  bool has(const std::string& name) const;
};

// Fixed leading columns: t, l2_u, l2_theta, linf_u, linf_theta, besov_grad_u,
// besov_grad_theta, frac_A0, frac_B0, vortex_stretch, implied_c0; then l4,
// per-q Besov, per-s Sobolev and the θ-inequality implied constant.
std::vector<std::string> series_columns(const RecorderOptions& options);

void write_series_csv(const std::filesystem::path& path, const Trajectory& traj,
                      const RecorderOptions& options, const ModelParams& params);

// Strict reader: throws DataError naming the offending row on width or
// number-format mismatches.
SeriesTable read_series_csv(const std::filesystem::path& path);

// Rebuilds the sampled records (not the field snapshots) from a stored table.
Trajectory trajectory_from_table(const SeriesTable& table,
                                 const RecorderOptions& options);

// Full-precision decimal formatting used by every CSV writer (roundtrips
// doubles exactly, so analyze sees the same bits the run computed).
std::string format_double(double v);
// Short form used inside column names (hs3_u, besov_grad_u_q2, ...).
std::string format_exponent(double v);

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text);

}  // namespace bbq
