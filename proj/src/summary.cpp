#include "bbq/summary.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bbq {

std::size_t SeriesTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw DataError("series: missing column '" + name + "'");
}

bool SeriesTable::has(const std::string& name) const {
  for (const std::string& c : columns)
    if (c == name) return true;
  return false;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_exponent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<std::string> series_columns(const RecorderOptions& options) {
  std::vector<std::string> cols = {
      "t",       "l2_u",          "l2_theta",       "linf_u",
      "linf_theta", "besov_grad_u", "besov_grad_theta", "frac_A0",
      "frac_B0", "vortex_stretch", "implied_c0"};
  cols.push_back("l4_u");
  cols.push_back("l4_theta");
  cols.push_back("implied_c0_theta");
  for (double q : options.q_list) {
    cols.push_back("besov_grad_u_q" + format_exponent(q));
    cols.push_back("besov_grad_theta_q" + format_exponent(q));
  }
  for (double s : options.s_list) {
    cols.push_back("hs" + format_exponent(s) + "_u");
    cols.push_back("hs" + format_exponent(s) + "_theta");
  }
  return cols;
}

void write_series_csv(const std::filesystem::path& path, const Trajectory& traj,
                      const RecorderOptions& options,
                      const ModelParams& params) {
  // implied_c0 columns come from the critical-norm (q = ∞) inequalities.
  std::vector<double> imp_u(traj.samples.size(), 0.0);
  std::vector<double> imp_t(traj.samples.size(), 0.0);
  if (traj.samples.size() >= 3) {
    const ResidualSeries res = inequality_residuals(
        traj, std::numeric_limits<double>::infinity(), 1.0, params, options);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      imp_u[i] = res.velocity[i].implied_c0;
      imp_t[i] = res.temperature[i].implied_c0;
    }
  }

  std::ostringstream out;
  const std::vector<std::string> cols = series_columns(options);
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << "\n";
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const DiagnosticsRecord& r = traj.samples[i];
    std::vector<double> row = {r.t,
                               r.l2_u,
                               r.l2_theta,
                               r.linf_u,
                               r.linf_theta,
                               r.besov_grad_u,
                               r.besov_grad_theta,
                               r.frac_a0,
                               r.frac_b0,
                               r.vortex_stretch,
                               std::max(imp_u[i], imp_t[i]),
                               r.l4_u,
                               r.l4_theta,
                               imp_t[i]};
    for (std::size_t k = 0; k < options.q_list.size(); ++k) {
      row.push_back(r.besov_grad_u_q[k]);
      row.push_back(r.besov_grad_theta_q[k]);
    }
    for (std::size_t k = 0; k < options.s_list.size(); ++k) {
      row.push_back(r.hs_u[k]);
      row.push_back(r.hs_theta[k]);
    }
    for (std::size_t k = 0; k < row.size(); ++k)
      out << (k ? "," : "") << format_double(row[k]);
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("series: cannot open " + path.string());
  SeriesTable table;
  std::string line;
  if (!std::getline(in, line))
    throw DataError("series: " + path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
  }
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw DataError("series: bad number at row " + std::to_string(row_no) +
                        " of " + path.string());
      row.push_back(v);
    }
    if (row.size() != table.columns.size())
      throw DataError("series: row " + std::to_string(row_no) + " of " +
                      path.string() + " has " + std::to_string(row.size()) +
                      " fields, expected " +
                      std::to_string(table.columns.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Trajectory trajectory_from_table(const SeriesTable& table,
                                 const RecorderOptions& options) {
  Trajectory traj;
  const std::size_t c_t = table.col("t");
  const std::size_t c_l2u = table.col("l2_u");
  const std::size_t c_l2t = table.col("l2_theta");
  const std::size_t c_liu = table.col("linf_u");
  const std::size_t c_lit = table.col("linf_theta");
  const std::size_t c_bu = table.col("besov_grad_u");
  const std::size_t c_bt = table.col("besov_grad_theta");
  const std::size_t c_fa = table.col("frac_A0");
  const std::size_t c_fb = table.col("frac_B0");
  const std::size_t c_vs = table.col("vortex_stretch");
  const std::size_t c_l4u = table.col("l4_u");
  const std::size_t c_l4t = table.col("l4_theta");
  std::vector<std::pair<std::size_t, std::size_t>> qcols, scols;
  for (double q : options.q_list)
    qcols.emplace_back(
        table.col("besov_grad_u_q" + format_exponent(q)),
        table.col("besov_grad_theta_q" + format_exponent(q)));
  for (double s : options.s_list)
    scols.emplace_back(table.col("hs" + format_exponent(s) + "_u"),
                       table.col("hs" + format_exponent(s) + "_theta"));

  for (const std::vector<double>& row : table.rows) {
    DiagnosticsRecord r;
    r.t = row[c_t];
    r.l2_u = row[c_l2u];
    r.l2_theta = row[c_l2t];
    r.linf_u = row[c_liu];
    r.linf_theta = row[c_lit];
    r.besov_grad_u = row[c_bu];
    r.besov_grad_theta = row[c_bt];
    r.frac_a0 = row[c_fa];
    r.frac_b0 = row[c_fb];
    r.vortex_stretch = row[c_vs];
    r.l4_u = row[c_l4u];
    r.l4_theta = row[c_l4t];
    for (const auto& [cu, ct] : qcols) {
      r.besov_grad_u_q.push_back(row[cu]);
      r.besov_grad_theta_q.push_back(row[ct]);
    }
    for (const auto& [cu, ct] : scols) {
      r.hs_u.push_back(row[cu]);
      r.hs_theta.push_back(row[ct]);
    }
    traj.samples.push_back(std::move(r));
  }
  return traj;
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string());
    out << text;
    if (!out) throw DataError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bbq
