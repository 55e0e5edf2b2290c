#include "bbq/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "bbq/spectral_ops.hpp"

namespace bbq {

namespace {

double smooth_step(double x) {
  // exp(-1/x) transition with S(x) + S(1-x) = 1.
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

}  // namespace

double dyadic_ramp(double r) {
  if (r <= 0.5) return 0.0;
  if (r >= 1.0) return 1.0;
  return smooth_step(2.0 * r - 1.0);
}

double phi0_profile(double r) { return dyadic_ramp(r) - dyadic_ramp(0.5 * r); }

bool DyadicPartition::block_resolved(int j) const {
  if (!in_range(j)) return false;
  for (double w : phi(j))
    if (w != 0.0) return true;
  return false;
}

std::vector<int> DyadicPartition::resolved_blocks() const {
  std::vector<int> out;
  for (int j = j_min; j <= j_max; ++j)
    if (block_resolved(j)) out.push_back(j);
  return out;
}

DyadicPartition build_partition(const GridSpec& grid) {
  grid.validate();
  const int n = grid.n;
  DyadicPartition part;
  part.grid = grid;

  std::vector<double> mod(std::size_t(n) * n);
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      const double r = grid.xi_mod(k1, k2);
      mod[std::size_t(i1) * n + i2] = r;
      if (r > 0.0) {
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
      }
    }
  }

  // Smallest/largest j whose closed annulus [2^{j-1}, 2^{j+1}] meets the
  // nonzero grid moduli. Every nonzero mode then lies in [2^{j_min}, 2^{j_max}]
  // where the telescoping sum is exactly one.
  part.j_min = int(std::ceil(std::log2(r_min) - 1.0));
  part.j_max = int(std::floor(std::log2(r_max) + 1.0));

  const int blocks = part.j_max - part.j_min + 1;
  part.phi_hat.assign(std::size_t(blocks), std::vector<double>(mod.size()));
  part.psi_hat.resize(mod.size());
  for (std::size_t i = 0; i < mod.size(); ++i) {
    for (int j = part.j_min; j <= part.j_max; ++j)
      part.phi_hat[std::size_t(j - part.j_min)][i] =
          phi0_profile(std::ldexp(mod[i], -j));
    part.psi_hat[i] = 1.0 - dyadic_ramp(mod[i]);
  }

  if (int(part.resolved_blocks().size()) < 3)
    throw ConfigError("build_partition: grid resolves fewer than 3 dyadic blocks");
  return part;
}

namespace {

SpectralField apply_weights(const SpectralField& f,
                            const std::vector<double>& w) {
  SpectralField out = f;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= w[i];
  return out;
}

void require_partition_grid(const SpectralField& f,
                            const DyadicPartition& part, const char* where) {
  require_same_grid(f.grid, part.grid, where);
}

void require_mean_zero(const SpectralField& f, const char* where) {
  // Advisory guard: the homogeneous blocks ignore the k = 0 mode anyway, so
  // rounding-level means on small difference fields must not trip it.
  const double scale = std::max(f.max_abs(), 1e-300);
  if (std::abs(f.mean()) > 1e-9 * scale)
    throw ParameterError(std::string(where) +
                         ": homogeneous norm requires a mean-zero field");
}

}  // namespace

SpectralField dyadic_block(const SpectralField& f, const DyadicPartition& part,
                           int j, bool homogeneous) {
  require_partition_grid(f, part, "dyadic_block");
  if (homogeneous) {
    if (!part.in_range(j))
      throw ParameterError("dyadic_block: homogeneous block index out of range");
    return apply_weights(f, part.phi(j));
  }
  if (j < -1)
    throw ParameterError("dyadic_block: inhomogeneous blocks start at j = -1");
  if (j == -1) return apply_weights(f, part.psi_hat);
  if (!part.in_range(j)) return SpectralField::zeros(f.grid);
  return apply_weights(f, part.phi(j));
}

SpectralField partial_sum(const SpectralField& f, const DyadicPartition& part,
                          int j) {
  require_partition_grid(f, part, "partial_sum");
  if (j < 0) return SpectralField::zeros(f.grid);
  SpectralField out = f;
  const GridSpec& g = f.grid;
  const int n = g.n;
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = g.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = g.wavenumber(i2);
      const double r = g.xi_mod(k1, k2);
      out.coeffs[std::size_t(i1) * n + i2] *=
          1.0 - dyadic_ramp(std::ldexp(r, -j));
    }
  }
  return out;
}

namespace {

void check_exponent(double v, const char* name) {
  if (!(v >= 1.0))
    throw ParameterError(std::string("besov_norm: ") + name + " must be >= 1");
}

}  // namespace

double besov_norm(std::span<const SpectralField> components,
                  const DyadicPartition& part, const BesovParams& params) {
  if (components.empty()) throw ParameterError("besov_norm: no components");
  check_exponent(params.p, "p");
  check_exponent(params.q, "q");
  for (const SpectralField& c : components) {
    require_partition_grid(c, part, "besov_norm");
    if (params.homogeneous) require_mean_zero(c, "besov_norm");
  }

  const int j_lo = params.homogeneous ? part.j_min : -1;
  const bool q_inf = std::isinf(params.q);
  double acc = 0.0;
  for (int j = j_lo; j <= part.j_max; ++j) {
    const bool psi_block = !params.homogeneous && j == -1;
    if (!psi_block && part.in_range(j) && !part.block_resolved(j)) continue;
    std::vector<RealField> phys;
    phys.reserve(components.size());
    for (const SpectralField& c : components)
      phys.push_back(inverse_transform(dyadic_block(c, part, j, params.homogeneous)));
    const double block_lp = lq_norm(std::span<const RealField>(phys), params.p);
    const double term = std::exp2(double(j) * params.s) * block_lp;
    if (q_inf)
      acc = std::max(acc, term);
    else
      acc += std::pow(term, params.q);
  }
  return q_inf ? acc : std::pow(acc, 1.0 / params.q);
}

double besov_norm(const SpectralField& f, const DyadicPartition& part,
                  const BesovParams& params) {
  return besov_norm(std::span<const SpectralField>(&f, 1), part, params);
}

namespace {

RealField circular_shift(const RealField& f, int o1, int o2) {
  const int n = f.grid.n;
  RealField out = RealField::zeros(f.grid);
  for (int i1 = 0; i1 < n; ++i1) {
    const int s1 = (i1 + o1 % n + n) % n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int s2 = (i2 + o2 % n + n) % n;
      out.at(i1, i2) = f.at(s1, s2);
    }
  }
  return out;
}

}  // namespace

double difference_besov_norm(const RealField& f, double s, double p, double q) {
  if (!(s > 0.0) || !(s < 1.0))
    throw ParameterError("difference_besov_norm: s must be in (0, 1)");
  if (!(p >= 1.0) || !(q >= 1.0))
    throw ParameterError("difference_besov_norm: p, q must be >= 1");

  const GridSpec& g = f.grid;
  const double dx = g.dx();
  const bool q_inf = std::isinf(q);
  constexpr int offsets[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const double measure = 2.0 * std::numbers::pi * std::numbers::ln2;

  double acc = 0.0;
  for (int m = 0; (1 << m) <= g.n / 2; ++m) {
    const int cells = 1 << m;
    const double rho = dx * cells;
    double dir_acc = 0.0;
    double dir_max = 0.0;
    for (const auto& o : offsets) {
      RealField shifted = circular_shift(f, o[0] * cells, o[1] * cells);
      for (std::size_t i = 0; i < shifted.samples.size(); ++i)
        shifted.samples[i] -= f.samples[i];
      const double d = lq_norm(shifted, p);
      dir_acc += q_inf ? 0.0 : std::pow(d, q);
      dir_max = std::max(dir_max, d);
    }
    if (q_inf) {
      acc = std::max(acc, dir_max / std::pow(rho, s));
    } else {
      const double mean = dir_acc / 4.0;
      acc += measure * mean * std::pow(rho, -s * q);
    }
  }
  return q_inf ? acc : std::pow(acc, 1.0 / q);
}

double hstar_norm(const SpectralField& f, const DyadicPartition& part,
                  double sigma) {
  require_partition_grid(f, part, "hstar_norm");
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw ParameterError("hstar_norm: sigma must be in (0, 1)");
  // Mean-zero is the caller's precondition; the block sum ignores the k = 0
  // mode regardless, so trajectory-difference fields with rounding-level
  // means evaluate correctly.

  const double length = f.grid.domain_length;
  double acc = 0.0;
  for (int j = part.j_min; j <= part.j_max; ++j) {
    if (!part.block_resolved(j)) continue;
    const std::vector<double>& w = part.phi(j);
    double block = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      block += w[i] * w[i] * std::norm(f.coeffs[i]);
    block *= length * length;  // ‖Δ_j f‖²_{L²} by Parseval
    const double weight = j <= 0 ? 1.0 : std::exp2(-2.0 * sigma * j);
    acc += weight * block;
  }
  return std::sqrt(acc);
}

ParaproductSplit paraproduct_split(const SpectralField& f,
                                   const SpectralField& g,
                                   const DyadicPartition& part) {
  require_partition_grid(f, part, "paraproduct_split");
  require_same_grid(f.grid, g.grid, "paraproduct_split");

  const int j_top = part.j_max;
  const std::size_t count = f.coeffs.size();

  // Physical inhomogeneous blocks Δ_k for k = -1..j_max and running partial
  // sums S_k; the three Bony terms are bilinear sums over these.
  auto blocks_of = [&](const SpectralField& h) {
    std::vector<RealField> b;
    b.reserve(std::size_t(j_top + 2));
    for (int k = -1; k <= j_top; ++k)
      b.push_back(inverse_transform(dyadic_block(h, part, k, false)));
    return b;
  };
  const std::vector<RealField> fb = blocks_of(f);
  const std::vector<RealField> gb = blocks_of(g);

  std::vector<double> sf(count, 0.0), sg(count, 0.0);
  std::vector<double> lh(count, 0.0), hl(count, 0.0), hh(count, 0.0);

  for (int k = -1; k <= j_top; ++k) {
    const std::size_t ik = std::size_t(k + 1);
    // sf/sg hold S_{k-1} here (blocks -1..k-2; empty for k <= 0).
    if (k >= 1) {
      for (std::size_t i = 0; i < count; ++i) {
        lh[i] += sf[i] * gb[ik].samples[i];
        hl[i] += fb[ik].samples[i] * sg[i];
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      double tilde = gb[ik].samples[i];
      if (k - 1 >= -1) tilde += gb[ik - 1].samples[i];
      if (k + 1 <= j_top) tilde += gb[ik + 1].samples[i];
      hh[i] += fb[ik].samples[i] * tilde;
    }
    if (k >= 0) {
      for (std::size_t i = 0; i < count; ++i) {
        sf[i] += fb[ik - 1].samples[i];
        sg[i] += gb[ik - 1].samples[i];
      }
    }
  }

  auto to_spectral = [&](std::vector<double>& buf) {
    RealField r{f.grid, std::move(buf)};
    return dealias(forward_transform(r));
  };
  ParaproductSplit split{to_spectral(lh), to_spectral(hl), to_spectral(hh)};
  return split;
}

BernsteinReport bernstein_check(const SpectralField& f,
                                const DyadicPartition& part, int j,
                                double alpha, double p, double q) {
  if (!(alpha >= 0.0)) throw ParameterError("bernstein_check: alpha must be >= 0");
  if (!(p >= 1.0) || !(q >= 1.0) || p > q)
    throw ParameterError("bernstein_check: need 1 <= p <= q");

  const SpectralField blk = dyadic_block(f, part, j, true);
  const RealField blk_phys = inverse_transform(blk);
  const RealField lap_phys = inverse_transform(laplacian_power(blk, alpha));

  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;

  BernsteinReport rep;
  rep.lhs = lq_norm(lap_phys, q);
  rep.upper_bound = std::exp2(2.0 * alpha * j + 2.0 * j * (inv_p - inv_q)) *
                    lq_norm(blk_phys, p);
  rep.lower_reference = std::exp2(2.0 * alpha * j) * lq_norm(blk_phys, q);
  rep.upper_constant = rep.upper_bound == 0.0 ? 0.0 : rep.lhs / rep.upper_bound;
  rep.lower_constant =
      rep.lower_reference == 0.0 ? 0.0 : rep.lhs / rep.lower_reference;
  return rep;
}

std::string norm_record_json(const std::string& field_id,
                             const BesovParams& params, double value,
                             const DyadicPartition& part) {
  nlohmann::json j;
  j["field_id"] = field_id;
  j["s"] = params.s;
  j["p"] = std::isinf(params.p) ? nlohmann::json("inf") : nlohmann::json(params.p);
  j["q"] = std::isinf(params.q) ? nlohmann::json("inf") : nlohmann::json(params.q);
  j["homogeneous"] = params.homogeneous;
  j["value"] = value;
  j["j_min"] = part.j_min;
  j["j_max"] = part.j_max;
  return j.dump();
}

}  // namespace bbq
