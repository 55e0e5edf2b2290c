#pragma once

#include <span>
#include <string>
#include <vector>

#include "bbq/field.hpp"

namespace bbq {

// Dyadic partition of unity on the grid's wavenumbers. Block j is supported
// on the annulus 2^{j-1} <= |ξ| <= 2^{j+1}, Φ̂_j(ξ) = Φ̂_0(2^{-j}ξ) by
// construction, and Σ_j Φ̂_j(ξ) = 1 on every nonzero grid wavenumber.
// Ψ̂ = 1 - Σ_{j>=0} Φ̂_j is the low-frequency lump of the inhomogeneous
// family (supported on |ξ| <= 1).
struct DyadicPartition {
  GridSpec grid;
  int j_min = 0;
  int j_max = 0;
  std::vector<std::vector<double>> phi_hat;  // [j - j_min][i1*n + i2]
  std::vector<double> psi_hat;

  bool in_range(int j) const { return j >= j_min && j <= j_max; }
  const std::vector<double>& phi(int j) const { return phi_hat[j - j_min]; }
  // A block is resolved when it carries nonzero weight somewhere on the grid.
  bool block_resolved(int j) const;
  std::vector<int> resolved_blocks() const;
};

// Smooth step: 0 for r <= 1/2, 1 for r >= 1, C^∞ exp(-1/x) ramp between.
// The dyadic profile is Φ̂_0(ξ) = ramp(|ξ|) - ramp(|ξ|/2); adjacent ramps
// telescope so partition sums are exact.
double dyadic_ramp(double r);
double phi0_profile(double r);

// Builds and tabulates the partition once per grid. Throws ConfigError when
// the grid resolves fewer than 3 dyadic blocks.
DyadicPartition build_partition(const GridSpec& grid);

// Δ̊_j f (homogeneous) or Δ_j f (inhomogeneous; j = -1 selects Ψ, j beyond
// the resolved range gives zero, j <= -2 is a parameter error).
SpectralField dyadic_block(const SpectralField& f, const DyadicPartition& part,
                           int j, bool homogeneous);

// Partial sum S_j = Σ_{k=-1}^{j-1} Δ_k, i.e. the multiplier 1 - ramp(2^{-j}|ξ|),
// supported on the ball |ξ| <= 2^j.
SpectralField partial_sum(const SpectralField& f, const DyadicPartition& part,
                          int j);

struct BesovParams {
  double s = 0.0;
  double p = 2.0;  // Lebesgue exponent in [1, ∞]
  double q = 2.0;  // summation exponent in [1, ∞]
  bool homogeneous = true;
};

// ‖f‖ = ‖ 2^{js} ‖Δ_j f‖_{L^p} ‖_{l^q} over the resolved block range.
// Homogeneous norms require a mean-zero field. The multi-component overload
// uses the pointwise Euclidean magnitude inside each block L^p norm.
double besov_norm(const SpectralField& f, const DyadicPartition& part,
                  const BesovParams& params);
double besov_norm(std::span<const SpectralField> components,
                  const DyadicPartition& part, const BesovParams& params);

// Finite-difference realization of the Besov norm for s in (0, 1): grid
// shifts at dyadic radii (L/n)·2^m, axis-aligned, log-uniform weights in |t|.
// Independent of the dyadic-block route; used as a cross-check oracle.
double difference_besov_norm(const RealField& f, double s, double p, double q);

// ‖f‖² = Σ_{j<=0} ‖Δ_j f‖²_{L²} + Σ_{j>=1} 2^{-2σj} ‖Δ_j f‖²_{L²} with the
// homogeneous blocks; mean-zero f, σ in (0, 1).
double hstar_norm(const SpectralField& f, const DyadicPartition& part,
                  double sigma);

// Bony splitting of the (dealiased) product f·g into low-high, high-low and
// high-high frequency interactions; the three parts sum back to the product.
struct ParaproductSplit {
  SpectralField low_high;
  SpectralField high_low;
  SpectralField high_high;
};

ParaproductSplit paraproduct_split(const SpectralField& f,
                                   const SpectralField& g,
                                   const DyadicPartition& part);

// Frequency-localized norm inequality report for block j:
//   lhs            = ‖(-Δ)^α Δ_j f‖_{L^q}
//   upper_bound    = 2^{2αj + 2j(1/p - 1/q)} ‖Δ_j f‖_{L^p}
//   lower_reference = 2^{2αj} ‖Δ_j f‖_{L^q}
// upper_constant = lhs/upper_bound, lower_constant = lhs/lower_reference.
struct BernsteinReport {
  double lhs = 0.0;
  double upper_bound = 0.0;
  double lower_reference = 0.0;
  double upper_constant = 0.0;
  double lower_constant = 0.0;
};

BernsteinReport bernstein_check(const SpectralField& f,
                                const DyadicPartition& part, int j,
                                double alpha, double p, double q);

// JSON norm record {field_id, s, p, q, homogeneous, value, j_min, j_max}.
std::string norm_record_json(const std::string& field_id,
                             const BesovParams& params, double value,
                             const DyadicPartition& part);

}  // namespace bbq
