#pragma once

#include <cmath>
#include <numbers>

#include "bbq/errors.hpp"

namespace bbq {

// Uniform n×n grid on the torus [0,L)². Spectral coefficients live on integer
// wavenumbers k ∈ [-n/2, n/2)² in FFT storage order; the physical wavenumber
// of k is ξ = (2π/L)·k.
struct GridSpec {
  int n = 0;
  double domain_length = 2.0 * std::numbers::pi;
  double dealias_fraction = 2.0 / 3.0;

  void validate() const {
    if (n < 8 || (n & (n - 1)) != 0)
      throw ParameterError("grid n must be a power of two with n >= 8");
    if (!(domain_length > 0.0))
      throw ParameterError("grid domain_length must be positive");
    if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
      throw ParameterError("grid dealias_fraction must be in (0, 1]");
  }

  static GridSpec make(int n, double length = 2.0 * std::numbers::pi,
                       double dealias = 2.0 / 3.0) {
    GridSpec g{n, length, dealias};
    g.validate();
    return g;
  }

  int size() const { return n * n; }
  double dx() const { return domain_length / n; }
  double cell_area() const { return dx() * dx(); }

  // Integer wavenumber of storage index i ∈ [0, n).
  int wavenumber(int i) const { return i < n / 2 ? i : i - n; }
  // Same, but the unpaired Nyquist row acts as zero inside derivatives so
  // differentiation preserves Hermitian symmetry.
  int deriv_wavenumber(int i) const { return i == n / 2 ? 0 : wavenumber(i); }
  // Storage index of integer wavenumber k ∈ [-n/2, n/2).
  int index_of(int k) const { return k >= 0 ? k : k + n; }

  double two_pi_over_length() const {
    return 2.0 * std::numbers::pi / domain_length;
  }
  double xi(int k) const { return two_pi_over_length() * k; }
  // |ξ| of the integer wavenumber pair (k1, k2).
  double xi_mod(int k1, int k2) const {
    return two_pi_over_length() *
           std::sqrt(double(k1) * k1 + double(k2) * k2);
  }
  double nyquist() const { return xi(n / 2); }
  double dealias_radius() const { return dealias_fraction * nyquist(); }

  bool operator==(const GridSpec&) const = default;
};

}  // namespace bbq
